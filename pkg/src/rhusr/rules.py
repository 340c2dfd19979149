"""Sequential rules and their measures, straight from the definitions.

Nothing here prunes or caches; the miner and the oracle are both checked
against these functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .seqdb import ItemStats, QSequence, SequenceDatabase, SidSet, compute_item_stats


@dataclass(frozen=True, order=True)
class SequentialRule:
    """``antecedent => consequent``; both sides sorted, non-empty, disjoint."""

    antecedent: tuple[int, ...]
    consequent: tuple[int, ...]

    def __post_init__(self):
        x = tuple(sorted(set(self.antecedent)))
        y = tuple(sorted(set(self.consequent)))
        if not x or not y:
            raise ValueError("both sides of a rule must be non-empty")
        if set(x) & set(y):
            raise ValueError(f"antecedent and consequent intersect: {x} / {y}")
        object.__setattr__(self, "antecedent", x)
        object.__setattr__(self, "consequent", y)

    @classmethod
    def of(cls, x: Iterable[int] | int, y: Iterable[int] | int) -> "SequentialRule":
        x = (x,) if isinstance(x, int) else tuple(x)
        y = (y,) if isinstance(y, int) else tuple(y)
        return cls(x, y)

    @classmethod
    def _trusted(cls, x: tuple[int, ...], y: tuple[int, ...]) -> "SequentialRule":
        # caller guarantees sorted, non-empty, disjoint sides
        rule = object.__new__(cls)
        object.__setattr__(rule, "antecedent", x)
        object.__setattr__(rule, "consequent", y)
        return rule

    @property
    def items(self) -> tuple[int, ...]:
        return tuple(sorted(self.antecedent + self.consequent))

    @property
    def size(self) -> tuple[int, int]:
        return len(self.antecedent), len(self.consequent)

    def render(self, names: tuple[str, ...] | None = None) -> str:
        def name(i):
            return names[i] if names is not None else str(i)

        left = ",".join(name(i) for i in self.antecedent)
        right = ",".join(name(i) for i in self.consequent)
        return f"{{{left}}} => {{{right}}}"


@dataclass(frozen=True)
class RuleMeasures:
    support_count: int
    support: Fraction
    confidence: Fraction
    utility: int
    sids: SidSet
    antecedent_count: int = 0


@dataclass(frozen=True)
class ExpansionSets:
    only_left: frozenset[int]
    only_right: frozenset[int]
    left_right: frozenset[int]


def occurs_in(rule: SequentialRule, seq: QSequence) -> int | None:
    """Return the smallest cut ``p`` (itemsets in the prefix) or None.

    The rule occurs when every antecedent item lies in the first ``p``
    itemsets and every consequent item after them.  Items are unique within
    a sequence, so the smallest valid ``p`` is one past the last antecedent
    itemset.
    """
    pos = seq.positions
    try:
        x_end = max(pos[i] for i in rule.antecedent)
        y_start = min(pos[j] for j in rule.consequent)
    except KeyError:
        return None
    if x_end < y_start:
        return x_end + 1
    return None


def rule_utility_in_seq(rule: SequentialRule, seq: QSequence, profits: dict[int, int]) -> int:
    if occurs_in(rule, seq) is None:
        raise ValueError(f"rule {rule.render()} does not occur in sequence {seq.sid}")
    q = seq.quantities
    return sum(q[i] * profits[i] for i in rule.items)


def rule_utility(rule: SequentialRule, db: SequenceDatabase) -> int:
    return sum(rule_utility_in_seq(rule, s, db.profits) for s in db if occurs_in(rule, s) is not None)


def sids_of_itemset(items: Iterable[int], stats: dict[int, ItemStats]) -> SidSet:
    items = list(items)
    if not items:
        raise ValueError("empty itemset")
    try:
        out = stats[items[0]].sids
        for i in items[1:]:
            out = out & stats[i].sids
    except KeyError as exc:
        raise KeyError(f"unknown item {exc.args[0]}") from None
    return out


def measures(rule: SequentialRule, db: SequenceDatabase, stats: dict[int, ItemStats] | None = None) -> RuleMeasures:
    """Support, confidence and utility by a full scan of ``db``.

    Rules over items the database never mentions get support and
    confidence 0.
    """
    n = len(db)
    hits = [s for s in db if occurs_in(rule, s) is not None]
    sids = SidSet.from_sids((s.sid for s in hits), n)
    utility = sum(rule_utility_in_seq(rule, s, db.profits) for s in hits)
    if stats is None:
        stats = compute_item_stats(db)
    try:
        x_count = len(sids_of_itemset(rule.antecedent, stats))
    except KeyError:
        x_count = 0
    count = len(hits)
    confidence = Fraction(count, x_count) if x_count else Fraction(0)
    return RuleMeasures(count, Fraction(count, n), confidence, utility, sids, x_count)


def expansion_sets(rule: SequentialRule, seq: QSequence, witness: int | None = None) -> ExpansionSets:
    """Items of ``seq`` that can grow ``rule`` on the left, right, or both.

    An item joins the left side only if it is larger than every antecedent
    item and sits before the consequent; it joins the right side only if it
    is larger than every consequent item and sits after the antecedent.
    """
    if witness is None:
        witness = occurs_in(rule, seq)
    if witness is None:
        raise ValueError(f"rule {rule.render()} does not occur in sequence {seq.sid}")
    pos = seq.positions
    x_end = witness - 1
    y_start = min(pos[j] for j in rule.consequent)
    max_x = rule.antecedent[-1]
    max_y = rule.consequent[-1]
    members = set(rule.antecedent) | set(rule.consequent)
    left = set()
    right = set()
    for i, p in pos.items():
        if i in members:
            continue
        if p < y_start and i > max_x:
            left.add(i)
        if p > x_end and i > max_y:
            right.add(i)
    return ExpansionSets(frozenset(left - right), frozenset(right - left), frozenset(left & right))
