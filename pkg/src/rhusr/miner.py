"""Rare high-utility sequential rule mining by left/right rule expansion.

The search starts from every 1*1 rule ``i => j`` and grows rules one item
at a time.  A right expansion adds an item larger than every consequent
item; a left expansion adds an item larger than every antecedent item, and
once a rule has been grown on the left it is never grown on the right
again.  That gives each rule exactly one expansion path.

Seven pruning strategies can be toggled independently; they change the
amount of work, never the result:

1. drop items whose SEU or support is too low before mining
2. drop 1*1 rules whose SEU or support is too low
3. stop at any rule whose support is below ``minsup``
4. veto a left expansion by ``i`` if some ``i => j`` (j in consequent) is
   too rare in the rule count matrix
5. veto a right expansion by ``i`` if some ``j => i`` (j in antecedent) is
   too rare
6. skip all expansions when the utility-table bound
   ``iutil + lutil + rutil + lrutil`` is below ``minutil``
7. skip left expansions when ``iutil + lutil + lrutil`` is below
   ``minutil``
"""

from __future__ import annotations

import json
import math
import time
import tracemalloc
from bisect import bisect_right
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterator, NamedTuple

from .rules import RuleMeasures, SequentialRule, expansion_sets, occurs_in
from .seqdb import (
    ItemStats,
    SequenceDatabase,
    SidSet,
    compute_item_stats,
    project_database,
    sequence_utility,
)

ALL_STRATEGIES = frozenset(range(1, 8))


# -- thresholds ----------------------------------------------------------------

class Count(NamedTuple):
    """An absolute support threshold, in sequences."""

    value: int

    def __str__(self):
        return f"{self.value}c"


def parse_threshold(value) -> Fraction | Count:
    """Accept ``0.25``, ``"0.25"``, ``"1/4"``, ``"2c"`` or ``Count(2)``.

    Floats go through ``str`` first so ``0.1`` means one tenth exactly.
    """
    if isinstance(value, Count):
        return value
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError(f"not a threshold: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"not a threshold: {value!r}")
        return Fraction(str(value))
    text = str(value).strip()
    if text.endswith("c"):
        try:
            return Count(int(text[:-1]))
        except ValueError:
            raise ValueError(f"not an absolute count: {value!r}") from None
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a threshold: {value!r}") from None


@dataclass(frozen=True)
class Limits:
    """Thresholds resolved against a database of ``n`` sequences."""

    n: int
    minutil: int
    minconf: Fraction
    minsup_count: int
    maxsup: Fraction
    maxsup_inclusive: bool = False

    def __post_init__(self):
        # integer cross-multiplication keeps the hot path free of Fraction objects
        object.__setattr__(self, "_max_bound", self.maxsup.numerator * self.n)
        object.__setattr__(self, "_max_den", self.maxsup.denominator)
        object.__setattr__(self, "_conf_num", self.minconf.numerator)
        object.__setattr__(self, "_conf_den", self.minconf.denominator)

    def is_rare(self, count: int) -> bool:
        if count < self.minsup_count:
            return False
        # count / n < p / q  <=>  count * q < p * n
        scaled = count * self._max_den
        return scaled <= self._max_bound if self.maxsup_inclusive else scaled < self._max_bound

    def qualifies(self, count: int, utility: int, antecedent_count: int) -> bool:
        return (
            utility >= self.minutil
            and antecedent_count > 0
            and count * self._conf_den >= self._conf_num * antecedent_count
            and self.is_rare(count)
        )


@dataclass(frozen=True)
class MiningParams:
    """Mining thresholds plus strategy toggles.

    ``minsup``/``maxsup`` are fractions of the database size or
    :class:`Count` values.  ``minconf`` above 1 is accepted and simply
    yields no rules.
    """

    minutil: int
    minconf: Fraction | float | str = 0
    minsup: Fraction | Count | float | str = 0
    maxsup: Fraction | Count | float | str = 1
    maxsup_inclusive: bool = False
    strategies: frozenset[int] = ALL_STRATEGIES

    def __post_init__(self):
        if isinstance(self.minutil, bool) or int(self.minutil) != self.minutil:
            raise ValueError(f"minutil must be an integer, got {self.minutil!r}")
        object.__setattr__(self, "minutil", int(self.minutil))
        if self.minutil < 0:
            raise ValueError("minutil must be non-negative")
        minconf = parse_threshold(self.minconf)
        if isinstance(minconf, Count):
            raise ValueError("minconf must be a fraction")
        if minconf < 0:
            raise ValueError("minconf must be non-negative")
        object.__setattr__(self, "minconf", minconf)
        minsup = parse_threshold(self.minsup)
        maxsup = parse_threshold(self.maxsup)
        for name, t in (("minsup", minsup), ("maxsup", maxsup)):
            v = t.value if isinstance(t, Count) else t
            if v < 0:
                raise ValueError(f"{name} must be non-negative")
            if not isinstance(t, Count) and v > 1:
                raise ValueError(f"{name} must be at most 1")
        if type(minsup) is type(maxsup) and minsup > maxsup:
            raise ValueError("minsup must not exceed maxsup")
        object.__setattr__(self, "minsup", minsup)
        object.__setattr__(self, "maxsup", maxsup)
        strategies = frozenset(self.strategies)
        if not strategies <= ALL_STRATEGIES:
            raise ValueError(f"unknown strategies {sorted(strategies - ALL_STRATEGIES)}")
        object.__setattr__(self, "strategies", strategies)

    def uses(self, k: int) -> bool:
        return k in self.strategies

    def without(self, *ks: int) -> "MiningParams":
        return replace(self, strategies=self.strategies - set(ks))

    def maxsup_fraction(self, n: int) -> Fraction:
        if isinstance(self.maxsup, Count):
            return Fraction(self.maxsup.value, n)
        return self.maxsup

    def limits(self, n: int) -> Limits:
        if n < 1:
            raise ValueError("empty database")
        if isinstance(self.minsup, Count):
            minsup_count = self.minsup.value
        else:
            minsup_count = math.ceil(self.minsup * n)
        maxsup = self.maxsup_fraction(n)
        if maxsup > 1:
            raise ValueError(f"maxsup {self.maxsup} exceeds the database size {n}")
        raw_min = Fraction(self.minsup.value, n) if isinstance(self.minsup, Count) else self.minsup
        if raw_min > maxsup:
            raise ValueError("minsup must not exceed maxsup")
        return Limits(n, self.minutil, self.minconf, minsup_count, maxsup, self.maxsup_inclusive)


# -- telemetry and results -------------------------------------------------------

@dataclass
class Telemetry:
    rules_found: int = 0
    candidates_generated: int = 0
    tables_built: int = 0
    pruned_by_strategy: dict[int, int] = field(default_factory=lambda: {k: 0 for k in range(1, 8)})
    runtime_ms: float = 0.0
    peak_mem_bytes: int = 0

    def merge(self, other: "Telemetry"):
        self.candidates_generated += other.candidates_generated
        self.tables_built += other.tables_built
        for k, v in other.pruned_by_strategy.items():
            self.pruned_by_strategy[k] += v

    def to_dict(self) -> dict:
        return {
            "rules_found": self.rules_found,
            "candidates_generated": self.candidates_generated,
            "tables_built": self.tables_built,
            "pruned_by_strategy": [self.pruned_by_strategy[k] for k in range(1, 8)],
            "runtime_ms": round(self.runtime_ms, 3),
            "peak_mem_bytes": self.peak_mem_bytes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass
class RhusrSet:
    """Mined rules in canonical order (antecedent, then consequent)."""

    rules: list[tuple[SequentialRule, RuleMeasures]]
    telemetry: Telemetry = field(default_factory=Telemetry, compare=False)

    def __iter__(self) -> Iterator[tuple[SequentialRule, RuleMeasures]]:
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    def __getitem__(self, k):
        return self.rules[k]

    def rule_list(self) -> list[SequentialRule]:
        return [r for r, _ in self.rules]

    def find(self, rule: SequentialRule) -> RuleMeasures | None:
        for r, m in self.rules:
            if r == rule:
                return m
        return None


# -- utility tables ----------------------------------------------------------------

class Row(NamedTuple):
    """One utility-table row.

    ``x_end`` is the itemset index of the last antecedent item and
    ``y_start`` that of the first consequent item; both are needed to
    update the row without rescanning the sequence.
    """

    sid: int
    iutil: int
    lutil: int
    rutil: int
    lrutil: int
    x_end: int
    y_start: int


@dataclass
class UtilityTable:
    rule: SequentialRule
    rows: list[Row]

    @property
    def support_count(self) -> int:
        return len(self.rows)

    @property
    def utility(self) -> int:
        return sum(r.iutil for r in self.rows)

    @property
    def bound(self) -> int:
        """Upper bound on the utility of the rule and all its expansions."""
        return sum(r.iutil + r.lutil + r.rutil + r.lrutil for r in self.rows)

    @property
    def left_bound(self) -> int:
        """Upper bound on the utility of the rule and its left expansions."""
        return sum(r.iutil + r.lutil + r.lrutil for r in self.rows)

    def sids(self, width: int) -> SidSet:
        return SidSet.from_sids((r.sid for r in self.rows), width)


def build_utility_table(rule: SequentialRule, db: SequenceDatabase) -> UtilityTable:
    """Build the table of ``rule`` from scratch with a full database scan."""
    rows = []
    profits = db.profits
    for seq in db:
        witness = occurs_in(rule, seq)
        if witness is None:
            continue
        q = seq.quantities
        sets = expansion_sets(rule, seq, witness)
        rows.append(Row(
            seq.sid,
            sum(q[i] * profits[i] for i in rule.items),
            sum(q[i] * profits[i] for i in sets.only_left),
            sum(q[i] * profits[i] for i in sets.only_right),
            sum(q[i] * profits[i] for i in sets.left_right),
            witness - 1,
            min(seq.positions[j] for j in rule.consequent),
        ))
    return UtilityTable(rule, rows)


class _Seq(NamedTuple):
    ids: list[int]          # items in id order, for bisect
    order: list[tuple[int, int, int]]   # (item, itemset index, utility) in id order
    where: dict[int, tuple[int, int]]   # item -> (itemset index, utility)
    su: int


def _index(db: SequenceDatabase) -> list[_Seq]:
    out = []
    profits = db.profits
    for seq in db:
        order = sorted((i, p, seq.quantities[i] * profits[i]) for i, p in seq.positions.items())
        out.append(_Seq(
            [t[0] for t in order],
            order,
            {i: (p, u) for i, p, u in order},
            sequence_utility(seq, profits),
        ))
    return out


def _make_row(seq: _Seq, sid: int, iutil: int, x_end: int, y_start: int, max_x: int, max_y: int) -> Row:
    lutil = rutil = lrutil = 0
    for j, pj, uj in seq.order[bisect_right(seq.ids, min(max_x, max_y)):]:
        left = pj < y_start and j > max_x
        right = pj > x_end and j > max_y
        if left:
            if right:
                lrutil += uj
            else:
                lutil += uj
        elif right:
            rutil += uj
    return Row(sid, iutil, lutil, rutil, lrutil, x_end, y_start)


def _extend_rows(index: list[_Seq], rows, item: int, left: bool, max_x: int, max_y: int) -> list[Row]:
    """Rows of the rule grown by ``item``, updated from the parent's rows.

    ``iutil`` gains the item's utility.  The three expansion sums lose the
    item itself and every item that can no longer extend the grown rule on
    that side; items that could go either way before but only one way now
    move from ``lrutil`` to ``lutil`` or ``rutil``.
    """
    out = []
    for row in rows:
        seq = index[row.sid]
        hit = seq.where.get(item)
        if hit is None:
            continue
        p_i, u_i = hit
        sid, iutil, lutil, rutil, lrutil, x_end, y_start = row
        if left:
            if not (p_i < y_start and item > max_x):
                continue
            nx_end, ny_start, nmax_x, nmax_y = max(x_end, p_i), y_start, item, max_y
        else:
            if not (p_i > x_end and item > max_y):
                continue
            nx_end, ny_start, nmax_x, nmax_y = x_end, min(y_start, p_i), max_x, item
        sums = [0, lutil, rutil, lrutil]    # indexed by 1*left + 2*right
        for j, pj, uj in seq.order[bisect_right(seq.ids, min(max_x, max_y)):]:
            old = (pj < y_start and j > max_x) + 2 * (pj > x_end and j > max_y)
            if not old:
                continue
            if j == item:
                new = 0
            else:
                new = (pj < ny_start and j > nmax_x) + 2 * (pj > nx_end and j > nmax_y)
            if new != old:
                sums[old] -= uj
                sums[new] += uj
        out.append(Row(sid, iutil + u_i, sums[1], sums[2], sums[3], nx_end, ny_start))
    return out


class _Prepared:
    """Threshold-independent work for one database, shared across runs.

    Item statistics, and per set of surviving items the sequence index,
    the 1*1 rules and their count matrix.  Databases are immutable, so
    repeated runs with other thresholds or toggles can reuse all of it.
    """

    def __init__(self, db: SequenceDatabase):
        self.db = db
        self.stats = compute_item_stats(db)
        self.views: dict[frozenset[int], tuple] = {}

    def view(self, keep: frozenset[int]):
        hit = self.views.get(keep)
        if hit is None:
            db = self.db
            work = db if len(keep) == len(self.stats) else project_database(db, keep)
            index = _index(work)
            initial = _initial_from_index(index, len(db))
            rows = [_initial_rows(index, init.rule, init.sids) for init in initial]
            hit = self.views[keep] = (index, initial, build_rcm(initial), rows)
        return hit


_prepared_cache: dict[int, _Prepared] = {}


def _prepared(db: SequenceDatabase) -> _Prepared:
    hit = _prepared_cache.get(id(db))
    if hit is None or hit.db is not db:
        if len(_prepared_cache) >= 4:
            _prepared_cache.clear()
        hit = _prepared_cache[id(db)] = _Prepared(db)
    return hit


def _cached_index(db: SequenceDatabase) -> list[_Seq]:
    prep = _prepared(db)
    return prep.view(frozenset(prep.stats))[0]


def extend_utility_table(table: UtilityTable, item: int, side: str, db: SequenceDatabase) -> UtilityTable:
    """Table of ``table.rule`` grown by ``item`` on ``side`` ('left' or 'right').

    Rows where the grown rule cannot occur (or ``item`` is not eligible
    there) are dropped, so the result may be empty.
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    rule = table.rule
    left = side == "left"
    if item in rule.antecedent or item in rule.consequent:
        raise ValueError(f"item {item} already in rule {rule.render()}")
    side_max = rule.antecedent[-1] if left else rule.consequent[-1]
    if item < side_max:
        # the search never makes such a step, and the row update relies on it
        raise ValueError(f"item {item} is below the largest {side} item {side_max}")
    if left:
        grown = SequentialRule(rule.antecedent + (item,), rule.consequent)
    else:
        grown = SequentialRule(rule.antecedent, rule.consequent + (item,))
    rows = _extend_rows(_cached_index(db), table.rows, item, left, rule.antecedent[-1], rule.consequent[-1])
    return UtilityTable(grown, rows)


# -- item statistics and 1*1 rules ----------------------------------------------

def prune_items_by_seu(stats: dict[int, ItemStats], params: MiningParams, n: int) -> set[int]:
    """Items that survive item-level pruning (all items if it is disabled)."""
    if not params.uses(1):
        return set(stats)
    limits = params.limits(n)
    return {
        i for i, st in stats.items()
        if st.seu >= limits.minutil and st.support_count >= limits.minsup_count
    }


@dataclass(frozen=True)
class InitialRule:
    rule: SequentialRule
    seu: int
    sids: SidSet

    @property
    def support_count(self) -> int:
        return len(self.sids)


def _pair_scan(index: list[_Seq]) -> dict[tuple[int, int], tuple[int, int]]:
    """``(i, j) -> (sid bits, SEU)`` for every 1*1 rule occurring somewhere."""
    pairs: dict[tuple[int, int], list[int]] = {}
    for sid, seq in enumerate(index):
        if not seq.order:
            continue
        flag = 1 << sid
        by_pos = sorted(seq.order, key=lambda t: t[1])
        su = seq.su
        k = 0
        for i, pi, _ in by_pos:
            while k < len(by_pos) and by_pos[k][1] <= pi:
                k += 1
            for j, _, _ in by_pos[k:]:
                acc = pairs.get((i, j))
                if acc is None:
                    pairs[(i, j)] = [flag, su]
                else:
                    acc[0] |= flag
                    acc[1] += su
    return {key: (v[0], v[1]) for key, v in pairs.items()}


def scan_initial_rules(db: SequenceDatabase) -> list[InitialRule]:
    """Every 1*1 rule that occurs in ``db``, with its SEU and sids, unfiltered."""
    return _initial_from_index(_cached_index(db), len(db))


def _initial_from_index(index: list[_Seq], n: int) -> list[InitialRule]:
    pairs = _pair_scan(index)
    return [
        InitialRule(SequentialRule((i,), (j,)), seu, SidSet(bits, n))
        for (i, j), (bits, seu) in sorted(pairs.items())
    ]


def generate_initial_rules(db: SequenceDatabase, params: MiningParams) -> list[tuple[InitialRule, UtilityTable]]:
    """1*1 rules of an (already projected) database that pass 1*1 pruning."""
    limits = params.limits(len(db))
    index = _cached_index(db)
    out = []
    for init in scan_initial_rules(db):
        if params.uses(2) and (init.seu < limits.minutil or init.support_count < limits.minsup_count):
            continue
        out.append((init, UtilityTable(init.rule, _initial_rows(index, init.rule, init.sids))))
    return out


def _initial_rows(index: list[_Seq], rule: SequentialRule, sids) -> list[Row]:
    (i,), (j,) = rule.antecedent, rule.consequent
    rows = []
    for sid in sids:
        seq = index[sid]
        pi, ui = seq.where[i]
        pj, uj = seq.where[j]
        rows.append(_make_row(seq, sid, ui + uj, pi, pj, i, j))
    return rows


class RuleCountMatrix:
    """Support counts of 1*1 rules; absent pairs count as 0."""

    def __init__(self, counts: dict[tuple[int, int], int] | None = None):
        self.counts = dict(counts or {})

    def __getitem__(self, pair: tuple[int, int]) -> int:
        return self.counts.get(pair, 0)

    def __len__(self) -> int:
        return len(self.counts)

    def nonzero(self) -> int:
        return sum(1 for v in self.counts.values() if v)


def build_rcm(initial: list[InitialRule]) -> RuleCountMatrix:
    return RuleCountMatrix({
        (r.rule.antecedent[0], r.rule.consequent[0]): r.support_count for r in initial
    })


# -- search ------------------------------------------------------------------------

Observer = Callable[[UtilityTable], None]


class _Search:
    def __init__(self, index, n, item_bits, rcm, limits, strategies, observer=None):
        self.index = index
        self.n = n
        self.item_bits = item_bits
        self.rcm = rcm
        self.limits = limits
        self.strategies = strategies
        self.observer = observer
        # membership flags, looked up once instead of per node
        self.on = [k in strategies for k in range(8)]
        self.found: list[tuple[SequentialRule, RuleMeasures]] = []
        self.ratios: dict[tuple[int, int], Fraction] = {}
        self.tel = Telemetry()

    def start(self, x: tuple[int, ...], y: tuple[int, ...], rows: list[Row]):
        self.tel.candidates_generated += 1
        self.tel.tables_built += 1
        self._consider(x, y, rows, self.item_bits[x[0]], True)

    def _consider(self, x, y, rows, x_bits, right_allowed):
        if self.observer is not None:
            self.observer(UtilityTable(SequentialRule._trusted(x, y), list(rows)))
        count = len(rows)
        lim = self.limits
        if self.on[3] and count < lim.minsup_count:
            self.tel.pruned_by_strategy[3] += 1
            return
        utility = lsum = rsum = lrsum = 0
        for r in rows:
            utility += r.iutil
            lsum += r.lutil
            rsum += r.rutil
            lrsum += r.lrutil
        left_bound = utility + lsum + lrsum
        bound = left_bound + rsum
        x_count = x_bits.bit_count()
        if lim.qualifies(count, utility, x_count):
            bits = 0
            for r in rows:
                bits |= 1 << r.sid
            self.found.append((SequentialRule._trusted(x, y), RuleMeasures(
                count, self._ratio(count, self.n), self._ratio(count, x_count), utility,
                SidSet(bits, self.n), x_count,
            )))
        # every item has positive utility, so a zero sum means no candidates on that side
        if right_allowed:
            if not self.on[6] or bound >= lim.minutil:
                if rsum or lrsum:
                    self._expand(x, y, rows, x_bits, left=False)
            else:
                self.tel.pruned_by_strategy[6] += 1
        if not self.on[7] or left_bound >= lim.minutil:
            if lsum or lrsum:
                self._expand(x, y, rows, x_bits, left=True)
        else:
            self.tel.pruned_by_strategy[7] += 1

    def _ratio(self, a, b):
        hit = self.ratios.get((a, b))
        if hit is None:
            hit = self.ratios[(a, b)] = Fraction(a, b)
        return hit

    def _veto(self, j, x, y, left):
        rcm = self.rcm.counts
        need = self.limits.minsup_count
        if left:
            return self.on[4] and any(rcm.get((j, b), 0) < need for b in y)
        return self.on[5] and any(rcm.get((a, j), 0) < need for a in x)

    def _expand(self, x, y, rows, x_bits, left):
        # Same update as _extend_rows, fused with candidate discovery so each
        # row's tail is classified once for all candidate items.
        max_x, max_y = x[-1], y[-1]
        lo = max_x if max_x < max_y else max_y
        side = 1 if left else 2
        index = self.index
        vetoed: dict[int, bool] = {}
        groups: dict[int, list[Row]] = {}
        for row in rows:
            seq = index[row.sid]
            sid, iutil, lutil, rutil, lrutil, x_end, y_start = row
            tail = []
            for j, pj, uj in seq.order[bisect_right(seq.ids, lo):]:
                old = (pj < y_start and j > max_x) + 2 * (pj > x_end and j > max_y)
                if old:
                    tail.append((j, pj, uj, old))
            for j, pj, uj, old in tail:
                if not old & side:
                    continue
                bad = vetoed.get(j)
                if bad is None:
                    bad = vetoed[j] = self._veto(j, x, y, left)
                if bad:
                    continue
                if left:
                    nx_end, ny_start, nmax_x, nmax_y = (pj if pj > x_end else x_end), y_start, j, max_y
                else:
                    nx_end, ny_start, nmax_x, nmax_y = x_end, (pj if pj < y_start else y_start), max_x, j
                sums = [0, lutil, rutil, lrutil]
                for k, pk, uk, was in tail:
                    if k == j:
                        now = 0
                    else:
                        now = (pk < ny_start and k > nmax_x) + 2 * (pk > nx_end and k > nmax_y)
                    if now != was:
                        sums[was] -= uk
                        sums[now] += uk
                new_row = Row(sid, iutil + uj, sums[1], sums[2], sums[3], nx_end, ny_start)
                group = groups.get(j)
                if group is None:
                    groups[j] = [new_row]
                else:
                    group.append(new_row)
        tel = self.tel
        tel.pruned_by_strategy[4 if left else 5] += sum(vetoed.values())
        tel.candidates_generated += len(groups)
        tel.tables_built += len(groups)
        for j in sorted(groups):
            if left:
                self._consider(x + (j,), y, groups[j], x_bits & self.item_bits[j], False)
            else:
                self._consider(x, y + (j,), groups[j], x_bits, True)


_worker_state = None


def _worker_init(state):
    global _worker_state
    _worker_state = state


def _worker_run(starts):
    index, n, item_bits, rcm, limits, strategies = _worker_state
    search = _Search(index, n, item_bits, rcm, limits, strategies)
    for x, y, rows in starts:
        search.start(x, y, rows)
    return search.found, search.tel


def mine(
    db: SequenceDatabase,
    params: MiningParams,
    *,
    threads: int = 1,
    observer: Observer | None = None,
    track_memory: bool = False,
) -> RhusrSet:
    """Mine every rare high-utility sequential rule of ``db``.

    ``observer`` is called with every utility table the search builds
    (single-threaded only).  ``track_memory`` measures peak python heap
    use with tracemalloc, which slows mining down noticeably.

    Preprocessing that does not depend on the thresholds (item statistics,
    the sequence index, 1*1 rules) is cached per database object, so
    sweeps over one database only pay for it once.  Runs with
    ``track_memory`` skip the cache.
    """
    if len(db) == 0:
        raise ValueError("empty database")
    if threads < 1:
        raise ValueError("threads must be at least 1")
    if observer is not None and threads > 1:
        raise ValueError("an observer needs single-threaded mining")
    started = time.perf_counter()
    own_trace = track_memory and not tracemalloc.is_tracing()
    if own_trace:
        tracemalloc.start()
    elif track_memory:
        tracemalloc.reset_peak()
    try:
        # a measured run pays for its own preprocessing, so peaks stay comparable
        prep = _Prepared(db) if track_memory else _prepared(db)
        result = _mine(db, params, threads, observer, prep)
    finally:
        if track_memory:
            result_peak = tracemalloc.get_traced_memory()[1]
        if own_trace:
            tracemalloc.stop()
    if track_memory:
        result.telemetry.peak_mem_bytes = result_peak
    result.telemetry.runtime_ms = (time.perf_counter() - started) * 1000.0
    return result


def _mine(db, params, threads, observer, prep):
    n = len(db)
    limits = params.limits(n)
    tel = Telemetry()
    stats = prep.stats
    keep = frozenset(prune_items_by_seu(stats, params, n))
    tel.pruned_by_strategy[1] = len(stats) - len(keep)
    if not keep:
        return RhusrSet([], tel)
    index, initial, rcm, initial_rows = prep.view(keep)
    item_bits = {i: stats[i].sids.bits for i in keep}
    strategies = params.strategies
    starts = []
    for init, rows in zip(initial, initial_rows):
        if 2 in strategies and (init.seu < limits.minutil or init.support_count < limits.minsup_count):
            tel.pruned_by_strategy[2] += 1
            continue
        starts.append((init.rule.antecedent, init.rule.consequent, rows))

    if threads == 1 or len(starts) < 2:
        search = _Search(index, n, item_bits, rcm, limits, strategies, observer)
        for x, y, rows in starts:
            search.start(x, y, rows)
        found = search.found
        tel.merge(search.tel)
    else:
        chunks = [starts[k::threads] for k in range(threads)]
        found = []
        state = (index, n, item_bits, rcm, limits, strategies)
        with ProcessPoolExecutor(max_workers=threads, initializer=_worker_init, initargs=(state,)) as pool:
            for part, part_tel in pool.map(_worker_run, chunks):
                found.extend(part)
                tel.merge(part_tel)
    found.sort(key=lambda rm: (rm[0].antecedent, rm[0].consequent))
    tel.rules_found = len(found)
    return RhusrSet(found, tel)
