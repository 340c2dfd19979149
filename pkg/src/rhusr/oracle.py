"""Exhaustive reference miner.

Every split of the alphabet into (antecedent, consequent, unused) is tried
and checked against every cut point of every sequence.  No pruning, no
utility tables; only meant for small alphabets.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .miner import Count, MiningParams, RhusrSet, Telemetry
from .outlier import OutlierParams, OutlierReport, SequenceScore
from .rules import RuleMeasures, SequentialRule
from .seqdb import SequenceDatabase, SidSet

MAX_ALPHABET = 16


class _Cuts:
    """Per sequence: item mask, and (prefix mask, suffix mask) per cut."""

    def __init__(self, db: SequenceDatabase, bit: dict[int, int]):
        self.masks = []
        self.cuts = []
        for seq in db:
            sets = [sum(bit[qi.item] for qi in itemset) for itemset in seq.itemsets]
            self.masks.append(sum(sets))
            cuts = []
            for p in range(1, len(sets)):
                cuts.append((sum(sets[:p]), sum(sets[p:])))
            self.cuts.append(cuts)


def _occurs(xm: int, ym: int, cuts) -> bool:
    for pre, suf in cuts:
        if xm & pre == xm and ym & suf == ym:
            return True
    return False


def enumerate_rules(db: SequenceDatabase, size_cap: int | None = None) -> list[tuple[SequentialRule, RuleMeasures]]:
    """Every rule occurring in at least one sequence, with exact measures.

    ``size_cap`` bounds ``|X| * |Y|``; ``None`` means no bound.
    """
    alphabet = db.items
    if len(alphabet) > MAX_ALPHABET:
        raise ValueError(f"alphabet of {len(alphabet)} items is too large for exhaustive enumeration")
    bit = {item: 1 << k for k, item in enumerate(alphabet)}
    util = [{qi.item: qi.quantity * db.profits[qi.item] for its in seq.itemsets for qi in its} for seq in db]
    cuts = _Cuts(db, bit)
    n = len(db)
    out = []
    for labels in itertools.product((0, 1, 2), repeat=len(alphabet)):
        x = tuple(i for i, lab in zip(alphabet, labels) if lab == 1)
        y = tuple(i for i, lab in zip(alphabet, labels) if lab == 2)
        if not x or not y:
            continue
        if size_cap is not None and len(x) * len(y) > size_cap:
            continue
        xm = sum(bit[i] for i in x)
        ym = sum(bit[i] for i in y)
        hits = [sid for sid in range(n) if _occurs(xm, ym, cuts.cuts[sid])]
        if not hits:
            continue
        x_count = sum(1 for m in cuts.masks if m & xm == xm)
        utility = sum(util[sid][i] for sid in hits for i in x + y)
        out.append((SequentialRule(x, y), RuleMeasures(
            len(hits), Fraction(len(hits), n), Fraction(len(hits), x_count), utility,
            SidSet.from_sids(hits, n), x_count,
        )))
    out.sort(key=lambda rm: (rm[0].antecedent, rm[0].consequent))
    return out


def _is_rhusr(m: RuleMeasures, params: MiningParams, n: int) -> bool:
    sup = m.support
    if isinstance(params.minsup, Count):
        if m.support_count < params.minsup.value:
            return False
    elif sup < params.minsup:
        return False
    maxsup = Fraction(params.maxsup.value, n) if isinstance(params.maxsup, Count) else params.maxsup
    if params.maxsup_inclusive:
        if sup > maxsup:
            return False
    elif sup >= maxsup:
        return False
    return m.utility >= params.minutil and m.confidence >= params.minconf


def oracle_mine(db: SequenceDatabase, params: MiningParams, universe=None) -> RhusrSet:
    """Filter the full rule universe by the rare high-utility rule test.

    Pass a precomputed ``universe`` to reuse one enumeration across
    several parameter settings.
    """
    if universe is None:
        universe = enumerate_rules(db)
    n = len(db)
    kept = [(r, m) for r, m in universe if _is_rhusr(m, params, n)]
    tel = Telemetry(rules_found=len(kept), candidates_generated=len(universe), tables_built=0)
    return RhusrSet(kept, tel)


def oracle_detect(
    db: SequenceDatabase,
    params: MiningParams,
    outlier: OutlierParams,
    rhusrs: RhusrSet | None = None,
) -> OutlierReport:
    """Outlier scores by direct formula evaluation on the oracle's rules."""
    if rhusrs is None:
        rhusrs = oracle_mine(db, params)
    n = len(db)
    maxsup = Fraction(params.maxsup.value, n) if isinstance(params.maxsup, Count) else params.maxsup
    rules = list(rhusrs)
    k = len(rules)
    dfs = [(r, (maxsup - m.support) / k) for r, m in rules]
    scores = []
    for sid in range(n):
        inside = [(r, df) for (r, m), (_, df) in zip(rules, dfs) if sid in m.sids]
        count = len(inside)
        dev = sum((df for _, df in inside), Fraction(0))
        swf = Fraction(count, k) if k else Fraction(0)
        of = 1 - swf * dev
        flagged = of >= outlier.v
        if outlier.require_rule and count == 0:
            flagged = False
        scores.append(SequenceScore(sid, count, dev, swf, of, flagged))
    return OutlierReport(tuple(scores), tuple(dfs))
