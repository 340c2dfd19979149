"""Rule-based outlier scoring of sequences.

Each mined rule gets a deviation factor ``(maxsup - sup(r)) / |rules|``.
A sequence's weighting factor is the share of rules it contains, and its
outlier factor is ``1 - swf * (sum of deviation factors of its rules)``.
A sequence is flagged when the outlier factor reaches the threshold ``v``.

All arithmetic is exact (``Fraction``); rendering rounds to 4 places.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .miner import Count, parse_threshold
from .rules import RuleMeasures, SequentialRule, occurs_in
from .seqdb import SequenceDatabase

REPORT_LABEL = "UOSR"


@dataclass(frozen=True)
class OutlierParams:
    v: Fraction | float | str = Fraction(7, 10)
    require_rule: bool = True

    def __post_init__(self):
        v = parse_threshold(self.v)
        if isinstance(v, Count) or not 0 <= v <= 1:
            raise ValueError(f"outlier threshold must be a fraction in [0, 1], got {self.v!r}")
        object.__setattr__(self, "v", v)


@dataclass(frozen=True)
class SequenceScore:
    sid: int
    rule_count: int
    deviation_sum: Fraction
    swf: Fraction
    of: Fraction
    is_outlier: bool


@dataclass(frozen=True)
class OutlierReport:
    scores: tuple[SequenceScore, ...]
    deviation: tuple[tuple[SequentialRule, Fraction], ...]

    @property
    def outliers(self) -> list[int]:
        return [s.sid for s in self.scores if s.is_outlier]

    def to_tsv(self) -> str:
        lines = ["sid\trule_count\tswf\tof\toutlier"]
        for s in self.scores:
            lines.append(f"{s.sid}\t{s.rule_count}\t{fmt(s.swf)}\t{fmt(s.of)}\t{int(s.is_outlier)}")
        return "\n".join(lines) + "\n"

    def to_json(self, names: tuple[str, ...] | None = None) -> str:
        doc = {
            "label": REPORT_LABEL,
            "rules": [
                {
                    "antecedent": _names(r.antecedent, names),
                    "consequent": _names(r.consequent, names),
                    "df": fmt(df),
                    "df_exact": str(df),
                }
                for r, df in self.deviation
            ],
            "sequences": [
                {
                    "sid": s.sid,
                    "rule_count": s.rule_count,
                    "deviation_sum": fmt(s.deviation_sum),
                    "swf": fmt(s.swf),
                    "of": fmt(s.of),
                    "outlier": s.is_outlier,
                }
                for s in self.scores
            ],
        }
        return json.dumps(doc, indent=1)


def fmt(x: Fraction) -> str:
    return f"{float(x):.4f}"


def _names(items, names):
    return [names[i] if names is not None else i for i in items]


def deviation_factor(support: Fraction, maxsup: Fraction, rule_count: int) -> Fraction:
    if rule_count < 1:
        raise ValueError("deviation factor needs at least one rule")
    return (Fraction(maxsup) - Fraction(support)) / rule_count


def _rule_support(db: SequenceDatabase, rule: SequentialRule, m: RuleMeasures | None) -> Fraction:
    if m is not None:
        return Fraction(m.support_count, len(db))
    return Fraction(sum(1 for s in db if occurs_in(rule, s) is not None), len(db))


def detect(db: SequenceDatabase, rhusrs: Iterable, params: OutlierParams, maxsup) -> OutlierReport:
    """Score every sequence of ``db`` against the mined rules.

    ``rhusrs`` holds ``(rule, measures)`` pairs (a ``RhusrSet`` works) or
    bare rules, whose support is then counted in ``db``.  ``maxsup`` is a
    fraction or a :class:`Count`.  A sequence contains a rule when the rule
    occurs in it.  With ``params.require_rule`` only sequences holding at
    least one rule can be flagged.
    """
    pairs = []
    for entry in rhusrs:
        if isinstance(entry, SequentialRule):
            pairs.append((entry, None))
        else:
            rule, m = entry
            pairs.append((rule, m))
    ms = parse_threshold(maxsup)
    if isinstance(ms, Count):
        ms = Fraction(ms.value, len(db))
    k = len(pairs)
    deviation = tuple(
        (rule, deviation_factor(_rule_support(db, rule, m), ms, k)) for rule, m in pairs
    )
    scores = []
    for seq in db:
        count = 0
        dev = Fraction(0)
        for rule, df in deviation:
            if occurs_in(rule, seq) is not None:
                count += 1
                dev += df
        swf = Fraction(count, k) if k else Fraction(0)
        of = 1 - swf * dev
        flagged = of >= params.v and (count >= 1 or not params.require_rule)
        scores.append(SequenceScore(seq.sid, count, dev, swf, of, flagged))
    return OutlierReport(tuple(scores), deviation)
