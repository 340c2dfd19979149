"""Command line entry point: ``rhusr {mine,oracle,detect,run,gen,bench}``.

Exit codes: 0 success, 1 unreadable or malformed input, 2 invalid
parameters.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import synth
from .miner import MiningParams, RhusrSet, mine, parse_threshold
from .oracle import oracle_mine
from .outlier import OutlierParams, detect
from .rules import SequentialRule, occurs_in
from .seqdb import ParseError, SequenceDatabase, parse_database

PROFILES = {
    "full": frozenset(),
    "no-s1": frozenset({1}),
    "no-s2": frozenset({2}),
}


class InputError(Exception):
    """Bad input file contents (exit code 1)."""


def _load_db(args) -> SequenceDatabase:
    try:
        with open(args.db, encoding="utf-8") as f, open(args.profits, encoding="utf-8") as g:
            return parse_database(f, g)
    except OSError as exc:
        raise InputError(f"cannot read input: {exc}") from None
    except ParseError as exc:
        raise InputError(str(exc)) from None
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _params(args, minutil=None) -> MiningParams:
    return MiningParams(
        minutil=args.minutil if minutil is None else minutil,
        minconf=args.minconf,
        minsup=args.minsup,
        maxsup=args.maxsup,
        maxsup_inclusive=args.maxsup_inclusive,
        strategies=frozenset(range(1, 8)) - set(args.disable_strategy or ()),
    )


def rules_to_jsonl(result: RhusrSet, names) -> str:
    out = io.StringIO()
    for rule, m in result:
        out.write(json.dumps({
            "antecedent": [names[i] for i in rule.antecedent],
            "consequent": [names[i] for i in rule.consequent],
            "support": float(m.support),
            "support_count": m.support_count,
            "confidence": float(m.confidence),
            "utility": m.utility,
        }) + "\n")
    return out.getvalue()


def read_rules(text: str, db: SequenceDatabase) -> list[SequentialRule]:
    """Parse a JSON-lines rule file and check it against ``db``."""
    ids = {name: k for k, name in enumerate(db.names)}
    rules = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
            rule = SequentialRule(
                tuple(ids[n] for n in doc["antecedent"]),
                tuple(ids[n] for n in doc["consequent"]),
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise InputError(f"rule file line {lineno}: {exc!r}") from None
        count = sum(1 for s in db if occurs_in(rule, s) is not None)
        if "support_count" in doc and doc["support_count"] != count:
            raise InputError(
                f"rule file line {lineno}: support_count {doc['support_count']} "
                f"does not match the database ({count})"
            )
        rules.append(rule)
    return rules


def _write(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _report_text(report, fmt: str, names) -> str:
    return report.to_json(names) + "\n" if fmt == "json" else report.to_tsv()


# -- subcommands -------------------------------------------------------------------

def cmd_mine(args) -> int:
    params = _params(args)
    db = _load_db(args)
    params.limits(len(db))
    result = mine(db, params, threads=args.threads)
    _write(args.out, rules_to_jsonl(result, db.names))
    if args.telemetry:
        with open(args.telemetry, "a", encoding="utf-8") as f:
            f.write(result.telemetry.to_json() + "\n")
    return 0


def cmd_oracle(args) -> int:
    params = _params(args)
    db = _load_db(args)
    params.limits(len(db))
    result = oracle_mine(db, params)
    _write(args.out, rules_to_jsonl(result, db.names))
    return 0


def cmd_detect(args) -> int:
    outlier = OutlierParams(args.v, require_rule=not args.literal_alg1)
    maxsup = parse_threshold(args.maxsup)
    db = _load_db(args)
    try:
        text = Path(args.rules).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read rules: {exc}") from None
    rules = read_rules(text, db)
    report = detect(db, rules, outlier, maxsup)
    _write(args.out, _report_text(report, args.format, db.names))
    return 0


def cmd_run(args) -> int:
    params = _params(args)
    outlier = OutlierParams(args.v, require_rule=not args.literal_alg1)
    db = _load_db(args)
    params.limits(len(db))
    result = mine(db, params, threads=args.threads)
    if args.out_rules:
        _write(args.out_rules, rules_to_jsonl(result, db.names))
    report = detect(db, result, outlier, params.maxsup)
    _write(args.out_report, _report_text(report, args.format, db.names))
    if args.telemetry:
        with open(args.telemetry, "a", encoding="utf-8") as f:
            f.write(result.telemetry.to_json() + "\n")
    return 0


def cmd_gen(args) -> int:
    db = synth.generate(
        args.items, args.seqs, args.seed,
        mean_itemsets=args.mean_itemsets,
        mean_itemset_size=args.mean_itemset_size,
    )
    db_path, profit_path = synth.write(db, args.out_prefix)
    print(f"wrote {db_path} and {profit_path} ({len(db)} sequences, {args.items} items)", file=sys.stderr)
    return 0


def bench_rows(db, args, sweep, profiles) -> list[dict]:
    rows = []
    for profile in profiles:
        for minutil in sweep:
            params = _params(args, minutil).without(*PROFILES[profile])
            result = mine(db, params, threads=args.threads, track_memory=not args.no_memory)
            tel = result.telemetry
            rows.append({
                "profile": profile,
                "minutil": minutil,
                "rules": tel.rules_found,
                "candidates": tel.candidates_generated,
                "runtime_ms": f"{tel.runtime_ms:.1f}",
                "peak_mem": tel.peak_mem_bytes,
            })
    return rows


def cmd_bench(args) -> int:
    try:
        sweep = [int(s) for s in args.sweep.split(",") if s.strip()]
    except ValueError:
        raise ValueError(f"--sweep must be comma-separated integers, got {args.sweep!r}") from None
    if not sweep:
        raise ValueError("--sweep needs at least one threshold")
    profiles = [p.strip() for p in args.profiles.split(",")]
    for p in profiles:
        if p not in PROFILES:
            raise ValueError(f"unknown profile {p!r}; choose from {', '.join(PROFILES)}")
    for minutil in sweep:
        _params(args, minutil)
    db = _load_db(args)
    rows = bench_rows(db, args, sweep, profiles)
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    _write(args.out, out.getvalue())
    return 0


# -- parser -----------------------------------------------------------------------

def _add_inputs(p):
    p.add_argument("--db", required=True, help="sequence database file")
    p.add_argument("--profits", required=True, help="profit table file")


def _add_mining(p):
    p.add_argument("--minutil", type=int, required=True)
    p.add_argument("--minconf", default="0", help="fraction, e.g. 0.7")
    p.add_argument("--minsup", default="0", help="fraction (0.25) or count (2c)")
    p.add_argument("--maxsup", default="1", help="fraction (0.9) or count (8c)")
    p.add_argument("--maxsup-inclusive", action="store_true",
                   help="admit rules whose support equals maxsup")
    p.add_argument("--disable-strategy", type=int, action="append", choices=range(1, 8),
                   metavar="K", help="turn pruning strategy K (1-7) off; repeatable")
    p.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rhusr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mine", help="mine rare high-utility sequential rules")
    _add_inputs(p)
    _add_mining(p)
    p.add_argument("--out", default="-", help="JSON-lines rule file (default stdout)")
    p.add_argument("--telemetry", help="append one JSON telemetry line to this file")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("oracle", help="exhaustive reference mining (small alphabets only)")
    _add_inputs(p)
    _add_mining(p)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("detect", help="score sequences against a rule file")
    _add_inputs(p)
    p.add_argument("--rules", required=True, help="JSON-lines rule file from 'mine'")
    p.add_argument("--v", required=True, help="outlier threshold in [0, 1]")
    p.add_argument("--maxsup", default="1", help="maxsup used when mining")
    p.add_argument("--literal-alg1", action="store_true",
                   help="also flag sequences that contain no rule")
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("run", help="mine then detect in one go")
    _add_inputs(p)
    _add_mining(p)
    p.add_argument("--v", required=True)
    p.add_argument("--literal-alg1", action="store_true")
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.add_argument("--out-rules")
    p.add_argument("--out-report", default="-")
    p.add_argument("--telemetry")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("gen", help="write a seeded synthetic database")
    p.add_argument("--items", type=int, required=True)
    p.add_argument("--seqs", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--mean-itemsets", type=float, default=4.0)
    p.add_argument("--mean-itemset-size", type=float, default=1.5)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="minutil sweep over strategy profiles, CSV out")
    _add_inputs(p)
    p.add_argument("--sweep", required=True, help="comma-separated minutil values")
    p.add_argument("--minconf", default="0")
    p.add_argument("--minsup", default="0")
    p.add_argument("--maxsup", default="1")
    p.add_argument("--maxsup-inclusive", action="store_true")
    p.add_argument("--disable-strategy", type=int, action="append", choices=range(1, 8), metavar="K")
    p.add_argument("--profiles", default="full,no-s1,no-s2")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--no-memory", action="store_true", help="skip tracemalloc peak tracking")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "threads", 1) < 1:
            raise ValueError("--threads must be at least 1")
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
