"""Score sequences by how many rare rules they hold.

Every rule gets a deviation factor, (maxsup - support) / number of rules.
A sequence's outlier factor is 1 - SWF * A, where SWF is the share of all
rules it contains and A the sum of their deviation factors.  Sequences at
or above the threshold v are flagged.
"""

from importlib.resources import files

from rhusr import MiningParams, OutlierParams, detect, mine, parse_database, synth

data = files("rhusr") / "data"
with open(data / "running_example_g1.txt") as f, open(data / "running_example_profits.txt") as g:
    db = parse_database(f, g)

params = MiningParams(41, "0.7", "0.25", 1)
rules = mine(db, params)
report = detect(db, rules, OutlierParams("0.7"), params.maxsup)

print("Deviation factor per rule:")
for rule, df in report.deviation:
    print(f"  {rule.render(db.names):<16} {df} (= {float(df):.4f})")
print()
print(report.to_tsv(), end="")
print("flagged:", [f"S{sid + 1}" for sid in report.outliers])

# S3 holds none of the rules.  Taken literally the score formula gives it
# OF = 1; by default such sequences are not flagged, since there is no rule
# evidence either way.
literal = detect(db, rules, OutlierParams("0.7", require_rule=False), params.maxsup)
print("flagged when rule-free sequences count too:", [f"S{sid + 1}" for sid in literal.outliers])

# On a bigger database the picture changes.  With hundreds of rules each
# deviation factor is tiny and so is every sequence's share of the rules, so
# OF sits just below 1 and any v short of that flags every sequence holding
# a rule.  The ordering is still informative: the lowest OF marks the
# sequences that hold the most (and rarest) rules.
big = synth.generate(60, 800, seed=3)
params = MiningParams(20000, "0.2", "4c", "0.05")
rules = mine(big, params)
report = detect(big, rules, OutlierParams("0.9"), params.maxsup)
holding = [s for s in report.scores if s.rule_count]
print(f"\nsynthetic: {len(rules)} rules, {len(holding)} of {len(big)} sequences hold at least one,"
      f" {len(report.outliers)} flagged at v=0.9")
print("lowest outlier factors:")
for s in sorted(holding, key=lambda s: s.of)[:5]:
    print(f"  S{s.sid + 1}: rules={s.rule_count} OF={float(s.of):.6f}")
