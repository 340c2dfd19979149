"""How much each pruning strategy saves on a synthetic database.

Turning a strategy off never changes the rules found; it only lets the
search build more utility tables.  Pass a smaller size for a quick look,
e.g. ``python3 demos/03_strategy_ablation.py 1000``.
"""

import sys

from rhusr import MiningParams, mine, synth

n_seqs = int(sys.argv[1]) if len(sys.argv) > 1 else 5000
db = synth.generate(200, n_seqs, seed=7)
scale = n_seqs / 5000
sweep = [int(mu * scale) for mu in (15000, 30000, 60000, 120000)]
profiles = {"full": (), "no item pruning (S1)": (1,), "no 1*1 pruning (S2)": (2,),
            "no bounds (S6, S7)": (6, 7)}

print(f"{len(db)} sequences, 200 items; minconf 0.1, minsup 10c, maxsup 0.05\n")
print(f"{'profile':<22}" + "".join(f"{mu:>12}" for mu in sweep))
counts = {}
for name, off in profiles.items():
    cells = []
    for mu in sweep:
        res = mine(db, MiningParams(mu, "0.1", "10c", "0.05").without(*off))
        counts.setdefault(mu, set()).add(len(res))
        cells.append(f"{res.telemetry.candidates_generated:>7}/{res.telemetry.runtime_ms / 1000:>4.1f}s")
    print(f"{name:<22}" + "".join(f"{c:>12}" for c in cells))
print("\ncells are candidates built / runtime")
print("rules per minutil:", {mu: c.pop() if len(c) == 1 else c for mu, c in counts.items()})
