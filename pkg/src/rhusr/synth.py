"""Seeded synthetic q-sequence databases.

Randomness comes only from ``random.Random(seed).random()`` (MT19937, whose
float stream python guarantees stable for a given integer seed).  Every
draw is mapped to integers with multiplication and ``int()``, so output is
bit-exact across platforms.

* item popularity: Zipf-like, weight of item ``k`` is ``1 / (k + 1)``
* quantities: uniform in ``[1, 5]``
* profits: log-skewed in ``[1, 999]`` (uniform decade, then uniform inside it)
* itemsets per sequence: uniform in ``[1, 2 * mean_itemsets - 1]``
* items per itemset: uniform in ``[1, 2 * mean_itemset_size - 1]``
"""

from __future__ import annotations

import random
from bisect import bisect_right
from pathlib import Path

from .seqdb import QItem, QSequence, SequenceDatabase, dumps


def _uniform_int(u, lo: int, hi: int) -> int:
    return lo + int(u() * (hi - lo + 1))


def generate(
    n_items: int,
    n_seqs: int,
    seed: int,
    mean_itemsets: float = 4.0,
    mean_itemset_size: float = 1.5,
    max_itemsets: int | None = None,
) -> SequenceDatabase:
    if n_items < 1 or n_seqs < 1:
        raise ValueError("need at least one item and one sequence")
    rng = random.Random(seed)
    u = rng.random
    profits = {}
    for k in range(n_items):
        decade = 10 ** int(u() * 3)
        profits[k] = decade + int(u() * 9 * decade)
    cum = []
    total = 0.0
    for k in range(n_items):
        total += 1.0 / (k + 1)
        cum.append(total)

    def draw_item():
        return min(bisect_right(cum, u() * total), n_items - 1)

    top_sets = max(1, int(2 * mean_itemsets - 1))
    if max_itemsets is not None:
        top_sets = min(top_sets, max_itemsets)
    top_size = max(1, int(2 * mean_itemset_size - 1))
    sequences = []
    for sid in range(n_seqs):
        used: set[int] = set()
        itemsets = []
        for _ in range(_uniform_int(u, 1, top_sets)):
            if len(used) == n_items:
                break
            size = min(_uniform_int(u, 1, top_size), n_items - len(used))
            chosen = []
            while len(chosen) < size:
                item = draw_item()
                if item in used:
                    # popular items run out fast; fall back to the next free id
                    while item in used:
                        item = (item + 1) % n_items
                used.add(item)
                chosen.append(QItem(item, _uniform_int(u, 1, 5)))
            itemsets.append(tuple(sorted(chosen)))
        sequences.append(QSequence(sid, tuple(itemsets)))
    names = tuple(f"i{k}" for k in range(n_items))
    return SequenceDatabase(tuple(sequences), profits, names)


def write(db: SequenceDatabase, prefix: str | Path) -> tuple[Path, Path]:
    """Write ``<prefix>.db.txt`` and ``<prefix>.profits.txt``."""
    prefix = Path(prefix)
    db_path = prefix.with_name(prefix.name + ".db.txt")
    profit_path = prefix.with_name(prefix.name + ".profits.txt")
    text, profits = dumps(db)
    db_path.write_text(text, encoding="utf-8")
    profit_path.write_text(profits, encoding="utf-8")
    return db_path, profit_path
