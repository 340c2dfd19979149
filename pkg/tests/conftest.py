import sys
from importlib.resources import files

import pytest

from rhusr import parse_database, synth

DATA = files("rhusr") / "data"


def load(name):
    with open(DATA / name, encoding="utf-8") as f, open(DATA / "running_example_profits.txt", encoding="utf-8") as g:
        return parse_database(f, g)


@pytest.fixture(scope="session")
def printed_db():
    """The running example exactly as printed (g:3 in the fourth sequence)."""
    return load("running_example.txt")


@pytest.fixture(scope="session")
def g1_db():
    """The running example with g:1 in the fourth sequence, matching its SU column."""
    return load("running_example_g1.txt")


def ids(db, *names):
    return tuple(db.item_id(n) for n in names)


def small_db(seed):
    """Corpus member: 3-6 items, 2-8 sequences, at most 5 itemsets each."""
    return synth.generate(3 + seed % 4, 2 + (seed // 4) % 7, seed, mean_itemsets=3, max_itemsets=5)


GRID = [
    dict(minutil=0, minconf=0, minsup=0, maxsup=1),
    dict(minutil=20, minconf="0.5", minsup="0.25", maxsup="0.75"),
    dict(minutil=50, minconf="0.3", minsup="2c", maxsup=1, maxsup_inclusive=True),
    dict(minutil=100, minconf=0, minsup="0.1", maxsup="0.5"),
]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(lines):
        terminalreporter.write_line(lines[k])
