import io

import pytest
from hypothesis import given, strategies as st

from rhusr import (
    ParseError,
    SequenceDatabase,
    SidSet,
    compute_item_stats,
    item_utility,
    parse_database,
    project_database,
    sequence_utility,
    synth,
)
from rhusr.seqdb import dumps

from conftest import ids

PROFITS = "a 1\nb 2\nc 5\n"


def test_running_example_shape(printed_db):
    assert len(printed_db) == 4
    assert printed_db.names == ("a", "b", "c", "d", "e", "f", "g")
    assert [len(s) for s in printed_db] == [5, 4, 4, 2]
    s1 = printed_db[0]
    a, c = ids(printed_db, "a", "c")
    assert s1.positions[a] == 0 and s1.positions[c] == 1
    assert item_utility(c, s1, printed_db.profits) == 10


def test_sequence_utilities(printed_db, g1_db):
    assert [sequence_utility(s, g1_db.profits) for s in g1_db] == [27, 40, 15, 16]
    # the printed g:3 adds 2 to the last sequence
    assert sequence_utility(printed_db[3], printed_db.profits) == 18


def test_item_stats(printed_db, g1_db):
    stats = compute_item_stats(printed_db)
    a, e, d = ids(printed_db, "a", "e", "d")
    assert stats[a].seu == 100
    assert compute_item_stats(g1_db)[a].seu == 98
    assert str(stats[e].sids) == "1110"
    assert str(stats[a].sids) == "1111"
    assert stats[d].support_count == 1 and stats[d].seu == 40


@pytest.mark.parametrize("text, fragment", [
    ("a:1 b:2 -1 c:1\n", "not terminated"),
    ("a:1 -1 -1 b:1 -2\n", "empty itemset"),
    ("a:1 -1 a:2 -2\n", "twice"),
    ("a:0 -2\n", "positive"),
    ("a:x -2\n", "not an integer"),
    ("z:1 -2\n", "no profit entry"),
    ("a1 -2\n", "item:quantity"),
    ("a:1 -2 b:1\n", "after end"),
    ("# nothing here\n", "no sequences"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_database(text, PROFITS)


def test_parse_error_carries_line():
    with pytest.raises(ParseError) as info:
        parse_database("a:1 -2\n\nb:1 -1 b:1 -2\n", PROFITS)
    assert info.value.line == 3


@pytest.mark.parametrize("profits, fragment", [
    ("a 0\n", "positive"),
    ("a 1\na 2\n", "duplicate"),
    ("a\n", "name profit"),
    ("", "no profit"),
])
def test_profit_errors(profits, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_database("a:1 -2\n", profits)


def test_comments_and_blank_lines():
    db = parse_database("# header\n\na:1 -1 b:2 -2\n", io.StringIO(PROFITS))
    assert len(db) == 1 and db[0].items == [0, 1]


def test_round_trip(printed_db):
    text, profits = dumps(printed_db)
    again = parse_database(text, profits)
    assert again == printed_db


@given(st.integers(0, 10_000))
def test_round_trip_synthetic(seed):
    db = synth.generate(1 + seed % 9, 1 + seed % 5, seed)
    text, profits = dumps(db)
    assert parse_database(text, profits) == db


def test_from_lists():
    db = SequenceDatabase.from_lists([[[("x", 2)], [("y", 1), ("z", 3)]]], {"x": 4, "y": 1, "z": 2})
    assert sequence_utility(db[0], db.profits) == 8 + 1 + 6


def test_projection_keeps_shells(printed_db):
    d = printed_db.item_id("d")
    proj = project_database(printed_db, [d])
    assert len(proj) == 4
    assert [len(s) for s in proj] == [0, 1, 0, 0]
    with pytest.raises(ValueError):
        project_database(printed_db, [])


@given(st.sets(st.integers(0, 40)), st.sets(st.integers(0, 40)))
def test_sidset_matches_python_sets(a, b):
    x, y = SidSet.from_sids(a, 41), SidSet.from_sids(b, 41)
    assert set(x & y) == a & b
    assert set(x | y) == a | b
    assert len(x) == len(a)
    assert all((k in x) == (k in a) for k in range(41))


def test_sidset_rendering_and_checks():
    s = SidSet.from_sids([0, 2], 4)
    assert str(s) == "1010"
    assert SidSet.full(3) == SidSet.from_sids(range(3), 3)
    with pytest.raises(ValueError):
        SidSet.from_sids([5], 4)
    with pytest.raises(ValueError):
        s & SidSet.full(5)
