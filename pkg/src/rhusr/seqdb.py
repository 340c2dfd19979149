"""Quantity-annotated sequence databases.

A database is a list of q-sequences (ordered itemsets whose items carry a
purchase quantity) plus one profit table shared by every sequence.  Items
are dense integer ids; their total order is the id order.  Text item names
are interned in the order they first appear in the profit file.

Text format, one sequence per line::

    a:1 b:2 -1 c:2 -1 f:3 -1 g:2 -1 e:1 -2

Itemsets are separated by ``-1`` and the line ends with ``-2``.  The
profit file holds one ``name profit`` pair per line.  Lines starting with
``#`` are comments in both files.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, TextIO


class ParseError(ValueError):
    """Raised for malformed database or profit input."""

    def __init__(self, message: str, line: int | None = None, source: str = "database"):
        self.line = line
        self.source = source
        where = f"{source} line {line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


class QItem(NamedTuple):
    item: int
    quantity: int


@dataclass(frozen=True)
class QSequence:
    """One q-sequence: itemsets of ``QItem`` in temporal order.

    An empty ``itemsets`` tuple only arises from :func:`project_database`,
    which keeps emptied sequences as shells so sids stay stable.
    """

    sid: int
    itemsets: tuple[tuple[QItem, ...], ...]
    positions: dict[int, int] = field(init=False, repr=False, compare=False)
    quantities: dict[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        positions = {}
        quantities = {}
        for pos, itemset in enumerate(self.itemsets):
            if not itemset:
                raise ValueError(f"sequence {self.sid}: empty itemset at position {pos}")
            prev = -1
            for qi in itemset:
                if qi.item <= prev:
                    raise ValueError(f"sequence {self.sid}: itemset {pos} not strictly sorted")
                prev = qi.item
                if qi.quantity < 1:
                    raise ValueError(f"sequence {self.sid}: non-positive quantity for item {qi.item}")
                if qi.item in positions:
                    raise ValueError(f"sequence {self.sid}: item {qi.item} occurs twice")
                positions[qi.item] = pos
                quantities[qi.item] = qi.quantity
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "quantities", quantities)

    def __contains__(self, item: int) -> bool:
        return item in self.positions

    def __len__(self) -> int:
        return len(self.itemsets)

    @property
    def items(self) -> list[int]:
        """Items of the sequence in id order."""
        return sorted(self.positions)


@dataclass(frozen=True)
class SequenceDatabase:
    sequences: tuple[QSequence, ...]
    profits: dict[int, int]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.sequences:
            raise ValueError("a sequence database needs at least one sequence")
        for sid, seq in enumerate(self.sequences):
            if seq.sid != sid:
                raise ValueError(f"sids must be dense and ordered, found {seq.sid} at {sid}")
            for item in seq.positions:
                p = self.profits.get(item)
                if p is None:
                    raise ValueError(f"item {self.name(item)} has no profit entry")
        for item, p in self.profits.items():
            if p <= 0:
                raise ValueError(f"item {self.name(item)} has non-positive profit {p}")
        if not self.names:
            top = max(self.profits, default=-1)
            object.__setattr__(self, "names", tuple(str(i) for i in range(top + 1)))

    def __len__(self) -> int:
        return len(self.sequences)

    def __iter__(self) -> Iterator[QSequence]:
        return iter(self.sequences)

    def __getitem__(self, sid: int) -> QSequence:
        return self.sequences[sid]

    def name(self, item: int) -> str:
        if 0 <= item < len(self.names):
            return self.names[item]
        return str(item)

    def item_id(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(name) from None

    @property
    def items(self) -> list[int]:
        """Distinct items occurring in at least one sequence, in id order."""
        seen = set()
        for seq in self.sequences:
            seen.update(seq.positions)
        return sorted(seen)

    @classmethod
    def from_lists(cls, sequences, profits: dict) -> "SequenceDatabase":
        """Build a database from nested python lists.

        ``sequences`` is a list of sequences, each a list of itemsets, each a
        list of ``(item, quantity)`` pairs.  Items may be strings (interned in
        ``profits`` key order) or ints (used as ids directly).
        """
        if all(isinstance(k, int) for k in profits):
            ids = {k: k for k in profits}
            top = max(profits, default=-1)
            names = tuple(str(i) for i in range(top + 1))
        else:
            ids = {k: n for n, k in enumerate(profits)}
            names = tuple(str(k) for k in profits)
        out = []
        for sid, seq in enumerate(sequences):
            itemsets = []
            for itemset in seq:
                try:
                    qis = sorted(QItem(ids[it], int(q)) for it, q in itemset)
                except KeyError as exc:
                    raise ValueError(f"item {exc.args[0]} has no profit entry") from None
                itemsets.append(tuple(qis))
            out.append(QSequence(sid, tuple(itemsets)))
        return cls(tuple(out), {ids[k]: int(v) for k, v in profits.items()}, names)


class SidSet:
    """Fixed-width bit vector over sequence ids.

    Bit ``p`` is set iff the subject occurs in sequence ``p``.  Backed by a
    python int, so intersection is a single ``&``.
    """

    __slots__ = ("bits", "width")

    def __init__(self, bits: int = 0, width: int = 0):
        if bits < 0 or bits >> width:
            raise ValueError("bits exceed the vector width")
        self.bits = bits
        self.width = width

    @classmethod
    def from_sids(cls, sids: Iterable[int], width: int) -> "SidSet":
        bits = 0
        for sid in sids:
            if not 0 <= sid < width:
                raise ValueError(f"sid {sid} outside width {width}")
            bits |= 1 << sid
        return cls(bits, width)

    @classmethod
    def full(cls, width: int) -> "SidSet":
        return cls((1 << width) - 1, width)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __iter__(self) -> Iterator[int]:
        bits = self.bits
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low

    def __contains__(self, sid: int) -> bool:
        return sid >= 0 and bool(self.bits >> sid & 1)

    def _check(self, other: "SidSet"):
        if self.width != other.width:
            raise ValueError(f"width mismatch: {self.width} vs {other.width}")

    def __and__(self, other: "SidSet") -> "SidSet":
        self._check(other)
        return SidSet(self.bits & other.bits, self.width)

    def __or__(self, other: "SidSet") -> "SidSet":
        self._check(other)
        return SidSet(self.bits | other.bits, self.width)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SidSet):
            return NotImplemented
        return self.bits == other.bits and self.width == other.width

    def __hash__(self) -> int:
        return hash((self.bits, self.width))

    def __str__(self) -> str:
        # sequence 0 first, matching how the vectors are usually written out
        return "".join("1" if self.bits >> p & 1 else "0" for p in range(self.width))

    def __repr__(self) -> str:
        return f"SidSet({str(self)!r})"


@dataclass(frozen=True)
class ItemStats:
    item: int
    seu: int
    support_count: int
    sids: SidSet


# -- utilities ---------------------------------------------------------------

def item_utility(item: int, seq: QSequence, profits: dict[int, int]) -> int:
    try:
        return seq.quantities[item] * profits[item]
    except KeyError:
        raise KeyError(f"item {item} does not occur in sequence {seq.sid}") from None


def sequence_utility(seq: QSequence, profits: dict[int, int]) -> int:
    return sum(q * profits[i] for i, q in seq.quantities.items())


def compute_item_stats(db: SequenceDatabase) -> dict[int, ItemStats]:
    """SEU, support count and sid bit vector of every item, in one scan."""
    n = len(db)
    seu: dict[int, int] = {}
    bits: dict[int, int] = {}
    for seq in db:
        su = sequence_utility(seq, db.profits)
        flag = 1 << seq.sid
        for item in seq.positions:
            seu[item] = seu.get(item, 0) + su
            bits[item] = bits.get(item, 0) | flag
    return {
        item: ItemStats(item, seu[item], bits[item].bit_count(), SidSet(bits[item], n))
        for item in sorted(seu)
    }


def project_database(db: SequenceDatabase, keep: Iterable[int]) -> SequenceDatabase:
    """Drop every item not in ``keep``.

    Emptied itemsets disappear; emptied sequences stay as shells so the sid
    numbering and ``len(db)`` are unchanged.
    """
    keep = set(keep)
    if not keep:
        raise ValueError("projection needs at least one item to keep")
    sequences = []
    for seq in db:
        itemsets = []
        for itemset in seq.itemsets:
            kept = tuple(qi for qi in itemset if qi.item in keep)
            if kept:
                itemsets.append(kept)
        sequences.append(QSequence(seq.sid, tuple(itemsets)))
    return SequenceDatabase(tuple(sequences), db.profits, db.names)


# -- text format ---------------------------------------------------------------

def _lines(stream: TextIO | str) -> Iterator[tuple[int, str]]:
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    for lineno, raw in enumerate(stream, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def parse_profits(stream: TextIO | str) -> dict[str, int]:
    """Read ``name profit`` lines into an ordered name -> profit dict."""
    profits: dict[str, int] = {}
    for lineno, line in _lines(stream):
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'name profit', got {line!r}", lineno, "profit")
        name, value = parts
        try:
            p = int(value)
        except ValueError:
            raise ParseError(f"profit of {name!r} is not an integer: {value!r}", lineno, "profit") from None
        if p <= 0:
            raise ParseError(f"profit of {name!r} must be positive, got {p}", lineno, "profit")
        if name in profits:
            raise ParseError(f"duplicate profit entry for {name!r}", lineno, "profit")
        profits[name] = p
    if not profits:
        raise ParseError("no profit entries", None, "profit")
    return profits


def parse_database(stream: TextIO | str, profit_stream: TextIO | str) -> SequenceDatabase:
    """Parse the line format described in the module docstring.

    ``stream`` and ``profit_stream`` may be open text files or strings.
    """
    named = parse_profits(profit_stream)
    ids = {name: n for n, name in enumerate(named)}
    sequences = []
    for lineno, line in _lines(stream):
        tokens = line.split()
        itemsets: list[tuple[QItem, ...]] = []
        current: list[QItem] = []
        seen: set[int] = set()
        ended = False
        for tok in tokens:
            if ended:
                raise ParseError(f"token {tok!r} after end of sequence '-2'", lineno)
            if tok == "-2":
                if current:
                    itemsets.append(tuple(sorted(current)))
                    current = []
                ended = True
            elif tok == "-1":
                if not current:
                    raise ParseError("empty itemset", lineno)
                itemsets.append(tuple(sorted(current)))
                current = []
            else:
                name, sep, qty = tok.rpartition(":")
                if not sep or not name:
                    raise ParseError(f"expected 'item:quantity', got {tok!r}", lineno)
                try:
                    q = int(qty)
                except ValueError:
                    raise ParseError(f"quantity of {name!r} is not an integer: {qty!r}", lineno) from None
                if q <= 0:
                    raise ParseError(f"quantity of {name!r} must be positive, got {q}", lineno)
                if name not in ids:
                    raise ParseError(f"item {name!r} has no profit entry", lineno)
                item = ids[name]
                if item in seen:
                    raise ParseError(f"item {name!r} occurs twice in the sequence", lineno)
                seen.add(item)
                current.append(QItem(item, q))
        if not ended:
            raise ParseError("sequence not terminated by '-2'", lineno)
        if not itemsets:
            raise ParseError("empty sequence", lineno)
        sequences.append(QSequence(len(sequences), tuple(itemsets)))
    if not sequences:
        raise ParseError("no sequences", None)
    return SequenceDatabase(tuple(sequences), {ids[k]: v for k, v in named.items()}, tuple(named))


def format_sequence(seq: QSequence, names: tuple[str, ...]) -> str:
    if not seq.itemsets:
        raise ValueError(f"sequence {seq.sid} is empty and cannot be written")
    parts = [" ".join(f"{names[qi.item]}:{qi.quantity}" for qi in itemset) for itemset in seq.itemsets]
    return " -1 ".join(parts) + " -2"


def write_database(db: SequenceDatabase, out: TextIO, profit_out: TextIO | None = None) -> None:
    """Write ``db`` in the text format; profits go to ``profit_out`` if given."""
    for seq in db:
        out.write(format_sequence(seq, db.names) + "\n")
    if profit_out is not None:
        for item in sorted(db.profits):
            profit_out.write(f"{db.names[item]} {db.profits[item]}\n")


def dumps(db: SequenceDatabase) -> tuple[str, str]:
    """Return ``(database_text, profit_text)``."""
    a, b = io.StringIO(), io.StringIO()
    write_database(db, a, b)
    return a.getvalue(), b.getvalue()
