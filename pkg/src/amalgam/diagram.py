"""Amalgamation diagrams: parsing, validation, rendering and combinatorics.

A row ``M5: 1 2 0`` records how ``C^n`` sits diagonally inside ``M_5``: the
i-th minimal projection of ``C^n`` has rank ``blocks[i]`` and the trailing
``0`` (the zero box) marks that the embedding misses the unit.  Two or three
rows with the same ``n`` describe one amalgamated free product.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Union


class DiagramError(ValueError):
    """Base class for everything the parser or the constructors reject."""


class DiagramSyntaxError(DiagramError):
    def __init__(self, message: str, column: int, line: int = 1):
        self.column = column
        self.line = line
        super().__init__(f"line {line}, column {column}: {message}")


class InvariantError(DiagramError):
    """A well-formed input that violates a diagram invariant.

    ``code`` is one of the short machine-readable tags, e.g.
    ``"sum-exceeds-ambient"`` or ``"row-arity-mismatch"``.
    """

    def __init__(self, code: str, message: str = "", column: Optional[int] = None):
        self.code = code
        self.column = column
        text = f"{code}: {message}" if message else code
        if column is not None:
            text = f"line 1, column {column}: {text}"
        super().__init__(text)


@dataclass(frozen=True)
class BlockRow:
    ambient_size: int
    blocks: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(int(b) for b in self.blocks))
        if self.ambient_size < 2:
            raise InvariantError("ambient-too-small", f"M{self.ambient_size}: sizes must be at least 2")
        if not self.blocks:
            raise InvariantError("empty-row", "a row needs at least one block")
        if any(b <= 0 for b in self.blocks):
            raise InvariantError("interior-zero-box", "block sizes must be positive; a zero box may only come last")
        if sum(self.blocks) > self.ambient_size:
            raise InvariantError(
                "sum-exceeds-ambient", f"blocks {list(self.blocks)} sum past M{self.ambient_size}"
            )

    @property
    def n(self) -> int:
        return len(self.blocks)

    @property
    def has_zero_box(self) -> bool:
        return sum(self.blocks) < self.ambient_size

    @property
    def unital(self) -> bool:
        return not self.has_zero_box

    def render(self) -> str:
        tail = " 0" if self.has_zero_box else ""
        return f"M{self.ambient_size}: " + " ".join(map(str, self.blocks)) + tail

    def index_ranges(self) -> list[range]:
        """Basis indices (0-based) of ``M_j`` covered by each block."""
        out, start = [], 0
        for b in self.blocks:
            out.append(range(start, start + b))
            start += b
        return out

    def complement_indices(self) -> range:
        return range(sum(self.blocks), self.ambient_size)


@dataclass(frozen=True)
class AmalgamationDiagram:
    rows: tuple[BlockRow, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        if len(self.rows) not in (2, 3):
            raise InvariantError("row-count", f"need 2 or 3 rows, got {len(self.rows)}")
        if len({r.n for r in self.rows}) != 1:
            raise InvariantError("row-arity-mismatch", "every row must have the same number of blocks")

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(r.ambient_size for r in self.rows)

    def columns(self) -> list[tuple[int, ...]]:
        return list(zip(*(r.blocks for r in self.rows)))

    def render(self) -> str:
        return " ; ".join(r.render() for r in self.rows)

    def pair(self, i: int, j: int) -> "AmalgamationDiagram":
        return AmalgamationDiagram((self.rows[i], self.rows[j]))

    def __str__(self):
        return self.render()


@dataclass(frozen=True)
class NoAmalgam:
    sizes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if len(self.sizes) not in (2, 3):
            raise InvariantError("row-count", f"need 2 or 3 factors, got {len(self.sizes)}")
        if any(s < 2 for s in self.sizes):
            raise InvariantError("ambient-too-small", "sizes must be at least 2")

    def render(self) -> str:
        return " * ".join(f"M{s}" for s in self.sizes)

    def __str__(self):
        return self.render()


FreeProductSpec = Union[NoAmalgam, AmalgamationDiagram]


# --- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<mat>M\d+)|(?P<int>\d+)|(?P<punct>[:;*]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens, pos = [], 0
    stripped_end = len(text.rstrip())
    while pos < stripped_end:
        m = _TOKEN.match(text, pos)
        if m is None:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise DiagramSyntaxError(f"unexpected character {text[col - 1]!r}", col)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def end_column(self) -> int:
        return len(self.text.rstrip()) + 1

    def expect(self, kind: str, value: Optional[str] = None, what: str = ""):
        tok = self.peek()
        if tok is None:
            raise DiagramSyntaxError(f"expected {what or value or kind}, got end of input", self.end_column())
        if tok[0] != kind or (value is not None and tok[1] != value):
            raise DiagramSyntaxError(f"expected {what or value or kind}, got {tok[1]!r}", tok[2])
        self.i += 1
        return tok

    def parse(self) -> FreeProductSpec:
        if not self.tokens:
            raise DiagramSyntaxError("empty input", 1)
        first = self.expect("mat", what="matrix algebra 'M<size>'")
        nxt = self.peek()
        if nxt is not None and nxt[1] == "*":
            return self._freeprod(first)
        return self._diagram(first)

    def _freeprod(self, first) -> NoAmalgam:
        sizes = [int(first[1][1:])]
        while self.peek() is not None:
            self.expect("punct", "*")
            sizes.append(int(self.expect("mat", what="matrix algebra 'M<size>'")[1][1:]))
        return NoAmalgam(tuple(sizes))

    def _row(self, head) -> BlockRow:
        size = int(head[1][1:])
        self.expect("punct", ":")
        nums = []
        while (tok := self.peek()) is not None and tok[0] == "int":
            nums.append((int(tok[1]), tok[2]))
            self.i += 1
        if not nums:
            col = self.peek()[2] if self.peek() else self.end_column()
            raise DiagramSyntaxError("a row needs at least one block size", col)
        zero_col = None
        if nums[-1][0] == 0:
            zero_col = nums[-1][1]
            nums = nums[:-1]
        for value, col in nums:
            if value == 0:
                raise InvariantError("interior-zero-box", "a zero box may only come last", col)
        blocks = tuple(v for v, _ in nums)
        if size < 2:
            raise InvariantError("ambient-too-small", f"M{size}: sizes must be at least 2", head[2])
        if not blocks:
            raise InvariantError("empty-row", "a row needs a positive block before the zero box", head[2])
        if sum(blocks) > size:
            raise InvariantError("sum-exceeds-ambient", f"blocks sum to {sum(blocks)} > {size}", head[2])
        if zero_col is not None and sum(blocks) == size:
            raise InvariantError("zero-box-redundant", f"blocks already fill M{size}", zero_col)
        return BlockRow(size, blocks)

    def _diagram(self, first) -> AmalgamationDiagram:
        rows = [self._row(first)]
        while self.peek() is not None:
            self.expect("punct", ";", what="';' or end of input")
            rows.append(self._row(self.expect("mat", what="matrix algebra 'M<size>'")))
        if len(rows) not in (2, 3):
            raise InvariantError("row-count", f"need 2 or 3 rows (or the 'Mj * Mk' form), got {len(rows)}")
        if len({r.n for r in rows}) != 1:
            raise InvariantError("row-arity-mismatch", "every row must have the same number of blocks")
        return AmalgamationDiagram(tuple(rows))


def parse_diagram(text: str) -> FreeProductSpec:
    """Parse ``"M3: 1 2 ; M4: 1 2 0"`` or ``"M2 * M3"``.

    A row whose blocks do not fill the ambient algebra gets its zero box
    even when the trailing ``0`` is omitted.
    """
    return _Parser(text).parse()


def render_diagram(spec: FreeProductSpec) -> str:
    return spec.render()


# --- combinatorial quantities --------------------------------------------------

def dimension(d: AmalgamationDiagram) -> int:
    return d.rows[0].n


def min_value(d: AmalgamationDiagram) -> int:
    # columnwise minima; zero boxes are not columns
    return sum(min(col) for col in d.columns())


def row_min_value(d: AmalgamationDiagram) -> int:
    """Sum over rows of the smallest block in that row."""
    return sum(min(r.blocks) for r in d.rows)


def deficit(r: BlockRow) -> int:
    return r.ambient_size - sum(r.blocks)


class Unitality(Enum):
    ALL = "all-unital"
    MIXED = "mixed-unital"
    NONE = "none-unital"


@dataclass(frozen=True)
class UnitalityProfile:
    kind: Unitality
    nonunital_rows: tuple[int, ...] = ()


def unitality_profile(d: AmalgamationDiagram) -> UnitalityProfile:
    bad = tuple(i for i, r in enumerate(d.rows) if deficit(r) > 0)
    if not bad:
        return UnitalityProfile(Unitality.ALL)
    if len(bad) == len(d.rows):
        return UnitalityProfile(Unitality.NONE, bad)
    return UnitalityProfile(Unitality.MIXED, bad)


def _split(v: int, m: int) -> tuple[int, ...]:
    return (v - m + 1,) + (1,) * (m - 1)


@dataclass(frozen=True)
class RefinementMap:
    """``origin[c]`` is the source column of refined column ``c``; ``None`` marks the leftover group."""

    origin: tuple[Optional[int], ...]


def refine_to_unital_common(d: AmalgamationDiagram) -> Optional[tuple[AmalgamationDiagram, RefinementMap]]:
    """Largest-dimension unital common diagonal subalgebra containing the amalgam.

    Returns ``None`` when exactly one row is non-unital: then no unital
    common refinement containing ``D`` exists.
    """
    if len(d.rows) != 2:
        raise ValueError("refinement is defined for two-row diagrams")
    top, bottom = d.rows
    dt, db = deficit(top), deficit(bottom)
    if (dt == 0) != (db == 0):
        return None
    new_top, new_bottom, origin = [], [], []
    for i, (a, b) in enumerate(d.columns()):
        m = min(a, b)
        new_top += _split(a, m)
        new_bottom += _split(b, m)
        origin += [i] * m
    if dt and db:
        m = min(dt, db)
        new_top += _split(dt, m)
        new_bottom += _split(db, m)
        origin += [None] * m
    refined = AmalgamationDiagram(
        (BlockRow(top.ambient_size, tuple(new_top)), BlockRow(bottom.ambient_size, tuple(new_bottom)))
    )
    return refined, RefinementMap(tuple(origin))


# --- enumeration ----------------------------------------------------------------

def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Ordered tuples of ``parts`` positive integers summing to ``total``."""
    if parts <= 0 or total < parts:
        return
    for cuts in itertools.combinations(range(1, total), parts - 1):
        bounds = (0,) + cuts + (total,)
        yield tuple(bounds[i + 1] - bounds[i] for i in range(parts))


def iter_rows(ambient_size: int, n: int) -> Iterator[BlockRow]:
    for total in range(n, ambient_size + 1):
        for blocks in compositions(total, n):
            yield BlockRow(ambient_size, blocks)


def iter_two_row_diagrams(max_size: int, max_dim: Optional[int] = None) -> Iterator[AmalgamationDiagram]:
    max_dim = max_size if max_dim is None else max_dim
    for n in range(1, max_dim + 1):
        rows = [r for j in range(2, max_size + 1) for r in iter_rows(j, n)]
        for a in rows:
            for b in rows:
                yield AmalgamationDiagram((a, b))


def iter_three_row_diagrams(max_size: int, max_dim: Optional[int] = None) -> Iterator[AmalgamationDiagram]:
    max_dim = max_size if max_dim is None else max_dim
    for n in range(1, max_dim + 1):
        rows = [r for j in range(2, max_size + 1) for r in iter_rows(j, n)]
        for triple in itertools.product(rows, repeat=3):
            yield AmalgamationDiagram(triple)


def amalgam_extensions(d: AmalgamationDiagram) -> Iterator[AmalgamationDiagram]:
    """Every two-row diagram on the same factors whose amalgam contains ``d``'s.

    Each column of ``d`` splits into the same number of positive parts in
    both rows; further columns may be carved out of the two zero boxes.
    Column order is fixed (split groups in order, leftovers last).  ``d``
    itself is included.
    """
    top, bottom = d.rows
    per_column = []
    for a, b in d.columns():
        options = []
        for t in range(1, min(a, b) + 1):
            for pa in compositions(a, t):
                for pb in compositions(b, t):
                    options.append((pa, pb))
        per_column.append(options)
    dt, db = deficit(top), deficit(bottom)
    leftovers = [((), ())]
    for t in range(1, min(dt, db) + 1):
        for sa in range(t, dt + 1):
            for sb in range(t, db + 1):
                for pa in compositions(sa, t):
                    for pb in compositions(sb, t):
                        leftovers.append((pa, pb))
    for choice in itertools.product(*per_column, leftovers):
        new_top = tuple(x for pa, _ in choice for x in pa)
        new_bottom = tuple(x for _, pb in choice for x in pb)
        yield AmalgamationDiagram(
            (BlockRow(top.ambient_size, new_top), BlockRow(bottom.ambient_size, new_bottom))
        )
