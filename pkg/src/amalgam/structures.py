"""Symbolic names for the algebras the classifier identifies.

Expressions are small immutable trees.  ``normalize`` applies the standard
identifications (matrices over matrices, O_1 = C(T), tensor reassociation)
and ``nuclear_attr`` reads nuclearity/exactness off the tree.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

from .diagram import AmalgamationDiagram, FreeProductSpec, Unitality, unitality_profile
from .graphalg import DirectedGraph, NotApplicable, ck_assignment
from .verdict import Status, Verdict


@dataclass(frozen=True)
class MatrixAlg:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("matrix size must be positive")


@dataclass(frozen=True)
class MatrixOver:
    n: int
    inner: "AlgebraExpr"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("matrix size must be positive")


@dataclass(frozen=True)
class Tensor:
    left: "AlgebraExpr"
    right: "AlgebraExpr"


@dataclass(frozen=True)
class DirectSum:
    parts: tuple["AlgebraExpr", ...]


@dataclass(frozen=True)
class FreeProduct:
    left: "AlgebraExpr"
    right: "AlgebraExpr"
    amalgam: Optional[str] = None  # None, "scalar", or a canonical diagram text

    def __post_init__(self):
        a = self.amalgam
        if a is not None and a != "scalar" and ":" not in a:
            raise ValueError("amalgam must be None, 'scalar' or a diagram reference")


@dataclass(frozen=True)
class Cuntz:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("Cuntz index must be positive")


@dataclass(frozen=True)
class CircleAlgebra:
    pass


@dataclass(frozen=True)
class GraphAlgebra:
    graph: DirectedGraph


@dataclass(frozen=True)
class PathAlgebraC2C2:
    """C^2 *_C C^2: 2x2 matrices over C[0,1] with off-diagonal entries vanishing at 0 and 1."""


AlgebraExpr = Union[
    MatrixAlg, MatrixOver, Tensor, DirectSum, FreeProduct, Cuntz, CircleAlgebra, GraphAlgebra, PathAlgebraC2C2
]

C_STAR_F2 = FreeProduct(CircleAlgebra(), CircleAlgebra(), "scalar")
C2_FREE_C2 = PathAlgebraC2C2()


def example_mk_structure(k: int) -> MatrixAlg:
    """(M_k + C) *_{C^{k+1}} (C^{k-1} + M_2) is M_{k+1}; the oracle checks the universal map."""
    return MatrixAlg(k + 1)


# --- normalization ---------------------------------------------------------------

def _tensor_factors(e) -> list:
    if isinstance(e, Tensor):
        return _tensor_factors(e.left) + _tensor_factors(e.right)
    return [e]


def _build_tensor(factors: list):
    size = 1
    others = []
    for f in factors:
        if isinstance(f, MatrixAlg):
            size *= f.n
        else:
            others.append(f)
    parts = ([MatrixAlg(size)] if size > 1 or not others else []) + others
    out = parts[0]
    for p in parts[1:]:
        out = Tensor(out, p)
    return out


def normalize(e: AlgebraExpr) -> AlgebraExpr:
    if isinstance(e, Cuntz):
        return CircleAlgebra() if e.n == 1 else e
    if isinstance(e, MatrixOver):
        inner = normalize(e.inner)
        if isinstance(inner, MatrixAlg):
            return MatrixAlg(e.n * inner.n)
        return normalize(Tensor(MatrixAlg(e.n), inner))
    if isinstance(e, Tensor):
        factors = _tensor_factors(normalize(e.left)) + _tensor_factors(normalize(e.right))
        return _build_tensor(factors)
    if isinstance(e, DirectSum):
        return DirectSum(tuple(normalize(p) for p in e.parts))
    if isinstance(e, FreeProduct):
        return FreeProduct(normalize(e.left), normalize(e.right), e.amalgam)
    return e


def size(e: AlgebraExpr) -> int:
    """Node count plus the number of MatrixOver nodes; normalize never increases it."""
    if isinstance(e, MatrixOver):
        return 2 + size(e.inner)
    if isinstance(e, (Tensor, FreeProduct)):
        return 1 + size(e.left) + size(e.right)
    if isinstance(e, DirectSum):
        return 1 + sum(size(p) for p in e.parts)
    return 1


# --- attributes ------------------------------------------------------------------

class Attr(Enum):
    NUCLEAR = "nuclear"
    NOT_EXACT = "not_exact"
    UNKNOWN = "unknown"


def _is_circle(e) -> bool:
    return isinstance(e, CircleAlgebra) or (isinstance(e, Cuntz) and e.n == 1)


def nuclear_attr(e: AlgebraExpr) -> Attr:
    if isinstance(e, (MatrixAlg, Cuntz, CircleAlgebra, GraphAlgebra, PathAlgebraC2C2)):
        return Attr.NUCLEAR
    if isinstance(e, FreeProduct):
        if _is_circle(normalize(e.left)) and _is_circle(normalize(e.right)) and e.amalgam == "scalar":
            return Attr.NOT_EXACT
        return Attr.UNKNOWN
    if isinstance(e, MatrixOver):
        parts = [e.inner]
    elif isinstance(e, Tensor):
        parts = [e.left, e.right]
    elif isinstance(e, DirectSum):
        parts = list(e.parts)
    else:
        raise TypeError(f"not an algebra expression: {e!r}")
    attrs = [nuclear_attr(p) for p in parts]
    # a tensor factor or summand is a subalgebra (up to corners)
    if Attr.NOT_EXACT in attrs:
        return Attr.NOT_EXACT
    if all(a is Attr.NUCLEAR for a in attrs):
        return Attr.NUCLEAR
    return Attr.UNKNOWN


def agrees_with(attr: Attr, status: Status) -> bool:
    if attr is Attr.UNKNOWN:
        return True
    return attr.value == status.value


# --- describe --------------------------------------------------------------------

def _is_cuntz_pattern(d: AmalgamationDiagram) -> Optional[int]:
    """Size m when ``d`` is [1][m-1] on M_m against [1][1] on M_2 (any row/column order)."""
    if len(d.rows) != 2 or d.rows[0].n != 2 or unitality_profile(d).kind is not Unitality.ALL:
        return None
    for big, small in ((0, 1), (1, 0)):
        rb, rs = d.rows[big], d.rows[small]
        if rs.ambient_size == 2 and rs.blocks == (1, 1) and 1 in rb.blocks:
            return rb.ambient_size
    return None


def describe(s: FreeProductSpec, v: Verdict) -> Optional[AlgebraExpr]:
    """Structural description matching the verdict, or ``None`` when no pattern applies."""
    if not isinstance(s, AmalgamationDiagram):
        return None
    rows = s.rows
    if len(rows) == 3:
        if all(r.ambient_size == 2 and r.blocks == (1, 1) for r in rows):
            return MatrixOver(2, C_STAR_F2)
        return None
    if all(r.ambient_size == 3 and r.blocks == (1, 1, 1) for r in rows):
        return Tensor(MatrixAlg(3), C_STAR_F2)
    if v.status is not Status.NUCLEAR:
        return None
    m = _is_cuntz_pattern(s)
    if m is not None:
        return Tensor(MatrixAlg(m), CircleAlgebra() if m == 2 else Cuntz(m - 1))
    kind = unitality_profile(s).kind
    if kind is Unitality.MIXED:
        unital = next(r for r in rows if r.unital)
        corner = next(r for r in rows if not r.unital)
        if corner.blocks == (1,):
            return MatrixOver(corner.ambient_size, MatrixAlg(unital.ambient_size))
    try:
        return GraphAlgebra(ck_assignment(s).graph)
    except NotApplicable:
        return None


# --- serialization ---------------------------------------------------------------

def to_json(e: AlgebraExpr) -> dict:
    if isinstance(e, MatrixAlg):
        return {"op": "MatrixAlg", "n": e.n, "args": []}
    if isinstance(e, MatrixOver):
        return {"op": "MatrixOver", "n": e.n, "args": [to_json(e.inner)]}
    if isinstance(e, Tensor):
        return {"op": "Tensor", "args": [to_json(e.left), to_json(e.right)]}
    if isinstance(e, DirectSum):
        return {"op": "DirectSum", "args": [to_json(p) for p in e.parts]}
    if isinstance(e, FreeProduct):
        return {"op": "FreeProduct", "args": [to_json(e.left), to_json(e.right)], "amalgam": e.amalgam}
    if isinstance(e, Cuntz):
        return {"op": "Cuntz", "n": e.n, "args": []}
    if isinstance(e, CircleAlgebra):
        return {"op": "CircleAlgebra", "args": []}
    if isinstance(e, PathAlgebraC2C2):
        return {"op": "PathAlgebraC2C2", "args": []}
    if isinstance(e, GraphAlgebra):
        g = e.graph
        return {
            "op": "GraphAlgebra",
            "args": [],
            "vertices": list(g.vertices),
            "edges": [[x.id, x.source, x.range] for x in g.sorted_edges()],
        }
    raise TypeError(f"not an algebra expression: {e!r}")


def to_text(e: AlgebraExpr) -> str:
    if isinstance(e, MatrixAlg):
        return f"M{e.n}"
    if isinstance(e, MatrixOver):
        return f"M{e.n}({to_text(e.inner)})"
    if isinstance(e, Tensor):
        return f"{_wrap(e.left)} ⊗ {_wrap(e.right)}"
    if isinstance(e, DirectSum):
        return " ⊕ ".join(_wrap(p) for p in e.parts)
    if isinstance(e, FreeProduct):
        sub = {None: "", "scalar": "_C"}.get(e.amalgam, f"_[{e.amalgam}]")
        return f"{_wrap(e.left)} *{sub} {_wrap(e.right)}"
    if isinstance(e, Cuntz):
        return f"O{e.n}"
    if isinstance(e, CircleAlgebra):
        return "C(T)"
    if isinstance(e, PathAlgebraC2C2):
        return "C^2 *_C C^2"
    if isinstance(e, GraphAlgebra):
        return f"C*(G: {len(e.graph.vertices)} vertices, {len(e.graph.edges)} edges)"
    raise TypeError(f"not an algebra expression: {e!r}")


def _wrap(e) -> str:
    t = to_text(e)
    return f"({t})" if isinstance(e, (Tensor, DirectSum, FreeProduct)) else t
