"""Directed graphs behind the nuclear cases, and their Cuntz-Krieger families.

Orientation follows ``s``/``r`` literally: an edge is traversed from its
source to its range, a cycle is a closed path ``r(e_i) = s(e_{i+1})``, an
entry to a cycle is an outside edge whose *range* lies on it, and a sink is
a vertex that is the source of no edge.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional

from .diagram import (
    AmalgamationDiagram,
    BlockRow,
    FreeProductSpec,
    Unitality,
    dimension,
    min_value,
    unitality_profile,
)


class NotApplicable(ValueError):
    """The spec has no graph-algebra description."""


@dataclass(frozen=True)
class Edge:
    id: str
    source: str
    range: str


def _edge_key(edge_id: str):
    m = re.fullmatch(r"([A-Za-z_]*)(\d*)", edge_id)
    if m is None:
        return (edge_id, 0)
    return (m.group(1), int(m.group(2) or 0))


@dataclass(frozen=True)
class DirectedGraph:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        ids = [e.id for e in self.edges]
        if len(set(ids)) != len(ids):
            raise ValueError("edge ids must be unique")
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("vertex ids must be unique")
        known = set(self.vertices)
        for e in self.edges:
            if e.source not in known or e.range not in known:
                raise ValueError(f"edge {e.id} uses an undeclared vertex")

    def edge(self, edge_id: str) -> Edge:
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise KeyError(edge_id)

    def out_edges(self, v: str) -> list[Edge]:
        return [e for e in self.edges if e.source == v]

    def in_edges(self, v: str) -> list[Edge]:
        return [e for e in self.edges if e.range == v]

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges, key=lambda e: _edge_key(e.id))


def graph_for_unital_pair(j: int, k: int) -> DirectedGraph:
    """Two vertices; ``j-1`` edges ``e_i`` from v2 to v1 and ``k-1`` edges ``f_i`` from v1 to v2."""
    if j < 2 or k < 2:
        raise ValueError("sizes must be at least 2")
    edges = [Edge(f"e{i}", "v2", "v1") for i in range(1, j)]
    edges += [Edge(f"f{i}", "v1", "v2") for i in range(1, k)]
    return DirectedGraph(("v1", "v2"), tuple(edges))


def extend_graph_nonunital(g: DirectedGraph, extra: int, from_vertex: str = "v2") -> DirectedGraph:
    """Append a vertex ``v3`` receiving ``extra`` new edges ``g_i`` from ``from_vertex``."""
    if extra < 1:
        raise ValueError("extra must be positive")
    if "v3" in g.vertices:
        raise ValueError("graph already has a v3")
    if from_vertex not in g.vertices:
        raise ValueError(f"unknown vertex {from_vertex}")
    new = tuple(Edge(f"g{i}", from_vertex, "v3") for i in range(1, extra + 1))
    return DirectedGraph(g.vertices + ("v3",), g.edges + new)


# --- cycles, entries, cofinality ------------------------------------------------

def simple_cycles(g: DirectedGraph) -> list[tuple[str, ...]]:
    """Vertex-simple cycles as edge-id tuples, each listed once.

    A cycle is rotated to start at its smallest vertex (in declaration
    order); parallel edges give distinct cycles.
    """
    order = {v: i for i, v in enumerate(g.vertices)}
    found = []

    def walk(start, v, path, seen):
        for e in g.out_edges(v):
            if e.range == start:
                found.append(tuple(path + [e.id]))
            elif e.range not in seen and order[e.range] > order[start]:
                walk(start, e.range, path + [e.id], seen | {e.range})

    for start in g.vertices:
        walk(start, start, [], {start})
    return found


def cycle_vertices(g: DirectedGraph, cycle: Iterable[str]) -> set[str]:
    return {g.edge(eid).source for eid in cycle}


def every_cycle_has_entry(g: DirectedGraph) -> bool:
    for cycle in simple_cycles(g):
        on_cycle = cycle_vertices(g, cycle)
        members = set(cycle)
        if not any(e.range in on_cycle and e.id not in members for e in g.edges):
            return False
    return True


def reachable_from(g: DirectedGraph, v: str) -> set[str]:
    seen, stack = {v}, [v]
    while stack:
        for e in g.out_edges(stack.pop()):
            if e.range not in seen:
                seen.add(e.range)
                stack.append(e.range)
    return seen


def sinks(g: DirectedGraph) -> list[str]:
    return [v for v in g.vertices if not g.out_edges(v)]


def is_cofinal(g: DirectedGraph) -> bool:
    targets = [cycle_vertices(g, c) for c in simple_cycles(g)] + [{s} for s in sinks(g)]
    for v in g.vertices:
        reach = reachable_from(g, v)
        if any(not (reach & t) for t in targets):
            return False
    return True


def is_simple_graph_algebra(g: DirectedGraph) -> bool:
    return is_cofinal(g) and every_cycle_has_entry(g)


# --- diagrams -> graphs --------------------------------------------------------

@dataclass(frozen=True)
class GraphOrientation:
    """Which row supplies the ``e`` edges and which columns the two vertices are.

    ``e_row`` has a block of size one in column ``source_col`` (vertex v2);
    ``f_row`` has a block of size one in the other column ``range_col``
    (vertex v1).
    """

    e_row: int
    f_row: int
    source_col: int
    range_col: int


def graph_orientation(d: AmalgamationDiagram, prefer_e_row: Optional[int] = None) -> Optional[GraphOrientation]:
    """Orientation carrying the two-vertex Cuntz-Krieger family, or ``None``.

    Exists exactly for dimension-two two-row diagrams of the shape
    ``[1][x] / [y][1]`` up to swapping rows or columns.
    """
    if len(d.rows) != 2 or dimension(d) != 2:
        return None
    row_order = [(0, 1), (1, 0)]
    if prefer_e_row == 1:
        row_order.reverse()
    for e_row, f_row in row_order:
        for a in (0, 1):
            b = 1 - a
            if d.rows[e_row].blocks[a] == 1 and d.rows[f_row].blocks[b] == 1:
                return GraphOrientation(e_row, f_row, a, b)
    return None


def has_graph_shape(d: AmalgamationDiagram) -> bool:
    return (
        unitality_profile(d).kind is Unitality.ALL
        and dimension(d) == 2
        and min_value(d) == 2
        and graph_orientation(d) is not None
    )


def nonunital_row(d: AmalgamationDiagram) -> tuple[int, BlockRow]:
    """Index and value of the single non-unital row of a mixed two-row diagram."""
    prof = unitality_profile(d)
    if len(d.rows) != 2 or prof.kind is not Unitality.MIXED:
        raise ValueError("reduction needs a two-row diagram with exactly one non-unital row")
    (i,) = prof.nonunital_rows
    return i, d.rows[i]


# A matrix unit of one factor: (factor index, (row, col)), 0-based indices.
Unit = tuple[int, tuple[int, int]]


@dataclass(frozen=True)
class VertexProjection:
    """Sum of diagonal matrix units of one factor.

    ``column`` names the amalgam column the projection equals (``None``
    for a projection living only in one factor, such as a zero box).
    """

    factor: int
    units: tuple[Unit, ...]
    column: Optional[int]


@dataclass(frozen=True)
class CKAssignment:
    spec: FreeProductSpec
    graph: DirectedGraph
    edges: dict  # edge id -> tuple[Unit, ...] (a word, multiplied left to right)
    vertices: dict  # vertex id -> VertexProjection

    def __post_init__(self):
        missing = [e.id for e in self.graph.edges if e.id not in self.edges]
        missing += [v for v in self.graph.vertices if v not in self.vertices]
        if missing:
            raise ValueError(f"unassigned graph items: {missing}")
        d = self.spec
        for word in self.edges.values():
            for f, (p, q) in word:
                if not (0 <= p < d.rows[f].ambient_size and 0 <= q < d.rows[f].ambient_size):
                    raise ValueError(f"matrix unit {(p, q)} does not exist in factor {f}")


def _diag_units(factor: int, indices: Iterable[int]) -> tuple[Unit, ...]:
    return tuple((factor, (i, i)) for i in indices)


def _unital_assignment(d: AmalgamationDiagram, o: GraphOrientation):
    er, fr = d.rows[o.e_row], d.rows[o.f_row]
    u = er.index_ranges()[o.source_col][0]
    e_targets = er.index_ranges()[o.range_col]
    u2 = fr.index_ranges()[o.range_col][0]
    f_targets = fr.index_ranges()[o.source_col]
    edges = {}
    for n, w in enumerate(e_targets, start=1):
        edges[f"e{n}"] = ((o.e_row, (w, u)),)
    for n, w in enumerate(f_targets, start=1):
        edges[f"f{n}"] = ((o.f_row, (w, u2)),)
    vertices = {
        "v2": VertexProjection(o.e_row, _diag_units(o.e_row, [u]), o.source_col),
        "v1": VertexProjection(o.e_row, _diag_units(o.e_row, e_targets), o.range_col),
    }
    graph = graph_for_unital_pair(er.blocks[o.range_col] + 1, fr.blocks[o.source_col] + 1)
    return graph, edges, vertices


def graph_for_spec(s: FreeProductSpec) -> DirectedGraph:
    return ck_assignment(s).graph


def ck_assignment(s: FreeProductSpec) -> CKAssignment:
    """Cuntz-Krieger family for a two-vertex (or extended three-vertex) graph.

    Unital case: edge ``e_n`` is the matrix unit of the e-factor carrying
    its size-one block in the source column onto the n-th basis vector of
    the range column; ``f_n`` likewise in the f-factor with the columns
    swapped.  Mixed case: the non-unital row, shrunk to the amalgam unit,
    plays the e-factor, and each basis vector of its zero box receives one
    edge ``g_n`` from v2.
    """
    if not isinstance(s, AmalgamationDiagram) or len(s.rows) != 2:
        raise NotApplicable("graph families exist only for two-row diagrams")
    kind = unitality_profile(s).kind
    if kind is Unitality.ALL:
        if not has_graph_shape(s):
            raise NotApplicable(f"{s.render()} has no two-vertex graph description")
        graph, edges, vertices = _unital_assignment(s, graph_orientation(s))
        return CKAssignment(s, graph, edges, vertices)
    if kind is Unitality.MIXED:
        i, row = nonunital_row(s)
        reduced_size = sum(row.blocks)
        if reduced_size < 2:
            raise NotApplicable(f"{s.render()} reduces to a scalar corner, not a graph algebra")
        rows = list(s.rows)
        rows[i] = BlockRow(reduced_size, row.blocks)
        reduced = AmalgamationDiagram(tuple(rows))
        if not has_graph_shape(reduced):
            raise NotApplicable(f"{s.render()} does not reduce to a graph-algebra diagram")
        o = graph_orientation(reduced, prefer_e_row=i)
        graph, edges, vertices = _unital_assignment(reduced, o)
        u = row.index_ranges()[o.source_col][0]
        extra = list(row.complement_indices())
        graph = extend_graph_nonunital(graph, len(extra), from_vertex="v2")
        for n, w in enumerate(extra, start=1):
            edges[f"g{n}"] = ((i, (w, u)),)
        vertices["v3"] = VertexProjection(i, _diag_units(i, extra), None)
        return CKAssignment(s, graph, edges, vertices)
    raise NotApplicable(f"{s.render()} has no graph description")


def to_dot(g: DirectedGraph, name: str = "G", annotate: bool = True) -> str:
    lines = [f"digraph {name} {{"]
    if annotate:
        simple = is_simple_graph_algebra(g)
        lines.append(
            f'  label="simple={str(simple).lower()} cofinal={str(is_cofinal(g)).lower()} '
            f'entries={str(every_cycle_has_entry(g)).lower()}";'
        )
    for v in g.vertices:
        lines.append(f'  "{v}";')
    for e in g.sorted_edges():
        lines.append(f'  "{e.source}" -> "{e.range}" [label="{e.id}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
