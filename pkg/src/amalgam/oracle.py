"""Finite-dimensional checks of the explicit *-representation constructions.

All matrices are complex128 numpy arrays.  Residuals use the entrywise
max-modulus norm.  Randomness comes from numpy's PCG64 generator; each trial
draws from its own child of ``SeedSequence(seed)`` so results are
reproducible and independent of trial scheduling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .diagram import AmalgamationDiagram, BlockRow
from .graphalg import CKAssignment, VertexProjection

RANDOM_TOL = 1e-9
CLOSED_FORM_TOL = 1e-12

MatrixUnit = tuple[int, int]  # 0-based (row, col)


class DimensionMismatch(ValueError):
    pass


class UnresolvableWord(KeyError):
    pass


class NoFiniteRepresentation(ValueError):
    """No non-zero finite-dimensional representation pair agrees on the amalgam."""


def maxabs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


@dataclass
class Residual:
    by_class: dict = field(default_factory=dict)
    worst_label: str = ""
    worst: float = 0.0

    def record(self, cls: str, label: str, value: float):
        self.by_class[cls] = max(self.by_class.get(cls, 0.0), value)
        if value > self.worst or not self.worst_label:
            self.worst = value
            self.worst_label = f"{cls}: {label}"

    def merge(self, other: "Residual") -> "Residual":
        for cls, value in other.by_class.items():
            self.by_class[cls] = max(self.by_class.get(cls, 0.0), value)
        if other.worst > self.worst or not self.worst_label:
            self.worst, self.worst_label = other.worst, other.worst_label
        return self

    def passed(self, tol: float = RANDOM_TOL) -> bool:
        return self.worst < tol


@dataclass
class SuiteReport:
    suite: str
    trials: int
    seed: int
    residual: Residual
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual.passed(self.tolerance)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "trials": self.trials,
            "seed": self.seed,
            "worst_residual": self.residual.worst,
            "worst_label": self.residual.worst_label,
            "pass": self.passed,
        }


# --- random unitaries --------------------------------------------------------------

def trial_rngs(seed: int, trials: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(trials)]


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def block_unitary(block_sizes: Sequence[int], rng: np.random.Generator) -> np.ndarray:
    n = sum(block_sizes)
    w = np.zeros((n, n), dtype=complex)
    start = 0
    for b in block_sizes:
        w[start:start + b, start:start + b] = haar_unitary(b, rng)
        start += b
    return w


def _amplified_units(units: Iterable[MatrixUnit], offsets: dict, amp: int, size: int) -> dict:
    """Image of each unit under ``E_pq -> E_pq (x) I_amp`` placed at ``offsets``."""
    out = {}
    eye = np.eye(amp)
    for p, q in units:
        m = np.zeros((size, size), dtype=complex)
        m[offsets[p]:offsets[p] + amp, offsets[q]:offsets[q] + amp] = eye
        out[(p, q)] = m
    return out


def _conjugate(images: dict, w: np.ndarray) -> dict:
    wh = w.conj().T
    return {u: w @ m @ wh for u, m in images.items()}


# --- representation pairs ----------------------------------------------------------

@dataclass(frozen=True)
class RepPair:
    """Two *-representations on ``C^size`` agreeing on the amalgam.

    ``amalgam`` lists, per minimal projection of the amalgam, the diagonal
    units of each factor summing to it.
    """

    size: int
    images: tuple[dict, dict]
    amalgam: tuple[tuple[str, tuple[MatrixUnit, ...], tuple[MatrixUnit, ...]], ...]
    tolerance: float = RANDOM_TOL
    validate: bool = True

    def __post_init__(self):
        for imgs in self.images:
            for m in imgs.values():
                if m.shape != (self.size, self.size):
                    raise DimensionMismatch(f"image of shape {m.shape} in a pair of size {self.size}")
        if self.validate:
            r = self.residual()
            if not r.passed(self.tolerance):
                raise ValueError(f"not a valid representation pair ({r.worst_label} = {r.worst:.3g})")

    def projection(self, factor: int, units: Iterable[MatrixUnit]) -> np.ndarray:
        out = np.zeros((self.size, self.size), dtype=complex)
        for u in units:
            out = out + self.images[factor][u]
        return out

    @property
    def diagonal(self) -> dict:
        return {label: self.projection(0, u1) for label, u1, _ in self.amalgam}

    def residual(self) -> Residual:
        res = Residual()
        for f, imgs in enumerate(self.images):
            res.merge(matrix_unit_residual(imgs, label=f"factor {f + 1} "))
        for label, u1, u2 in self.amalgam:
            res.record("agreement", f"amalgam {label}", maxabs(self.projection(0, u1) - self.projection(1, u2)))
        return res


def matrix_unit_residual(images: dict, label: str = "") -> Residual:
    """Relations ``e_ij e_kl = δ_jk e_il`` and ``e_ij* = e_ji`` among the given units."""
    res = Residual()
    keys = list(images)
    present = set(keys)
    for (i, j) in keys:
        a = images[(i, j)]
        if (j, i) in present:
            res.record("adjoint", f"{label}e{i + 1}{j + 1}*", maxabs(a.conj().T - images[(j, i)]))
        for (k, l) in keys:
            prod = a @ images[(k, l)]
            if j == k:
                if (i, l) not in present:
                    continue
                target = images[(i, l)]
            else:
                target = 0
            res.record("multiplicativity", f"{label}e{i + 1}{j + 1}·e{k + 1}{l + 1}", maxabs(prod - target))
    return res


def check_star_rep(images: dict, n: int, unital: bool = False) -> Residual:
    """Residual of the matrix-unit relations for a map defined on all units of ``M_n``."""
    missing = [(i, j) for i in range(n) for j in range(n) if (i, j) not in images]
    if missing:
        raise KeyError(f"images missing for units {missing[:3]}...")
    shapes = {images[(i, j)].shape for i in range(n) for j in range(n)}
    if len(shapes) != 1:
        raise DimensionMismatch(f"image sizes differ: {sorted(shapes)}")
    a = np.stack([np.stack([images[(i, j)] for j in range(n)]) for i in range(n)])
    res = Residual()
    adj = np.abs(np.swapaxes(a, 0, 1).conj().swapaxes(-1, -2) - a).max(axis=(-2, -1))
    i, j = np.unravel_index(np.argmax(adj), adj.shape)
    res.record("adjoint", f"e{j + 1}{i + 1}*", float(adj[i, j]))
    # prod[i, j, k, l] = a[i, j] @ a[k, l]; target is δ_jk a[i, l]
    prod = np.matmul(a[:, :, None, None], a[None, None, :, :])
    target = np.einsum("jk,ilxy->ijklxy", np.eye(n), a)
    mult = np.abs(prod - target).max(axis=(-2, -1))
    i, j, k, l = np.unravel_index(np.argmax(mult), mult.shape)
    res.record("multiplicativity", f"e{i + 1}{j + 1}·e{k + 1}{l + 1}", float(mult[i, j, k, l]))
    if unital:
        (shape,) = shapes
        total = sum(images[(i, i)] for i in range(n))
        res.record("unit", "sum of e_ii", maxabs(total - np.eye(shape[0])))
    return res


# --- the (M_k + C) *_{C^{k+1}} (C^{k-1} + M_2) = M_{k+1} construction ---------------

def example_mk_units(k: int) -> tuple[list, list]:
    upper = [(p, q) for p in range(k) for q in range(k)] + [(k, k)]
    lower = [(p, p) for p in range(k - 1)] + [(p, q) for p in (k - 1, k) for q in (k - 1, k)]
    return upper, lower


def random_rep_pair_example_mk(
    k: int,
    m: int = 1,
    seed: int = 0,
    *,
    rng: Optional[np.random.Generator] = None,
    w1: Optional[np.ndarray] = None,
    w2: Optional[np.ndarray] = None,
    validate: bool = True,
) -> RepPair:
    """Amplified block inclusions twisted by unitaries commuting with the diagonal.

    ``w1``/``w2`` override the random twists (used for closed-form checks
    and negative controls).
    """
    if k < 2 or m < 1:
        raise ValueError("need k >= 2 and m >= 1")
    rng = rng if rng is not None else np.random.default_rng(seed)
    size = m * (k + 1)
    offsets = {p: p * m for p in range(k + 1)}
    upper, lower = example_mk_units(k)
    if w1 is None:
        w1 = block_unitary([m] * (k + 1), rng)
    if w2 is None:
        w2 = block_unitary([m] * (k + 1), rng)
    images = (
        _conjugate(_amplified_units(upper, offsets, m, size), w1),
        _conjugate(_amplified_units(lower, offsets, m, size), w2),
    )
    amalgam = tuple((str(p + 1), ((p, p),), ((p, p),)) for p in range(k + 1))
    return RepPair(size, images, amalgam, validate=validate)


def build_pi_example_mk(p: RepPair) -> dict:
    """Images of all units of ``M_{k+1}`` by the four-case formula."""
    pi1, pi2 = p.images
    k = max(i for i, _ in pi1)
    out = {}
    for i in range(k + 1):
        for j in range(k + 1):
            if i < k and j < k:
                out[(i, j)] = pi1[(i, j)]
            elif i == j == k:
                out[(i, j)] = pi2[(k, k)]
            elif j == k:
                out[(i, j)] = pi1[(i, k - 1)] @ pi2[(k - 1, k)]
            else:
                out[(i, j)] = pi2[(k, k - 1)] @ pi1[(k - 1, j)]
    return out


def corrupted_pair_example_mk(k: int, m: int, rng: np.random.Generator) -> RepPair:
    """Negative control: the second twist mixes diagonal eigenspaces, breaking agreement."""
    size = m * (k + 1)
    return random_rep_pair_example_mk(k, m, rng=rng, w2=haar_unitary(size, rng), validate=False)


def check_example_mk(k: int, m: int = 1, trials: int = 50, seed: int = 0, corrupt: bool = False) -> Residual:
    res = Residual()
    for t, rng in enumerate(trial_rngs(seed, trials)):
        if corrupt:
            pair = corrupted_pair_example_mk(k, m, rng)
        else:
            pair = random_rep_pair_example_mk(k, m, rng=rng)
        pi = build_pi_example_mk(pair)
        r = check_star_rep(pi, k + 1, unital=True)
        r.worst_label = f"trial {t}: {r.worst_label}"
        res.merge(r)
    return res


# --- the circle-twisted pair for M_2 *_C M_2 ----------------------------------------

def _unit_circle(z: complex, tol: float = CLOSED_FORM_TOL) -> complex:
    z = complex(z)
    if abs(abs(z) - 1) > tol:
        raise ValueError(f"|z| = {abs(z)} is not 1")
    return z


def m2_pi1(z: complex, x: np.ndarray) -> np.ndarray:
    """(a, b; c, d) -> (a, b z; c z̄, d)."""
    z = _unit_circle(z)
    a, b, c, d = x[0, 0], x[0, 1], x[1, 0], x[1, 1]
    return np.array([[a, b * z], [c * z.conjugate(), d]], dtype=complex)


def m2_pi2(z: complex, x: np.ndarray) -> np.ndarray:
    """The twist of ``m2_pi1`` conjugated by the real Hadamard unitary.

    Entries are ``(a+d+bz+cz̄)/2``, ``(a-d-bz+cz̄)/2`` on the first row and
    ``(a-d+bz-cz̄)/2``, ``(a+d-bz-cz̄)/2`` on the second.
    """
    z = _unit_circle(z)
    zc = z.conjugate()
    a, b, c, d = x[0, 0], x[0, 1], x[1, 0], x[1, 1]
    return 0.5 * np.array(
        [
            [a + d + b * z + c * zc, a - d - b * z + c * zc],
            [a - d + b * z - c * zc, a + d - b * z - c * zc],
        ],
        dtype=complex,
    )


def unit_matrix(i: int, j: int, n: int = 2) -> np.ndarray:
    e = np.zeros((n, n), dtype=complex)
    e[i, j] = 1
    return e


def _on_units(rep: Callable, z: complex) -> dict:
    return {(i, j): rep(z, unit_matrix(i, j)) for i in range(2) for j in range(2)}


def pi1_m2(z: complex) -> dict:
    return _on_units(m2_pi1, z)


def pi2_m2(z: complex) -> dict:
    return _on_units(m2_pi2, z)


def check_m2_proof_identities(
    samples: int = 200,
    seed: int = 0,
    pi1: Callable = m2_pi1,
    pi2: Callable = m2_pi2,
) -> Residual:
    """Both twisted maps are unital *-representations agreeing on scalars, and
    ``pi1(e12) pi2(diag(1,-1)) = z1 e11`` and ``pi1(e11) pi2(2 e12) pi1(e11) = z2 e11``.
    """
    res = Residual()
    e11, e12 = unit_matrix(0, 0), unit_matrix(0, 1)
    flip = np.diag([1.0, -1.0]).astype(complex)
    for t, rng in enumerate(trial_rngs(seed, samples)):
        z1, z2 = np.exp(2j * np.pi * rng.random(2))
        for name, rep, z in (("pi1", pi1, z1), ("pi2", pi2, z2)):
            images = _on_units(rep, z)
            r = check_star_rep(images, 2, unital=True)
            for cls, value in r.by_class.items():
                res.record(cls, f"sample {t}: {name}", value)
        a = complex(*rng.standard_normal(2))
        scalar = a * np.eye(2)
        res.record("agreement", f"sample {t}: scalars", maxabs(pi1(z1, scalar) - pi2(z2, scalar)))
        res.record("identity", f"sample {t}: z1 e11", maxabs(pi1(z1, e12) @ pi2(z2, flip) - z1 * e11))
        res.record(
            "identity",
            f"sample {t}: z2 e11",
            maxabs(pi1(z1, e11) @ pi2(z2, 2 * e12) @ pi1(z1, e11) - z2 * e11),
        )
    return res


# --- Cuntz-Krieger relations ------------------------------------------------------

def _diagram_offsets(row: BlockRow, column_starts: list, amp: int, complement_start: int) -> dict:
    offsets = {}
    for col, idx in enumerate(row.index_ranges()):
        for t, p in enumerate(idx):
            offsets[p] = column_starts[col] + t * amp
    for t, p in enumerate(row.complement_indices()):
        offsets[p] = complement_start + t * amp
    return offsets


def _all_units(n: int) -> list:
    return [(p, q) for p in range(n) for q in range(n)]


def common_multiplicities(d: AmalgamationDiagram) -> tuple[int, int]:
    """Smallest amplifications ``(a, b)`` with ``j_i a = k_i b`` for every column."""
    top, bottom = d.rows
    g = math.gcd(top.blocks[0], bottom.blocks[0])
    a, b = bottom.blocks[0] // g, top.blocks[0] // g
    if any(x * a != y * b for x, y in d.columns()):
        raise NoFiniteRepresentation(
            f"{d.render()}: column ranks are not proportional, so no non-zero finite-dimensional "
            "pair of representations agrees on the amalgam"
        )
    return a, b


def random_rep_pair_for_diagram(
    d: AmalgamationDiagram, multiplicity: int = 1, seed: int = 0, *, rng=None
) -> RepPair:
    if len(d.rows) != 2:
        raise ValueError("two-row diagrams only")
    rng = rng if rng is not None else np.random.default_rng(seed)
    a, b = common_multiplicities(d)
    a, b = a * multiplicity, b * multiplicity
    top, bottom = d.rows
    col_dims = [x * a for x, _ in d.columns()]
    starts = list(np.cumsum([0] + col_dims[:-1]))
    dsize = sum(col_dims)
    comp_top, comp_bottom = (top.ambient_size - sum(top.blocks)) * a, (bottom.ambient_size - sum(bottom.blocks)) * b
    size = dsize + comp_top + comp_bottom
    off_top = _diagram_offsets(top, starts, a, dsize)
    off_bottom = _diagram_offsets(bottom, starts, b, dsize + comp_top)
    blocks = col_dims + ([comp_top + comp_bottom] if comp_top + comp_bottom else [])
    images = (
        _conjugate(_amplified_units(_all_units(top.ambient_size), off_top, a, size), block_unitary(blocks, rng)),
        _conjugate(_amplified_units(_all_units(bottom.ambient_size), off_bottom, b, size), block_unitary(blocks, rng)),
    )
    amalgam = tuple(
        (str(c + 1), tuple((p, p) for p in top.index_ranges()[c]), tuple((p, p) for p in bottom.index_ranges()[c]))
        for c in range(top.n)
    )
    return RepPair(size, images, amalgam)


@dataclass(frozen=True)
class FactorReps:
    """Independent representations of each factor, each on its own space.

    Every Cuntz-Krieger relation of an assignment lives in a single factor
    once vertex projections are read through the amalgam, so each relation
    can be checked in its own factor.  This is what remains checkable when
    the diagram admits no finite-dimensional representation pair.
    """

    diagram: AmalgamationDiagram
    images: tuple[dict, ...]

    def column_units(self, factor: int, column: int) -> tuple:
        return tuple((p, p) for p in self.diagram.rows[factor].index_ranges()[column])


def random_factor_reps(d: AmalgamationDiagram, multiplicity: int = 1, seed: int = 0, *, rng=None) -> FactorReps:
    rng = rng if rng is not None else np.random.default_rng(seed)
    images = []
    for row in d.rows:
        n = row.ambient_size
        size = n * multiplicity
        offsets = {p: p * multiplicity for p in range(n)}
        base = _amplified_units(_all_units(n), offsets, multiplicity, size)
        images.append(_conjugate(base, haar_unitary(size, rng)))
    return FactorReps(d, tuple(images))


def _resolve_word(images: Sequence[dict], word) -> np.ndarray:
    out = None
    for f, unit in word:
        if f >= len(images) or unit not in images[f]:
            raise UnresolvableWord(f"factor {f + 1} has no unit e{unit[0] + 1}{unit[1] + 1}")
        m = images[f][unit]
        out = m if out is None else out @ m
    return out


def _resolve_vertex(reps, vp: VertexProjection, context: int) -> np.ndarray:
    if isinstance(reps, RepPair):
        units = [u for _, u in vp.units]
        for u in units:
            if u not in reps.images[vp.factor]:
                raise UnresolvableWord(f"factor {vp.factor + 1} has no unit {u}")
        return reps.projection(vp.factor, units)
    if vp.factor == context:
        units = [u for _, u in vp.units]
    elif vp.column is not None:
        units = list(reps.column_units(context, vp.column))
    else:
        raise UnresolvableWord(f"projection of factor {vp.factor + 1} cannot be read in factor {context + 1}")
    for u in units:
        if u not in reps.images[context]:
            raise UnresolvableWord(f"factor {context + 1} has no unit {u}")
    return sum(reps.images[context][u] for u in units)


def check_ck_relations(a: CKAssignment, reps) -> Residual:
    """``S_e* S_e = P_s(e)``, ``P_v = Σ_{r(e)=v} S_e S_e*``, and the ``P_v`` orthogonal projections.

    ``reps`` is a :class:`RepPair` (one common space) or :class:`FactorReps`
    (each relation evaluated in the factor of its edges).
    """
    res = Residual()
    g = a.graph
    images = reps.images
    word_factor = {eid: {f for f, _ in word} for eid, word in a.edges.items()}
    for e in g.sorted_edges():
        ctx = a.edges[e.id][0][0]
        s = _resolve_word(images, a.edges[e.id])
        res.record("ck-source", f"{e.id}*{e.id} = P_{e.source}", maxabs(s.conj().T @ s - _resolve_vertex(reps, a.vertices[e.source], ctx)))
    for v in g.vertices:
        incoming = g.in_edges(v)
        if not incoming:
            continue
        ctxs = set().union(*(word_factor[e.id] for e in incoming))
        if isinstance(reps, FactorReps) and len(ctxs) != 1:
            raise ValueError(f"edges into {v} come from several factors; needs a common representation")
        ctx = next(iter(ctxs))
        total = sum(_resolve_word(images, a.edges[e.id]) @ _resolve_word(images, a.edges[e.id]).conj().T for e in incoming)
        res.record("ck-range", f"P_{v} = sum over r(e)={v}", maxabs(total - _resolve_vertex(reps, a.vertices[v], ctx)))
    contexts = range(len(images)) if isinstance(reps, FactorReps) else [0]
    for ctx in contexts:
        projs = {}
        for v in g.vertices:
            try:
                projs[v] = _resolve_vertex(reps, a.vertices[v], ctx)
            except UnresolvableWord:
                continue
        for v, p in projs.items():
            res.record("projection", f"P_{v}", max(maxabs(p @ p - p), maxabs(p.conj().T - p)))
            for w, q in projs.items():
                if v < w:
                    res.record("orthogonality", f"P_{v} P_{w}", maxabs(p @ q))
    return res


def check_ck_suite(a: CKAssignment, trials: int = 20, seed: int = 0, multiplicity: int = 1) -> Residual:
    """Random representations of the assignment's diagram: a common pair when one exists, else per factor."""
    res = Residual()
    d = a.spec
    try:
        common_multiplicities(d)
        common = True
    except NoFiniteRepresentation:
        common = False
    for t, rng in enumerate(trial_rngs(seed, trials)):
        reps = random_rep_pair_for_diagram(d, multiplicity, rng=rng) if common else random_factor_reps(d, multiplicity, rng=rng)
        r = check_ck_relations(a, reps)
        r.worst_label = f"trial {t}: {r.worst_label}"
        res.merge(r)
    return res


def ck_residual(graph, edge_images: dict, vertex_images: dict) -> Residual:
    """Cuntz-Krieger relations for explicit matrices on one common space."""
    res = Residual()
    for e in graph.sorted_edges():
        s = edge_images[e.id]
        res.record("ck-source", f"{e.id}*{e.id} = P_{e.source}", maxabs(s.conj().T @ s - vertex_images[e.source]))
    for v in graph.vertices:
        incoming = graph.in_edges(v)
        if incoming:
            total = sum(edge_images[e.id] @ edge_images[e.id].conj().T for e in incoming)
            res.record("ck-range", f"P_{v} = sum over r(e)={v}", maxabs(total - vertex_images[v]))
    for v, p in vertex_images.items():
        res.record("projection", f"P_{v}", max(maxabs(p @ p - p), maxabs(p.conj().T - p)))
        for w, q in vertex_images.items():
            if v < w:
                res.record("orthogonality", f"P_{v} P_{w}", maxabs(p @ q))
    return res
