"""Decision rules for exactness and nuclearity of diagonal amalgams of matrix algebras.

Rules are tried in a fixed order inside each shape class (no amalgam, two
rows, three rows); the first match decides.  Reductions (R6, R10, T3)
classify an auxiliary diagram and splice its trace after their own step.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional

from .diagram import (
    AmalgamationDiagram,
    BlockRow,
    FreeProductSpec,
    NoAmalgam,
    Unitality,
    amalgam_extensions,
    deficit,
    dimension,
    iter_rows,
    iter_two_row_diagrams,
    min_value,
    refine_to_unital_common,
    unitality_profile,
)
from .graphalg import has_graph_shape, nonunital_row
from .structures import describe
from .verdict import OpenKind, RuleApplication, Status, Verdict

Step = RuleApplication.of


def _done(status: Status, trace, open_kind: Optional[OpenKind] = None) -> Verdict:
    return Verdict(status, tuple(trace), open_kind)


def _unital_pair(d: AmalgamationDiagram) -> Verdict:
    mv, n = min_value(d), dimension(d)
    if mv >= 3:
        trace = [Step("R1", d, conclusion=Status.NOT_EXACT)]
        if n >= 3:
            trace.append(Step("R2", d, conclusion=Status.NOT_EXACT))
        return _done(Status.NOT_EXACT, trace)
    # mv == 2 here: the minimum value is never 1 and n <= mv
    if n == 2:
        if has_graph_shape(d):
            return _done(Status.NUCLEAR, [Step("R3", d, conclusion=Status.NUCLEAR)])
        return _done(Status.OPEN, [Step("R3X", d, conclusion=Status.OPEN)], OpenKind.GAP)
    j, k = d.sizes
    if j == k == 2:
        return _done(Status.NOT_EXACT, [Step("R4", d, conclusion=Status.NOT_EXACT)])
    return _done(Status.OPEN, [Step("R5", d, conclusion=Status.OPEN)], OpenKind.GAP)


def _mixed_pair(d: AmalgamationDiagram) -> Verdict:
    i, row = nonunital_row(d)
    corner = sum(row.blocks)
    if corner == 1:
        return _done(Status.NUCLEAR, [Step("R6.corner", d, conclusion=Status.NUCLEAR)])
    rows = list(d.rows)
    rows[i] = BlockRow(corner, row.blocks)
    reduced = AmalgamationDiagram(tuple(rows))
    sub = _classify(reduced)
    return _done(sub.status, [Step("R6", d, derived=reduced)] + list(sub.trace), sub.open_kind)


def _nonunital_pair(d: AmalgamationDiagram) -> Verdict:
    n = dimension(d)
    if n >= 2:
        return _done(Status.NOT_EXACT, [Step("R7", d, conclusion=Status.NOT_EXACT)])
    if any(deficit(r) >= 2 for r in d.rows):
        return _done(Status.NOT_EXACT, [Step("R8", d, conclusion=Status.NOT_EXACT)])
    if min(r.blocks[0] for r in d.rows) == 1:
        return _done(Status.OPEN, [Step("R9", d, conclusion=Status.OPEN)], OpenKind.STATED)
    refined, _ = refine_to_unital_common(d)
    sub = _classify(refined)
    if sub.status is Status.NOT_EXACT:
        return _done(Status.NOT_EXACT, [Step("R10", d, derived=refined)] + list(sub.trace))
    return _done(Status.OPEN, [Step("R10.open", d, conclusion=Status.OPEN)], OpenKind.GAP)


def _two_rows(d: AmalgamationDiagram) -> Verdict:
    kind = unitality_profile(d).kind
    if kind is Unitality.ALL:
        return _unital_pair(d)
    if kind is Unitality.MIXED:
        return _mixed_pair(d)
    return _nonunital_pair(d)


def _three_rows(d: AmalgamationDiagram) -> Verdict:
    pairs = [(0, 1), (0, 2), (1, 2)]
    if unitality_profile(d).kind is Unitality.ALL:
        if any(min_value(d.pair(a, b)) >= 3 for a, b in pairs):
            why = "T1.reorder"
        elif dimension(d) == 2:
            why = "T1.embed"
        else:
            why = "T1.quotient"
        return _done(
            Status.NOT_EXACT,
            [Step(why, d, conclusion=Status.NOT_EXACT), Step("T1", d, conclusion=Status.NOT_EXACT)],
        )
    if all(s == 2 for s in d.sizes):
        return _done(Status.NOT_EXACT, [Step("T2", d, conclusion=Status.NOT_EXACT)])
    for a, b in pairs:
        p = d.pair(a, b)
        sub = _classify(p)
        if sub.status is Status.NOT_EXACT:
            return _done(Status.NOT_EXACT, [Step("T3", d, derived=p)] + list(sub.trace))
    return _done(Status.OPEN, [Step("T3.open", d, conclusion=Status.OPEN)], OpenKind.GAP)


@lru_cache(maxsize=None)
def _classify(s: FreeProductSpec) -> Verdict:
    if isinstance(s, NoAmalgam):
        return _done(Status.NOT_EXACT, [Step("R0", s, conclusion=Status.NOT_EXACT)])
    if len(s.rows) == 2:
        return _two_rows(s)
    return _three_rows(s)


def classify(s: FreeProductSpec) -> Verdict:
    """Classify ``s`` as nuclear, not exact, or open, with a proof trace."""
    v = _classify(s)
    return replace(v, structure=describe(s, v))


# --- consistency oracle ------------------------------------------------------------

@dataclass(frozen=True)
class MonotonicityViolation:
    fine: FreeProductSpec
    coarse: AmalgamationDiagram


@dataclass(frozen=True)
class MonotonicityReport:
    pairs_checked: int
    violations: tuple[MonotonicityViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def monotonicity_check(max_size: int, max_dim: Optional[int] = None) -> MonotonicityReport:
    """Search for a non-exact quotient over a larger amalgam under a nuclear source.

    For every two-row diagram ``d`` (and the amalgam-free product on the
    same factors) and every diagram whose amalgam contains ``d``'s, the
    source may not be Nuclear when the quotient is NotExact.
    """
    violations, checked = [], 0
    seen_sizes = set()
    for d in iter_two_row_diagrams(max_size, max_dim):
        fine = _classify(d)
        for c in amalgam_extensions(d):
            if c == d:
                continue
            checked += 1
            if fine.status is Status.NUCLEAR and _classify(c).status is Status.NOT_EXACT:
                violations.append(MonotonicityViolation(d, c))
        if d.sizes not in seen_sizes:
            seen_sizes.add(d.sizes)
    for sizes in sorted(seen_sizes):
        free = _classify(NoAmalgam(sizes))
        for n in range(1, (max_dim or max_size) + 1):
            for a in iter_rows(sizes[0], n):
                for b in iter_rows(sizes[1], n):
                    checked += 1
                    c = AmalgamationDiagram((a, b))
                    if free.status is Status.NUCLEAR and _classify(c).status is Status.NOT_EXACT:
                        violations.append(MonotonicityViolation(NoAmalgam(sizes), c))
    return MonotonicityReport(checked, tuple(violations))
