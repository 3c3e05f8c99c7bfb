"""Verdicts, proof traces and the fixed rule catalog they cite."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .diagram import FreeProductSpec


class Status(Enum):
    NUCLEAR = "nuclear"
    NOT_EXACT = "not_exact"
    OPEN = "open"


class OpenKind(Enum):
    STATED = "stated"  # a recognized unresolved case
    GAP = "gap"  # no known result reaches the case


# rule id -> citation; every trace step cites exactly one of these
RULES: dict[str, str] = {
    "R0": "M_j * M_k without amalgamation is not exact for j, k >= 2 (threefold products contain a twofold one)",
    "R1": "unital diagonal amalgam, minimum value of the diagram >= 3: not exact (a common M_3-type corner over a 3-dimensional diagonal embeds)",
    "R2": "unital diagonal amalgam with dim D >= 3: not exact",
    "R3": "unital amalgam, dim D = 2, minimum value 2: isomorphic to C*(G) for the two-vertex graph G, hence nuclear",
    "R3X": "dim D = 2 with columnwise minimum value 2, but neither factor pairing carries the two-vertex Cuntz-Krieger family (row minima sum to more than 2): no stated result applies",
    "R4": "unital M_2 *_C M_2 is not exact (its image under the circle-twisted representation pair contains C(T) *_C C(T))",
    "R5": "unital M_2 *_C M_k with k >= 3: outside the unital case analysis",
    "R6": "D unital in one factor only: M_j *_D M_k is exact iff M_j *_D M_{k-k(D)} is, and then nuclear (reduce the non-unital factor to the corner of the amalgam unit)",
    "R6.corner": "the reduced corner is scalar: M_j *_C A with a rank-one non-unital embedding is M_j(A), nuclear for A = M_k",
    "R7": "D non-unital in both factors with dim D >= 2: not exact (quotient onto M_3 *_{C^3} M_3)",
    "R8": "D non-unital in both factors with a zero box of size >= 2: not exact (contains C * (C + C), whose unitization is C*(Z_2 * Z_3))",
    "R9": "M_2:[1][0] against M_k:[k-1][0]: a recognized unresolved case",
    "R10": "generalized: the canonical surjection A *_D B -> A *_C B for D inside C: a non-exact quotient over the largest unital common refinement forces A *_D B to be non-exact",
    "R10.open": "generalized: the unital common refinement is not known to be non-exact: no stated result applies",
    "T1": "M_j *_D M_k *_D M_l with D unital in all three factors is not exact",
    "T1.reorder": "some pair of factors has minimum value >= 3 and the free product may be reordered (M_j *_D M_k *_D M_l = M_j *_D M_l *_D M_k), so that pair embeds",
    "T1.embed": "dim D = 2: M_2 *_{C^2} M_2 *_{C^2} M_2, isomorphic to M_2(C(T) *_C C(T)), embeds",
    "T1.quotient": "dim D = 1: a non-exact quotient over a larger common amalgam passes back to the larger algebra",
    "T2": "M_2 *_D M_2 *_D M_2 is not exact for every diagonal D",
    "T3": "a non-exact pair of factors embeds in the threefold product",
    "T3.open": "no pair of factors is known to be non-exact: no stated result applies",
}


@dataclass(frozen=True)
class RuleApplication:
    rule: str
    citation: str
    input: FreeProductSpec
    derived: Optional[FreeProductSpec] = None
    conclusion: Optional[Status] = None

    @classmethod
    def of(cls, rule: str, input: FreeProductSpec, derived=None, conclusion=None) -> "RuleApplication":
        return cls(rule, RULES[rule], input, derived, conclusion)


@dataclass(frozen=True)
class Verdict:
    status: Status
    trace: tuple[RuleApplication, ...]
    open_kind: Optional[OpenKind] = None
    structure: Optional[object] = None  # an AlgebraExpr

    def __post_init__(self):
        if (self.status is Status.OPEN) != (self.open_kind is not None):
            raise ValueError("open_kind is required exactly for open verdicts")
        if not self.trace:
            raise ValueError("a verdict needs a non-empty trace")

    @property
    def rule(self) -> str:
        """Id of the terminal rule."""
        return self.trace[-1].rule


def trace_is_valid(spec: FreeProductSpec, trace: tuple[RuleApplication, ...]) -> bool:
    if not trace or trace[0].input != spec:
        return False
    for prev, step in zip(trace, trace[1:]):
        expected = prev.derived if prev.derived is not None else prev.input
        if step.input != expected:
            return False
    for step in trace:
        if RULES.get(step.rule) != step.citation:
            return False
    return trace[-1].conclusion is not None
