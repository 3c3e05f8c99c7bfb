"""Exactness and nuclearity of amalgamated free products of matrix algebras over diagonal subalgebras."""
from .classifier import classify, monotonicity_check
from .diagram import AmalgamationDiagram, BlockRow, NoAmalgam, parse_diagram, render_diagram
from .verdict import OpenKind, Status, Verdict

__all__ = [
    "AmalgamationDiagram",
    "BlockRow",
    "NoAmalgam",
    "OpenKind",
    "Status",
    "Verdict",
    "classify",
    "monotonicity_check",
    "parse_diagram",
    "render_diagram",
]
