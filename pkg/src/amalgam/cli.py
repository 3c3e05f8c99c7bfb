"""Command-line interface: ``amalgam {classify,graph,verify,enumerate,parse}``.

Exit codes: 0 nuclear (or success), 3 not exact, 4 open, 2 input error,
1 when a graph is requested for a spec without one or a suite fails.
"""
from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from typing import Optional

from . import oracle
from .classifier import classify, monotonicity_check
from .diagram import (
    AmalgamationDiagram,
    DiagramError,
    NoAmalgam,
    deficit,
    dimension,
    iter_three_row_diagrams,
    iter_two_row_diagrams,
    min_value,
    parse_diagram,
    row_min_value,
    unitality_profile,
)
from .graphalg import NotApplicable, ck_assignment, to_dot
from .structures import normalize, to_json, to_text
from .verdict import Status, Verdict

SCHEMA = "amalgam-report/1"
EXIT_CODES = {Status.NUCLEAR: 0, Status.NOT_EXACT: 3, Status.OPEN: 4}
EXIT_INPUT = 2
EXIT_FAIL = 1


def exit_code(v: Verdict) -> int:
    return EXIT_CODES[v.status]


def _graph_dot(spec) -> Optional[str]:
    try:
        return to_dot(ck_assignment(spec).graph)
    except NotApplicable:
        return None


def build_report(spec, v: Verdict) -> dict:
    structure = normalize(v.structure) if v.structure is not None else None
    return {
        "schema": SCHEMA,
        "input": spec.render(),
        "status": v.status.value,
        "open_kind": v.open_kind.value if v.open_kind else None,
        "rule": v.rule,
        "trace": [
            {"rule": s.rule, "citation": s.citation, "derived": s.derived.render() if s.derived is not None else None}
            for s in v.trace
        ],
        "structure": to_json(structure) if structure is not None else None,
        "structure_text": to_text(structure) if structure is not None else None,
        "graph": _graph_dot(spec) if v.status is Status.NUCLEAR else None,
    }


def report_text(r: dict) -> str:
    lines = [f"input:  {r['input']}"]
    status = r["status"] + (f" ({r['open_kind']})" if r["open_kind"] else "")
    lines.append(f"status: {status}")
    lines.append("trace:")
    for i, s in enumerate(r["trace"], start=1):
        lines.append(f"  {i}. {s['rule']}: {s['citation']}")
        if s["derived"]:
            lines.append(f"     -> {s['derived']}")
    if r["structure_text"]:
        lines.append(f"structure: {r['structure_text']}")
    if r["graph"]:
        lines.append("graph:")
        lines.extend("  " + x for x in r["graph"].rstrip("\n").split("\n"))
    return "\n".join(lines)


def _parse_or_report(text: str, fmt: str):
    try:
        return parse_diagram(text)
    except DiagramError as exc:
        payload = {"schema": SCHEMA, "input": text, "error": str(exc),
                   "line": getattr(exc, "line", 1), "column": getattr(exc, "column", None)}
        if fmt == "json":
            print(json.dumps(payload, indent=2))
        else:
            print(f"error: {exc}", file=sys.stderr)
        return None


# --- subcommands -------------------------------------------------------------------

def cmd_classify(args) -> int:
    spec = _parse_or_report(args.input, args.format)
    if spec is None:
        return EXIT_INPUT
    v = classify(spec)
    r = build_report(spec, v)
    print(json.dumps(r, indent=2, ensure_ascii=False) if args.format == "json" else report_text(r))
    return exit_code(v)


def cmd_graph(args) -> int:
    spec = _parse_or_report(args.input, args.format)
    if spec is None:
        return EXIT_INPUT
    try:
        a = ck_assignment(spec)
    except NotApplicable as exc:
        if args.format == "json":
            print(json.dumps({"schema": SCHEMA, "input": spec.render(), "error": str(exc)}, indent=2))
        else:
            print(f"not applicable: {exc}", file=sys.stderr)
        return EXIT_FAIL
    dot = to_dot(a.graph)
    if args.format == "json":
        print(json.dumps({"schema": SCHEMA, "input": spec.render(), "graph": dot}, indent=2))
    else:
        sys.stdout.write(dot)
    return 0


def graph_diagrams(max_size: int = 5) -> list:
    """Two-row diagrams up to ``max_size`` carrying a Cuntz-Krieger assignment, in canonical order."""
    out = []
    for d in iter_two_row_diagrams(max_size):
        try:
            out.append(ck_assignment(d))
        except NotApplicable:
            continue
    return sorted(out, key=lambda a: a.spec.render())


def run_suites(suite: str, k=None, m=None, trials=None, seed=0, tolerance=None, diagram=None) -> list:
    reports = []
    random_tol = tolerance if tolerance is not None else oracle.RANDOM_TOL
    if suite in ("mk", "all"):
        ks = [k] if k is not None else list(range(2, 7))
        ms = [m] if m is not None else [1, 2]
        for kk in ks:
            for mm in ms:
                t = trials or 50
                r = oracle.check_example_mk(kk, mm, t, seed)
                reports.append(oracle.SuiteReport(f"mk(k={kk},m={mm})", t, seed, r, random_tol))
    if suite in ("m2", "all"):
        t = trials or 200
        r = oracle.check_m2_proof_identities(t, seed)
        tol = tolerance if tolerance is not None else oracle.CLOSED_FORM_TOL
        reports.append(oracle.SuiteReport("m2", t, seed, r, tol))
    if suite in ("ck", "all"):
        t = trials or 20
        assignments = [ck_assignment(diagram)] if diagram is not None else graph_diagrams(5)
        for a in assignments:
            r = oracle.check_ck_suite(a, t, seed)
            reports.append(oracle.SuiteReport(f"ck({a.spec.render()})", t, seed, r, random_tol))
    return reports


def cmd_verify(args) -> int:
    if args.k is not None and args.k < 2:
        print("error: --k must be at least 2", file=sys.stderr)
        return EXIT_INPUT
    if args.m is not None and args.m < 1:
        print("error: --m must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    if args.trials is not None and args.trials < 1:
        print("error: --trials must be positive", file=sys.stderr)
        return EXIT_INPUT
    diagram = None
    if args.diagram:
        diagram = _parse_or_report(args.diagram, args.format)
        if diagram is None:
            return EXIT_INPUT
    try:
        reports = run_suites(args.suite, args.k, args.m, args.trials, args.seed, args.tolerance, diagram)
    except NotApplicable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    ok = all(r.passed for r in reports)
    if args.format == "json":
        print(json.dumps({"schema": SCHEMA, "residuals": [r.to_json() for r in reports], "pass": ok}, indent=2))
    else:
        for r in reports:
            mark = "PASS" if r.passed else "FAIL"
            print(f"{mark}  {r.suite:<28} trials={r.trials:<4} worst={r.residual.worst:.3e}  {r.residual.worst_label}")
    return 0 if ok else EXIT_FAIL


def enumerate_specs(max_size: int, max_dim: Optional[int] = None, three_rows: bool = False) -> list:
    specs = list(iter_two_row_diagrams(max_size, max_dim))
    if three_rows:
        specs += list(iter_three_row_diagrams(max_size, max_dim))
    specs += [NoAmalgam((j, k)) for j in range(2, max_size + 1) for k in range(2, max_size + 1)]
    return sorted(specs, key=lambda s: s.render())


def open_inventory(entries) -> dict:
    """Open verdicts grouped by ``open_kind/rule`` (the terminal rule names the family)."""
    groups: dict = {}
    for spec, v in entries:
        if v.status is Status.OPEN:
            groups.setdefault(f"{v.open_kind.value}/{v.rule}", []).append(spec.render())
    return dict(sorted(groups.items()))


def cmd_enumerate(args) -> int:
    specs = enumerate_specs(args.max_size, args.max_dim, args.three_rows)
    entries = [(s, classify(s)) for s in specs]
    mono = monotonicity_check(args.max_size, args.max_dim)
    inventory = open_inventory(entries)
    counts = Counter(v.status.value for _, v in entries)
    if args.format == "json":
        print(json.dumps({
            "schema": SCHEMA,
            "rows": [{"input": s.render(), "status": v.status.value,
                      "open_kind": v.open_kind.value if v.open_kind else None, "rule": v.rule}
                     for s, v in entries],
            "counts": dict(sorted(counts.items())),
            "monotonicity": {"pairs_checked": mono.pairs_checked,
                             "violations": [[x.fine.render(), x.coarse.render()] for x in mono.violations]},
            "open_inventory": inventory,
        }, indent=2))
        return 0
    width = max(len(s.render()) for s, _ in entries)
    for s, v in entries:
        status = v.status.value + (f"({v.open_kind.value})" if v.open_kind else "")
        print(f"{s.render():<{width}}  {status:<20} {v.rule}")
    print()
    print("counts: " + ", ".join(f"{k}={n}" for k, n in sorted(counts.items())))
    print(f"monotonicity: {mono.pairs_checked} pairs checked, {len(mono.violations)} violations")
    for x in mono.violations:
        print(f"  nuclear {x.fine.render()} over not-exact {x.coarse.render()}")
    print("open inventory:")
    for family, members in inventory.items():
        print(f"  {family}: {len(members)}")
    return 0


def cmd_parse(args) -> int:
    spec = _parse_or_report(args.input, args.format)
    if spec is None:
        return EXIT_INPUT
    info = {"schema": SCHEMA, "input": spec.render(), "kind": type(spec).__name__}
    if isinstance(spec, AmalgamationDiagram):
        prof = unitality_profile(spec)
        info.update(
            dimension=dimension(spec),
            min_value=min_value(spec),
            row_min_value=row_min_value(spec),
            deficits=[deficit(r) for r in spec.rows],
            unitality=prof.kind.value,
        )
    if args.format == "json":
        print(json.dumps(info, indent=2))
    else:
        for key, value in info.items():
            if key != "schema":
                print(f"{key}: {value}")
    return 0


# --- argument parsing --------------------------------------------------------------

def _add_globals(p, defaults: bool):
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--format", choices=["text", "json"], default=d("text"))
    p.add_argument("--tolerance", type=float, default=d(None), help="override the pass threshold")
    p.add_argument("--seed", type=int, default=d(0))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="amalgam", description=__doc__.splitlines()[0])
    _add_globals(parser, True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify a diagram and print its proof trace")
    p.add_argument("input")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("graph", help="DOT output of the Cuntz-Krieger graph")
    p.add_argument("input")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("verify", help="run numerical verification suites")
    p.add_argument("suite", choices=["mk", "m2", "ck", "all"])
    p.add_argument("--k", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--diagram", help="restrict the ck suite to one diagram")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("enumerate", help="classify every diagram up to a size bound")
    p.add_argument("--max-size", type=int, default=4)
    p.add_argument("--max-dim", type=int)
    p.add_argument("--three-rows", action="store_true", help="include three-factor diagrams")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("parse", help="validate a diagram and print its invariants")
    p.add_argument("input")
    p.set_defaults(func=cmd_parse)

    for name in ("classify", "graph", "verify", "enumerate", "parse"):
        _add_globals(sub.choices[name], False)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
