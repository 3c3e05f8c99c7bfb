"""Run every numerical suite and print one residual line per suite."""
import argparse
import json
import sys

from amalgam.cli import run_suites


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, help="override per-suite trial counts")
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    reports = run_suites("all", trials=args.trials, seed=args.seed)
    if args.json:
        print(json.dumps([r.to_json() for r in reports], indent=2))
    else:
        for r in reports:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.suite:<28} worst={r.residual.worst:.2e}  tol={r.tolerance:g}")
        print(f"{sum(r.passed for r in reports)}/{len(reports)} suites passed")
    return 0 if all(r.passed for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
