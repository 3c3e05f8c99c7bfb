"""Classify every diagram up to a size bound and write the open inventory as JSON."""
import argparse
import json
import time
from collections import Counter

from amalgam.classifier import classify, monotonicity_check
from amalgam.cli import enumerate_specs, open_inventory


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-size", type=int, default=6)
    ap.add_argument("--max-dim", type=int)
    ap.add_argument("--two-rows-only", action="store_true")
    ap.add_argument("--out", help="write the JSON summary here instead of stdout")
    args = ap.parse_args()

    t0 = time.perf_counter()
    specs = enumerate_specs(args.max_size, args.max_dim, three_rows=not args.two_rows_only)
    entries = [(s, classify(s)) for s in specs]
    rules = Counter(v.rule for _, v in entries)
    mono = monotonicity_check(min(args.max_size, 5), args.max_dim)
    summary = {
        "max_size": args.max_size,
        "specs": len(specs),
        "status_counts": dict(sorted(Counter(v.status.value for _, v in entries).items())),
        "terminal_rules": dict(sorted(rules.items())),
        "monotonicity": {"pairs_checked": mono.pairs_checked, "violations": len(mono.violations)},
        "open_inventory": open_inventory(entries),
        "seconds": round(time.perf_counter() - t0, 2),
    }
    text = json.dumps(summary, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        sizes = {k: len(v) for k, v in summary["open_inventory"].items()}
        print(f"{len(specs)} specs, open families {sizes}, written to {args.out}")
    else:
        print(text)


if __name__ == "__main__":
    main()
