"""Execution time of the two solver backends across run counts.

Usage: python scripts/reproduce_table1.py [--runs 50 500 ...] [--seed 0] [--json out.json]
"""

import argparse
import json

from rtpose import bench_eval


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, nargs="+", default=[50, 500, 5000, 50000, 500000])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", help="also write the reports to this file")
    args = ap.parse_args()

    reports = [bench_eval.run_bench(n, args.seed) for n in args.runs]
    print(bench_eval.format_bench_table(reports))
    print()
    print(f"backend agreement, 10k random measurements: {bench_eval.accuracy_sweep(10000, args.seed):.2e} m")
    print(f"near-degenerate band, 10k measurements:     "
          f"{bench_eval.accuracy_sweep(10000, args.seed, near_degenerate=True):.2e} m")
    if args.json:
        with open(args.json, "w") as f:
            json.dump([r.to_dict() for r in reports], f, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()
