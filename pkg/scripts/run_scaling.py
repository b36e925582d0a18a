#!/usr/bin/env python3
"""Batched-vs-sequential runtime grid on the bundled 442-city instance.

Runs the scaling study over a sweep of colony sizes in both execution modes
and writes one CSV row per (instance, m, mode) cell. The sequential cells use
the plain-loop reference implementation, so large colony sizes take a while;
pass --budget-ms to have oversized cells skipped with an exceeded_budget
marker instead of running them out.

Typical use:
    python3 scripts/run_scaling.py --ants 64,128,442 --out scaling.csv
"""

import argparse
import sys
from importlib.resources import files

from antbatch.cli import main as cli_main

DEFAULT_INSTANCE = str(files("antbatch") / "data" / "rnd442.tsp")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--instances", nargs="+", default=[DEFAULT_INSTANCE])
    ap.add_argument("--ants", default="64,128,442",
                    help="comma-separated colony sizes")
    ap.add_argument("--mode", choices=["batched", "sequential", "both"],
                    default="both")
    ap.add_argument("--iterations", type=int, default=3)
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--selection", choices=["rw", "ir", "adair"], default="ir")
    ap.add_argument("--budget-ms", type=float, default=None)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    argv = ["scaling", "--instances", *args.instances,
            "--ants", args.ants, "--mode", args.mode,
            "--iterations", str(args.iterations), "--reps", str(args.reps),
            "--seed", str(args.seed), "--selection", args.selection]
    if args.budget_ms is not None:
        argv += ["--budget-ms", str(args.budget_ms)]
    if args.out is not None:
        argv += ["--out", args.out]
    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
