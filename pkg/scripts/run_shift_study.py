#!/usr/bin/env python3
"""Selection-probability shift of the adaptive mechanism over a run.

At each iteration's first construction step this records p_max, the largest
entry of ant 0's masked transition row, and p_hat_max_prime, a Monte-Carlo
estimate of the probability that the adaptive mechanism actually picks that
city. Early in a cycle (gamma high) the estimate sits below the plain-IR
value, which is the lateral shift; as gamma anneals toward 1 the two curves
meet.

Typical use:
    python3 scripts/run_shift_study.py --iters 100 --out shift.csv
"""

import argparse
import sys
from importlib.resources import files

from antbatch.cli import main as cli_main

DEFAULT_INSTANCE = str(files("antbatch") / "data" / "rnd120.tsp")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--instance", default=DEFAULT_INSTANCE)
    ap.add_argument("--iters", type=int, default=100)
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--gamma-max", type=float, default=None)
    ap.add_argument("--gamma-min", type=float, default=None)
    ap.add_argument("--period", type=int, default=None)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    argv = ["shift-study", args.instance,
            "--iters", str(args.iters), "--trials", str(args.trials)]
    for flag in ("gamma_max", "gamma_min", "period", "seed"):
        value = getattr(args, flag)
        if value is not None:
            argv += ["--" + flag.replace("_", "-"), str(value)]
    if args.out is not None:
        argv += ["--out", args.out]
    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
