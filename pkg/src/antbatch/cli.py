"""Command-line front end.

Subcommands: solve (one experiment, per-iteration CSV), scaling (batched vs
sequential runtime grid), shift-study (selection probability shift under the
adaptive mechanism), convergence (three-mechanism ablation on one instance).
Exit status 0 on success; structured errors print one line to stderr and
exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .bench import (
    ExperimentConfig,
    SCALING_COLUMNS,
    SHIFT_COLUMNS,
    config_from_dict,
    load_instance,
    run_experiment,
    run_probability_shift_study,
    run_scaling_study,
    summary_json_text,
    write_dict_csv,
    write_records_csv,
)
from .colony import NumericalUnderflow
from .model import AcoParams, DegenerateInstance, GammaSchedule, Selection
from .oracle import InstanceTooLarge
from .selection import AllZeroWeights
from .tsplib import TsplibParseError

_ERRORS = (TsplibParseError, DegenerateInstance, NumericalUnderflow,
           AllZeroWeights, InstanceTooLarge, ValueError, OSError)

# Time-limited runs still need an iteration cap for record bookkeeping.
_TIME_LIMIT_ITER_CAP = 1_000_000


def _open_out(path: str, newline: str | None = None):
    """Open an output file for writing, creating parent directories."""
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    return open(path, "w", encoding="utf-8", newline=newline)


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ants", type=int, default=None, metavar="M")
    p.add_argument("--elite", type=int, default=None, metavar="K")
    p.add_argument("--alpha", type=float, default=None, metavar="A")
    p.add_argument("--beta", type=float, default=None, metavar="B")
    p.add_argument("--rho", type=float, default=None, metavar="R")
    p.add_argument("--gamma-max", type=float, default=None, metavar="X")
    p.add_argument("--gamma-min", type=float, default=None, metavar="Y")
    p.add_argument("--period", type=int, default=None, metavar="P")
    p.add_argument("--seed", type=int, default=None, metavar="S")


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="antbatch", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run one experiment on an instance")
    solve.add_argument("instance", help="TSPLIB .tsp file")
    _add_param_flags(solve)
    solve.add_argument("--selection", choices=[s.value for s in Selection],
                       default=None)
    stop = solve.add_mutually_exclusive_group()
    stop.add_argument("--iters", type=int, default=None, metavar="N")
    stop.add_argument("--time-limit", type=float, default=None, metavar="SECONDS")
    solve.add_argument("--reps", type=int, default=None, metavar="R")
    solve.add_argument("--out", default=None, metavar="FILE.csv")
    solve.add_argument("--summary", default=None, metavar="FILE.json")
    solve.add_argument("--config", default=None, metavar="FILE.json",
                       help="experiment config file; explicit flags override it")
    solve.add_argument("--best-known", type=float, default=None)
    solve.add_argument("--lenient", action="store_true")
    solve.add_argument("--chunk-size", type=int, default=None)

    scaling = sub.add_parser("scaling", help="batched vs sequential timing grid")
    scaling.add_argument("--instances", nargs="+", required=True,
                         metavar="FILE.tsp")
    scaling.add_argument("--ants", required=True,
                         help="comma-separated colony sizes, e.g. 64,442,1000")
    scaling.add_argument("--mode", choices=["batched", "sequential", "both"],
                         default="both")
    scaling.add_argument("--iterations", type=int, default=3)
    scaling.add_argument("--reps", type=int, default=3)
    scaling.add_argument("--seed", type=int, default=0)
    scaling.add_argument("--selection", choices=[s.value for s in Selection],
                         default=Selection.IR.value)
    scaling.add_argument("--budget-ms", type=float, default=None)
    scaling.add_argument("--lenient", action="store_true")
    scaling.add_argument("--out", default=None, metavar="FILE.csv")

    shift = sub.add_parser("shift-study",
                           help="selection-probability shift under the "
                                "adaptive mechanism")
    shift.add_argument("instance")
    _add_param_flags(shift)
    shift.add_argument("--iters", type=int, default=50, metavar="N")
    shift.add_argument("--trials", type=int, default=10_000)
    shift.add_argument("--lenient", action="store_true")
    shift.add_argument("--out", default=None, metavar="FILE.csv")

    conv = sub.add_parser("convergence",
                          help="rw/ir/adair ablation on one instance")
    conv.add_argument("instance")
    _add_param_flags(conv)
    conv.add_argument("--iters", type=int, default=200, metavar="N")
    conv.add_argument("--reps", type=int, default=5, metavar="R")
    conv.add_argument("--best-known", type=float, default=None)
    conv.add_argument("--lenient", action="store_true")
    conv.add_argument("--out-prefix", default="convergence",
                      metavar="PREFIX", help="writes PREFIX_<mechanism>.csv/.json")
    return top


def _schedule_from_args(args, max_iters: int) -> GammaSchedule:
    base = GammaSchedule()
    return GammaSchedule(
        gamma_max=args.gamma_max if args.gamma_max is not None else base.gamma_max,
        gamma_min=args.gamma_min if args.gamma_min is not None else base.gamma_min,
        period=args.period if args.period is not None else max_iters,
    )


def _params_from_args(args, n: int, selection: Selection,
                      max_iters: int) -> AcoParams:
    m = args.ants if args.ants is not None else n
    return AcoParams(
        m=m,
        k=args.elite if args.elite is not None else max(1, m // 10),
        alpha=args.alpha if args.alpha is not None else 1.0,
        beta=args.beta if args.beta is not None else 2.0,
        rho=args.rho if args.rho is not None else 0.1,
        selection=selection,
        gamma_schedule=_schedule_from_args(args, max_iters),
        max_iters=max_iters,
        seed=args.seed if args.seed is not None else 0,
    )


def _peek_dimension(path: str, lenient: bool) -> int:
    cfg = ExperimentConfig(params=AcoParams(m=1, k=1), instance_path=path,
                           lenient=lenient)
    return load_instance(cfg).n


def _cmd_solve(args) -> int:
    if args.config is not None:
        with open(args.config, "r", encoding="utf-8") as f:
            config = config_from_dict(json.load(f))
        # Flags given on the command line take precedence over the file.
        from dataclasses import replace
        p = config.params
        max_iters = args.iters if args.iters is not None else p.max_iters
        sched = GammaSchedule(
            gamma_max=(args.gamma_max if args.gamma_max is not None
                       else p.gamma_schedule.gamma_max),
            gamma_min=(args.gamma_min if args.gamma_min is not None
                       else p.gamma_schedule.gamma_min),
            period=(args.period if args.period is not None
                    else p.gamma_schedule.period),
        )
        p = replace(
            p,
            m=args.ants if args.ants is not None else p.m,
            k=args.elite if args.elite is not None else p.k,
            alpha=args.alpha if args.alpha is not None else p.alpha,
            beta=args.beta if args.beta is not None else p.beta,
            rho=args.rho if args.rho is not None else p.rho,
            selection=(Selection(args.selection) if args.selection is not None
                       else p.selection),
            gamma_schedule=sched,
            max_iters=max_iters,
            seed=args.seed if args.seed is not None else p.seed,
        )
        config = replace(
            config,
            params=p,
            instance_path=args.instance,
            synthetic=None,
            repetitions=args.reps if args.reps is not None else config.repetitions,
            time_limit_seconds=(args.time_limit if args.time_limit is not None
                                else config.time_limit_seconds),
            output_path=args.out if args.out is not None else config.output_path,
            summary_path=(args.summary if args.summary is not None
                          else config.summary_path),
            best_known=(args.best_known if args.best_known is not None
                        else config.best_known),
            lenient=args.lenient or config.lenient,
            chunk_size=(args.chunk_size if args.chunk_size is not None
                        else config.chunk_size),
        )
    else:
        n = _peek_dimension(args.instance, args.lenient)
        selection = (Selection(args.selection) if args.selection is not None
                     else Selection.ADAIR)
        if args.time_limit is not None:
            max_iters = _TIME_LIMIT_ITER_CAP
        else:
            max_iters = args.iters if args.iters is not None else 1000
        config = ExperimentConfig(
            params=_params_from_args(args, n, selection, max_iters),
            instance_path=args.instance,
            repetitions=args.reps if args.reps is not None else 1,
            time_limit_seconds=args.time_limit,
            output_path=args.out,
            summary_path=args.summary,
            best_known=args.best_known,
            lenient=args.lenient,
            chunk_size=args.chunk_size,
        )

    inst = load_instance(config)
    records, summaries = run_experiment(config, inst)

    if config.output_path:
        with _open_out(config.output_path, newline="") as f:
            write_records_csv(records, f)
    else:
        write_records_csv(records, sys.stdout)
    if config.summary_path:
        with _open_out(config.summary_path) as f:
            f.write(summary_json_text(config, inst, summaries))
    if config.output_path:
        best = min(s.final_best_cost for s in summaries)
        err = min((s.solution_error_percent for s in summaries
                   if s.solution_error_percent is not None), default=None)
        line = (f"wrote {len(records)} records to {config.output_path}; "
                f"best cost {best:.6g}")
        if err is not None:
            line += f" (error {err:.3f}%)"
        print(line)
    return 0


def _cmd_scaling(args) -> int:
    sizes = [int(tok) for tok in args.ants.split(",") if tok.strip()]
    if not sizes:
        raise ValueError("--ants needs at least one colony size")
    instances = []
    for path in args.instances:
        cfg = ExperimentConfig(params=AcoParams(m=1, k=1), instance_path=path,
                               lenient=args.lenient)
        instances.append(load_instance(cfg))
    rows = run_scaling_study(
        instances, sizes, args.mode, iterations=args.iterations,
        repetitions=args.reps, seed=args.seed,
        selection=Selection(args.selection), budget_ms=args.budget_ms)
    if args.out:
        with _open_out(args.out, newline="") as f:
            write_dict_csv(rows, SCALING_COLUMNS, f)
        print(f"wrote {len(rows)} rows to {args.out}")
    else:
        write_dict_csv(rows, SCALING_COLUMNS, sys.stdout)
    return 0


def _cmd_shift(args) -> int:
    n = _peek_dimension(args.instance, args.lenient)
    params = _params_from_args(args, n, Selection.ADAIR, args.iters)
    cfg = ExperimentConfig(params=params, instance_path=args.instance,
                           lenient=args.lenient)
    inst = load_instance(cfg)
    rows = run_probability_shift_study(inst, params, args.iters,
                                       trials=args.trials)
    if args.out:
        with _open_out(args.out, newline="") as f:
            write_dict_csv(rows, SHIFT_COLUMNS, f)
        print(f"wrote {len(rows)} rows to {args.out}")
    else:
        write_dict_csv(rows, SHIFT_COLUMNS, sys.stdout)
    return 0


def _cmd_convergence(args) -> int:
    from dataclasses import replace

    n = _peek_dimension(args.instance, args.lenient)
    base = _params_from_args(args, n, Selection.ADAIR, args.iters)
    report = []
    inst = None
    for mech in (Selection.RW, Selection.IR, Selection.ADAIR):
        params = replace(base, selection=mech)
        config = ExperimentConfig(
            params=params, instance_path=args.instance,
            repetitions=args.reps, best_known=args.best_known,
            lenient=args.lenient,
            output_path=f"{args.out_prefix}_{mech.value}.csv",
            summary_path=f"{args.out_prefix}_{mech.value}.json",
        )
        if inst is None:
            inst = load_instance(config)
        records, summaries = run_experiment(config, inst)
        with _open_out(config.output_path, newline="") as f:
            write_records_csv(records, f)
        with _open_out(config.summary_path) as f:
            f.write(summary_json_text(config, inst, summaries))
        convs = sorted(s.convergence_generation for s in summaries)
        finals = sorted(s.final_best_cost for s in summaries)
        report.append((mech.value, convs[len(convs) // 2],
                       finals[len(finals) // 2]))
    print("mechanism,median_convergence_generation,median_final_best_cost")
    for mech, conv, final in report:
        print(f"{mech},{conv},{final!r}")
    return 0


_COMMANDS = {
    "solve": _cmd_solve,
    "scaling": _cmd_scaling,
    "shift-study": _cmd_shift,
    "convergence": _cmd_convergence,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except _ERRORS as e:
        print(f"antbatch: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
