"""Command-line entry point: simulate, sweep, verify, bounds, plot.

Exit codes: 0 success, 1 simulation or verification failure, 2 usage/config error.
"""

import argparse
import glob
import json
import math
import sys
import time

from . import bounds
from .core import InvalidArgument
from .experiments import SweepConfig, make_instance, run_one, run_sweep
from .records import TRAJECTORY_COLUMNS
from .sde import default_step


class UsageError(Exception):
    pass


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required here")


def _family_from_flags(args) -> dict:
    if args.instance == "two-arm":
        _need(args, "delta2")
        return {"kind": "two-arm", "delta2": args.delta2}
    if args.instance == "uniform-gap":
        _need(args, "k", "delta2")
        return {"kind": "uniform-gap", "k": args.k, "delta": args.delta2}
    if args.instance == "lower-bound":
        _need(args, "k", "delta2")
        return {"kind": "lower-bound", "k": args.k, "delta2": args.delta2}
    _need(args, "instance_file")
    with open(args.instance_file) as fh:
        data = json.load(fh)
    return {"kind": "custom", "mu": data["mu"], "sigma": data["sigma"], "mode": data.get("mode", "paper-standard")}


def cmd_simulate(args) -> int:
    if not (args.eta >= 0 and math.isfinite(args.eta)):
        raise UsageError("--eta must be a non-negative number")
    if args.n is None or args.n <= 0:
        raise UsageError("--n must be positive")
    if args.stride < 1:
        raise UsageError("--stride must be at least 1")
    if args.seed < 0:
        raise UsageError("--seed must be non-negative")
    h = args.h
    if args.engine == "continuous":
        if h is None:
            h = default_step(args.eta)
        if not h > 0:
            raise UsageError("--h must be positive")
        if h > args.n:
            raise UsageError("--h must not exceed --n")
    elif h is not None:
        raise UsageError("--h only applies to the continuous engine")
    if args.engine == "discrete" and args.n != int(args.n):
        raise UsageError("--n must be an integer for the discrete engine")
    try:
        inst = make_instance(_family_from_flags(args))
    except InvalidArgument as err:
        raise UsageError(f"--instance: {err}") from err
    traj, summary = run_one(inst, args.engine, args.eta, args.n, args.seed, h or 0.01, args.stride,
                            args.monitor)
    if args.out:
        traj.to_csv(args.out)
    row = summary.as_dict()
    row.update(engine=args.engine, k=inst.k, n=args.n, h=h)
    print(json.dumps(row, sort_keys=True))
    return 1 if summary.diverged else 0


def cmd_sweep(args) -> int:
    try:
        cfg = SweepConfig.from_json(args.config)
    except (OSError, TypeError, KeyError, json.JSONDecodeError, InvalidArgument) as err:
        raise UsageError(f"--config: {err}") from err
    if args.output:
        cfg.output_path = args.output
    try:
        summaries, agg = run_sweep(cfg, args.workers)
    except InvalidArgument as err:
        raise UsageError(f"--config: {err}") from err
    print(json.dumps(agg, indent=2, sort_keys=True))
    return 1 if any(s.diverged for s in summaries) else 0


def cmd_verify(args) -> int:
    from .verify import run_suite
    start = time.time()
    results = run_suite(args.suite, args.seeds, args.budget)
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed in {time.time() - start:.1f}s")
    return 1 if failed else 0


def cmd_bounds(args) -> int:
    reports = []
    if args.two_arm:
        _need(args, "delta2", "eta", "n")
        reports.append(bounds.two_arm_regret_bound(args.delta2, args.eta, args.n))
    if args.threshold:
        _need(args, "delta2", "n")
        v = bounds.upper_bound_threshold(args.delta2, args.n)
        reports.append(bounds.BoundReport("upper_bound_threshold", {"delta2": args.delta2, "n": args.n}, v))
    if args.upper:
        _need(args, "k", "eta", "n")
        reports.append(bounds.upper_bound_regret(args.k, args.eta, args.n))
    if args.s_max:
        _need(args, "eta", "n", "eps")
        v = bounds.s_max(args.eta, args.n, args.eps)
        reports.append(bounds.BoundReport("s_max", {"eta": args.eta, "n": args.n, "eps": args.eps}, v))
    if args.hitting:
        _need(args, "a", "eps")
        inputs = {"a": args.a, "eps": args.eps}
        reports.append(bounds.BoundReport("bm_drift_bound", inputs, bounds.bm_drift_bound(args.a, args.eps)))
        if args.n is not None:
            reports.append(bounds.BoundReport("bm_less_drift_bound", {**inputs, "n": args.n},
                                              bounds.bm_less_drift_bound(args.a, args.eps, args.n)))
    if not reports:
        raise UsageError("choose at least one of --two-arm, --threshold, --upper, --s-max, --hitting")
    for r in reports:
        inputs = " ".join(f"{k}={v:g}" for k, v in r.inputs.items())
        flag = "ok" if r.hypotheses_met else "hypotheses-not-met"
        note = f"  ({r.hypothesis_notes})" if r.hypothesis_notes else ""
        print(f"{r.name:<24} {r.value:.6g}  {flag}  {inputs}{note}")
    return 0


def cmd_plot(args) -> int:
    from .plot import plot_files
    files = sorted(glob.glob(args.inp))
    if not files:
        raise UsageError(f"--in matched no files: {args.inp}")
    if args.field not in TRAJECTORY_COLUMNS:
        raise UsageError(f"--field {args.field!r} is not a trajectory column {TRAJECTORY_COLUMNS}")
    try:
        plot_files(files, args.out, args.field, args.logx)
    except KeyError as err:
        raise UsageError(f"--field {args.field!r} missing from a trajectory file") from err
    print(f"wrote {args.out} from {len(files)} trajectories")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pgbandit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run one trajectory")
    s.add_argument("--engine", choices=["discrete", "continuous"], default="continuous")
    s.add_argument("--instance", choices=["two-arm", "uniform-gap", "lower-bound", "custom-file"],
                   default="two-arm")
    s.add_argument("--instance-file", help="JSON with mu and sigma for --instance custom-file")
    s.add_argument("--k", type=int)
    s.add_argument("--delta2", type=float, help="gap of arm 2 (the common gap for uniform-gap)")
    s.add_argument("--eta", type=float, required=True)
    s.add_argument("--n", type=float, required=True, help="rounds (discrete) or horizon (continuous)")
    s.add_argument("--h", type=float)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--stride", type=int, default=1)
    s.add_argument("--monitor", action="store_true", help="track the lower-bound stopping time (k >= 5)")
    s.add_argument("--out", help="trajectory CSV path")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("sweep", help="run a sweep described by a JSON config")
    s.add_argument("--config", required=True)
    s.add_argument("--output", help="override output_path")
    s.add_argument("--workers", type=int)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("verify", help="run verification suites")
    s.add_argument("--suite", choices=["identities", "lemmas", "hitting", "all"], default="identities")
    s.add_argument("--seeds", type=int, help="Monte Carlo sample size")
    s.add_argument("--budget", type=float, default=1.0, help="scale factor on step counts")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("bounds", help="evaluate closed-form bounds")
    for flag in ("--two-arm", "--threshold", "--upper", "--s-max", "--hitting"):
        s.add_argument(flag, action="store_true")
    s.add_argument("--delta2", type=float)
    s.add_argument("--eta", type=float)
    s.add_argument("--n", type=float)
    s.add_argument("--k", type=int)
    s.add_argument("--eps", type=float)
    s.add_argument("--a", type=float)
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("plot", help="SVG of trajectory files")
    s.add_argument("--in", dest="inp", required=True, help="glob of trajectory CSVs")
    s.add_argument("--out", required=True)
    s.add_argument("--field", default="pi1")
    s.add_argument("--logx", action="store_true")
    s.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as err:
        print(f"pgbandit {args.command}: error: {err}", file=sys.stderr)
        return 2
    except (InvalidArgument, ValueError) as err:
        print(f"pgbandit {args.command}: error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
