"""Command-line entry point ``meta-equiv``.

Exit codes: 0 success, 1 verification threshold breached, 2 usage error,
3 invalid problem or violated covariance assumptions, 4 iterative solver
did not converge.  Machine-readable payloads go to stdout, diagnostics to
stderr.
"""

import argparse
import json
import sys

import numpy as np

from . import harness, problem, solver
from .errors import MaxIterationsExceeded, MetaEquivError
from .reparam import Chart

EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_NO_CONVERGENCE = 4


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _points(text):
    value = _positive_int(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"must be >= 2, got {value}")
    return value


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {value}")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog="meta-equiv",
        description="Optimal affine combination of two estimators and invariance checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a random problem file")
    p.add_argument("--dim", type=_positive_int, default=3)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("solve", help="minimise the risk in one chart")
    p.add_argument("--problem", required=True)
    p.add_argument("--form", choices=["A", "B"], default="A")
    p.add_argument("--solver", choices=solver.METHODS, default=solver.CLOSED_FORM)
    p.add_argument("--tol", type=_positive_float, default=solver.DEFAULT_TOL)
    p.add_argument("--max-iter", type=_positive_int, default=solver.DEFAULT_MAX_ITER)

    p = sub.add_parser("verify", help="paired Form A / Form B runs over many seeds")
    p.add_argument("--dim", type=_positive_int, default=3)
    p.add_argument("--seeds", type=_positive_int, required=True)
    p.add_argument("--seed-start", type=int, default=0)
    p.add_argument("--solver", choices=solver.METHODS, default=solver.ITERATIVE)
    p.add_argument("--problem", help="use this problem for every seed instead of a random one")
    p.add_argument("--out", help="CSV path (stdout if omitted)")

    p = sub.add_parser("sweep", help="risk along W = wI in both charts")
    p.add_argument("--problem", required=True)
    p.add_argument("--min", type=float, default=0.0, dest="grid_min")
    p.add_argument("--max", type=float, default=1.0, dest="grid_max")
    p.add_argument("--points", type=_points, default=1001)
    p.add_argument("--out", help="CSV path (stdout if omitted)")

    p = sub.add_parser("grad-check", help="analytic vs finite-difference gradient")
    p.add_argument("--problem")
    p.add_argument("--dim", type=_positive_int, default=3, help="random instance size if no --problem")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=_positive_int, default=100)
    return parser


def _emit(payload, out):
    print(json.dumps(payload), file=out)


def _load_spec(path):
    return problem.load(path).to_spec()


def cmd_gen(args, out):
    problem.dump(problem.generate(args.dim, args.seed), args.out)
    return 0


def cmd_solve(args, out):
    spec = _load_spec(args.problem)
    chart = Chart.from_tag(args.form, spec.dim)
    res = solver.solve(spec, chart, args.solver, tol=args.tol, max_iter=args.max_iter)
    _emit({
        "form": args.form,
        "method": res.method,
        "w_opt": res.w_opt.tolist(),
        "risk": res.risk_at_opt,
        "grad_norm": res.grad_norm_at_opt,
        "iterations": res.iterations,
    }, out)
    return 0


def _write_csv(writer, data, path, out):
    if path:
        with open(path, "w", newline="") as fh:
            writer(data, fh)
    else:
        writer(data, out)


def cmd_verify(args, out):
    spec = _load_spec(args.problem) if args.problem else None
    seeds = range(args.seed_start, args.seed_start + args.seeds)
    reports = harness.run_batch(args.dim, seeds, args.solver, spec=spec)
    _write_csv(harness.write_reports_csv, reports, args.out, out)
    summary = harness.summarize(reports)
    line = json.dumps({"summary": summary})
    print(line, file=out if args.out else sys.stderr)
    return 0 if summary["passed"] == summary["total"] else EXIT_FAIL


def cmd_sweep(args, out):
    spec = _load_spec(args.problem)
    sweep = harness.run_sweep(spec, args.grid_min, args.grid_max, args.points)
    _write_csv(harness.write_sweep_csv, sweep, args.out, out)
    summary = {
        "argmin_f": sweep.argmin_f,
        "argmin_g": sweep.argmin_g,
        "mirror_residual": sweep.mirror_residual,
        "mirror_ok": sweep.mirror_ok,
        "minima_ok": sweep.minima_ok,
    }
    print(json.dumps({"summary": summary}), file=out if args.out else sys.stderr)
    return 0


def cmd_grad_check(args, out):
    if args.problem:
        spec = _load_spec(args.problem)
    else:
        spec = harness.random_spec(args.dim, args.seed)
    result = harness.grad_check(spec, args.trials, seed=args.seed)
    _emit({
        "dim": spec.dim,
        "trials": result.trials,
        "max_rel_err": result.max_rel_err,
        "threshold": result.threshold,
        "passed": result.passed,
    }, out)
    return 0 if result.passed else EXIT_FAIL


COMMANDS = {
    "gen": cmd_gen,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "grad-check": cmd_grad_check,
}


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except MaxIterationsExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except MetaEquivError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
