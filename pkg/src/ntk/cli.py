"""Command-line front end.

Subcommands: ``gen`` (write a problem instance to disk), ``run`` (one
recovery, one summary line on stdout), ``sweep`` (success-rate sweep to
CSV/SVG), ``runtime`` (timing sweep to CSV), ``verify`` (oracle
self-check suites), ``plot`` (re-render an SVG from a sweep CSV).

Exit codes: 0 success, 1 contract violation or usage error,
2 verification-suite failure, 3 I/O error.

The ``run`` summary line contains no timing, so repeated invocations with
the same flags print identical bytes.
"""

from __future__ import annotations

import argparse
import math
import sys

from .errors import ContractViolationError
from .harness import (default_criterion, load_report, render_report,
                      render_svg, run_trial, runtime_sweep, success_sweep)
from .linalg import write_ntkm
from .model import gen_instance, write_signal_csv, write_vector_csv
from .solvers import AlphaPolicy, SolverConfig
from .verify import SUITES, run_suite

EXIT_OK = 0
EXIT_CONTRACT = 1
EXIT_VERIFY = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage errors exit with code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONTRACT)


def _alpha_policy(token: str) -> AlphaPolicy:
    if token == "auto":
        return AlphaPolicy.rayleigh(1.0)
    try:
        return AlphaPolicy.fixed(float(token))
    except ValueError:
        raise ContractViolationError(
            f"--alpha expects a positive number or 'auto', got {token!r}")


def _inner_iterations(token: str) -> float:
    if token == "inf":
        return math.inf
    try:
        return int(token)
    except ValueError:
        raise ContractViolationError(
            f"--q expects a positive integer or 'inf', got {token!r}")


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", default="5",
                        help="regularization weight, or 'auto' to track the "
                             "concavity threshold each iteration (default 5)")
    parser.add_argument("--lambda", dest="step_length", type=float, default=2.0,
                        help="gradient step length (default 2)")
    parser.add_argument("--q", default="1",
                        help="inner linearization steps per iteration, or "
                             "'inf' (default 1)")
    parser.add_argument("--regularizer", default="wquad",
                        choices=["quad", "log", "rational", "wquad"],
                        help="regularizer kind (default wquad)")
    parser.add_argument("--max-iter", type=int, default=150,
                        help="outer iteration budget (default 150)")


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        step_length=args.step_length,
        alpha_policy=_alpha_policy(args.alpha),
        inner_iterations=_inner_iterations(args.q),
        max_outer_iterations=args.max_iter,
        regularizer=args.regularizer,
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="ntk", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate and serialize an instance")
    gen.add_argument("--m", type=int, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--k", type=int, required=True)
    gen.add_argument("--xi", type=float, default=0.0, help="noise level")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out-prefix", required=True,
                     help="writes PREFIX.A.ntkm, PREFIX.x.csv, PREFIX.y.csv")

    run = sub.add_parser("run", help="run one recovery trial")
    run.add_argument("--algo", required=True)
    run.add_argument("--m", type=int, required=True)
    run.add_argument("--n", type=int, required=True)
    run.add_argument("--k", type=int, required=True)
    run.add_argument("--xi", type=float, default=0.0)
    run.add_argument("--seed", type=int, required=True)
    run.add_argument("--criterion-tol", type=float, default=None,
                     help="success threshold on relative error "
                          "(default: 1e-5 noiseless, 1e-3 noisy)")
    _add_solver_flags(run)

    sweep = sub.add_parser("sweep", help="success-rate sweep over sparsity")
    sweep.add_argument("--algos", required=True,
                       help="comma-separated algorithm tokens")
    sweep.add_argument("--m", type=int, required=True)
    sweep.add_argument("--n", type=int, required=True)
    sweep.add_argument("--k-min", type=int, required=True)
    sweep.add_argument("--k-max", type=int, required=True)
    sweep.add_argument("--k-step", type=int, default=5)
    sweep.add_argument("--trials", type=int, required=True)
    sweep.add_argument("--xi", type=float, default=0.0)
    sweep.add_argument("--seed", type=int, required=True)
    sweep.add_argument("--out", required=True, help="CSV output path")
    sweep.add_argument("--svg", default=None, help="optional SVG chart path")
    sweep.add_argument("--timing", action="store_true",
                       help="record real wall times in the CSV (breaks "
                            "byte-level reproducibility)")
    _add_solver_flags(sweep)

    runtime = sub.add_parser("runtime", help="wall-time sweep")
    runtime.add_argument("--algos", required=True)
    runtime.add_argument("--m", type=int, required=True)
    runtime.add_argument("--n-list", required=True,
                         help="comma-separated signal dimensions")
    runtime.add_argument("--betas", default=None,
                         help="comma-separated oversampling ratios "
                              "(default 0.05..0.25 step 0.02)")
    runtime.add_argument("--trials", type=int, required=True)
    runtime.add_argument("--seed", type=int, required=True)
    runtime.add_argument("--out", required=True)
    _add_solver_flags(runtime)

    verify = sub.add_parser("verify", help="run an oracle self-check suite")
    verify.add_argument("--suite", required=True, choices=sorted(SUITES))

    plot = sub.add_parser("plot", help="render an SVG from a sweep CSV")
    plot.add_argument("--csv", required=True)
    plot.add_argument("--svg", required=True)

    return parser


def _cmd_gen(args) -> int:
    instance = gen_instance(args.m, args.n, args.k, args.xi, args.seed)
    write_ntkm(f"{args.out_prefix}.A.ntkm", instance.matrix)
    write_signal_csv(f"{args.out_prefix}.x.csv", instance.truth)
    write_vector_csv(f"{args.out_prefix}.y.csv", instance.y)
    print(f"wrote {args.out_prefix}.A.ntkm ({args.m}x{args.n}), "
          f"{args.out_prefix}.x.csv (k={args.k}), {args.out_prefix}.y.csv")
    return EXIT_OK


def _cmd_run(args) -> int:
    cfg = _solver_config(args)
    instance = gen_instance(args.m, args.n, args.k, args.xi, args.seed)
    tol = (default_criterion(args.xi) if args.criterion_tol is None
           else args.criterion_tol)
    record = run_trial(args.algo, instance, cfg, tol, seed=args.seed)
    print(f"algorithm={record.algorithm} m={record.m} n={record.n} "
          f"k={record.k} seed={record.seed} noise={record.noise_level!r} "
          f"success={record.success} iterations={record.iterations} "
          f"relative_error={record.relative_error!r}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = _solver_config(args)
    algorithms = [token.strip() for token in args.algos.split(",") if token.strip()]
    sweep = success_sweep(
        algorithms, args.m, args.n, args.k_min, args.k_max, args.k_step,
        args.trials, args.xi, args.seed, cfg, record_timing=args.timing)
    render_report(sweep, args.out, args.svg)
    print(f"wrote {args.out}" + (f" and {args.svg}" if args.svg else ""))
    return EXIT_OK


def _cmd_runtime(args) -> int:
    cfg = _solver_config(args)
    algorithms = [token.strip() for token in args.algos.split(",") if token.strip()]
    n_list = [int(token) for token in args.n_list.split(",") if token.strip()]
    if args.betas is None:
        betas = [0.05 + 0.02 * i for i in range(11)]
    else:
        betas = [float(token) for token in args.betas.split(",") if token.strip()]
    sweep = runtime_sweep(algorithms, args.m, n_list, betas, args.trials,
                          args.seed, cfg)
    render_report(sweep, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    passed, lines = run_suite(args.suite)
    for line in lines:
        print(line)
    print(f"suite {args.suite}: {'PASS' if passed else 'FAIL'}")
    return EXIT_OK if passed else EXIT_VERIFY


def _cmd_plot(args) -> int:
    render_svg(load_report(args.csv), args.svg)
    print(f"wrote {args.svg}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    commands = {
        "gen": _cmd_gen,
        "run": _cmd_run,
        "sweep": _cmd_sweep,
        "runtime": _cmd_runtime,
        "verify": _cmd_verify,
        "plot": _cmd_plot,
    }
    try:
        return commands[args.command](args)
    except ContractViolationError as exc:
        print(f"ntk: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except OSError as exc:
        print(f"ntk: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
