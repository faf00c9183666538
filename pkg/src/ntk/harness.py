"""Monte-Carlo experiment engine: success-rate sweeps, runtime sweeps,
and report emission.

Determinism contract: a sweep is a pure function of its parameters and
master seed. Per-trial seeds mix the sparsity level and trial index into
the master seed, every algorithm in a sweep sees bit-identical instances
(paired comparison), and aggregation is an ordered reduce over the task
grid, so the CSV bytes do not depend on the worker count. Success sweeps
therefore zero out the timing column by default; real timings belong to
``runtime_sweep``, whose timing column is inherently run-dependent.

The worker pool size comes from the NTK_THREADS environment variable
(default 1). Workers only share read-only inputs.
"""

from __future__ import annotations

import csv
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .baselines import (recover_cosamp, recover_htp, recover_iht,
                        recover_omp, recover_sp)
from .errors import ContractViolationError
from .model import ProblemInstance, gen_instance
from .rng import MASK64, GOLDEN, mix64
from .solvers import RecoveryResult, SolverConfig, recover_nt, recover_ntp

# Relative-error thresholds counting a recovery as a success.
NOISELESS_SUCCESS_TOL = 1e-5
NOISY_SUCCESS_TOL = 1e-3

CSV_HEADER = ("algorithm,m,n,k,noise,trials,successes,success_rate,"
              "mean_iterations,mean_time_ms,master_seed")

ALGORITHMS = {
    "nt": recover_nt,
    "ntq": recover_nt,
    "ntp": recover_ntp,
    "ntpq": recover_ntp,
    "iht": recover_iht,
    "htp": recover_htp,
    "omp": recover_omp,
    "sp": recover_sp,
    "cosamp": recover_cosamp,
}


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one recovery attempt on one instance."""

    algorithm: str
    m: int
    n: int
    k: int
    seed: int
    success: bool
    iterations: int
    relative_error: float
    wall_time_ms: float
    noise_level: float


@dataclass(frozen=True)
class SweepRow:
    algorithm: str
    m: int
    n: int
    k: int
    noise: float
    trials: int
    successes: int
    success_rate: float
    mean_iterations: float
    mean_time_ms: float
    master_seed: int


@dataclass(frozen=True)
class SweepResult:
    rows: tuple


def trial_seed(master_seed: int, k: int, trial_index: int) -> int:
    """Per-trial seed: master XOR mix64(k)*GOLDEN XOR mix64(trial), all
    with wrapping 64-bit arithmetic."""
    return (master_seed
            ^ (mix64(k) * GOLDEN & MASK64)
            ^ mix64(trial_index)) & MASK64


def default_criterion(noise_level: float) -> float:
    """Success threshold on the relative error: 1e-5 for exact
    measurements, 1e-3 once noise is present."""
    return NOISELESS_SUCCESS_TOL if noise_level == 0 else NOISY_SUCCESS_TOL


def worker_count() -> int:
    raw = os.environ.get("NTK_THREADS")
    if raw is None:
        return 1
    try:
        count = int(raw)
    except ValueError as exc:
        raise ContractViolationError(
            f"NTK_THREADS must be a positive integer, got {raw!r}") from exc
    if count < 1:
        raise ContractViolationError(
            f"NTK_THREADS must be a positive integer, got {raw!r}")
    return count


def run_trial(algorithm: str, instance: ProblemInstance, cfg: SolverConfig,
              criterion_tol: float, seed: Optional[int] = None) -> TrialRecord:
    """Run one solver on one instance and score it against the truth.

    Success means the relative error dipped below ``criterion_tol`` at any
    iterate within the budget; ``iterations`` is the first iteration that
    achieved it (or the total spent when none did), and
    ``relative_error`` is the best error seen. ``seed`` labels the record
    with the seed that generated the instance (the matrix substream seed
    when not supplied).
    """
    if algorithm not in ALGORITHMS:
        raise ContractViolationError(
            f"unknown algorithm {algorithm!r}; expected one of "
            f"{sorted(ALGORITHMS)}")
    if instance.truth is None:
        raise ContractViolationError("run_trial needs an instance with truth")
    solver = ALGORITHMS[algorithm]
    started = time.perf_counter()
    result: RecoveryResult = solver(instance, cfg)
    wall_ms = (time.perf_counter() - started) * 1e3
    errors = result.error_history
    hit = next((i for i, e in enumerate(errors) if e <= criterion_tol), None)
    return TrialRecord(
        algorithm=algorithm,
        m=instance.sensing.rows,
        n=instance.sensing.cols,
        k=instance.k,
        seed=seed if seed is not None else instance.sensing.seed,
        success=hit is not None,
        iterations=hit if hit is not None else result.iterations_used,
        relative_error=float(min(errors)),
        wall_time_ms=wall_ms,
        noise_level=instance.noise_level,
    )


def _run_tasks(tasks, work):
    """Map ``work`` over ``tasks`` with the configured worker count; the
    result order is the task order regardless of scheduling."""
    workers = worker_count()
    if workers == 1:
        return [work(task) for task in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(work, tasks))


def success_sweep(
    algorithms: Sequence[str],
    m: int,
    n: int,
    k_min: int,
    k_max: int,
    k_step: int,
    trials: int,
    noise_level: float,
    master_seed: int,
    cfg: SolverConfig,
    criterion_tol: Optional[float] = None,
    record_timing: bool = False,
) -> SweepResult:
    """Success rate per (algorithm, sparsity) over paired random trials.

    Every algorithm sees the same instance at a given (k, trial) pair.
    Stagnation stopping is disabled so each solver gets the full iteration
    budget. Unless ``record_timing`` is set, the timing column is zeroed
    to keep sweep output byte-deterministic.
    """
    for algorithm in algorithms:
        if algorithm not in ALGORITHMS:
            raise ContractViolationError(f"unknown algorithm {algorithm!r}")
    if k_min < 1 or k_max < k_min or k_step < 1:
        raise ContractViolationError("invalid sparsity range")
    if trials < 1:
        raise ContractViolationError("trials must be >= 1")
    tol = default_criterion(noise_level) if criterion_tol is None else criterion_tol
    bench_cfg = replace(cfg, stagnation_enabled=False)
    ks = list(range(k_min, k_max + 1, k_step))
    tasks = [(k, t) for k in ks for t in range(trials)]

    def work(task):
        k, t = task
        seed = trial_seed(master_seed, k, t)
        instance = gen_instance(m, n, k, noise_level, seed)
        return [run_trial(algorithm, instance, bench_cfg, tol, seed=seed)
                for algorithm in algorithms]

    records = _run_tasks(tasks, work)
    by_algo_k = {}
    for (k, _), recs in zip(tasks, records):
        for rec in recs:
            by_algo_k.setdefault((rec.algorithm, k), []).append(rec)

    rows = []
    for algorithm in algorithms:
        for k in ks:
            recs = by_algo_k[(algorithm, k)]
            successes = sum(r.success for r in recs)
            mean_iter = sum(r.iterations for r in recs) / len(recs)
            mean_ms = (sum(r.wall_time_ms for r in recs) / len(recs)
                       if record_timing else 0.0)
            rows.append(SweepRow(
                algorithm=algorithm, m=m, n=n, k=k, noise=noise_level,
                trials=len(recs), successes=successes,
                success_rate=successes / len(recs),
                mean_iterations=mean_iter, mean_time_ms=mean_ms,
                master_seed=master_seed))
    return SweepResult(rows=tuple(rows))


def runtime_sweep(
    algorithms: Sequence[str],
    m: int,
    n_list: Sequence[int],
    betas: Sequence[float],
    trials: int,
    master_seed: int,
    cfg: SolverConfig,
) -> SweepResult:
    """Mean wall time per recovery at sparsity k = round(beta * m).

    The timing column carries real measurements here, so the output is
    *not* byte-reproducible across runs; everything else is.
    """
    for algorithm in algorithms:
        if algorithm not in ALGORITHMS:
            raise ContractViolationError(f"unknown algorithm {algorithm!r}")
    for beta in betas:
        if not 0 < beta <= 0.5:
            raise ContractViolationError(
                f"oversampling ratio must lie in (0, 0.5], got {beta}")
    if trials < 1:
        raise ContractViolationError("trials must be >= 1")
    rows = []
    for n in n_list:
        for beta in betas:
            k = max(1, round(beta * m))
            tol = default_criterion(0.0)
            recs_per_algo = {algorithm: [] for algorithm in algorithms}
            for t in range(trials):
                seed = trial_seed(master_seed, k, t)
                instance = gen_instance(m, n, k, 0.0, seed)
                for algorithm in algorithms:
                    recs_per_algo[algorithm].append(
                        run_trial(algorithm, instance, cfg, tol, seed=seed))
            for algorithm in algorithms:
                recs = recs_per_algo[algorithm]
                successes = sum(r.success for r in recs)
                rows.append(SweepRow(
                    algorithm=algorithm, m=m, n=n, k=k, noise=0.0,
                    trials=trials, successes=successes,
                    success_rate=successes / trials,
                    mean_iterations=sum(r.iterations for r in recs) / trials,
                    mean_time_ms=sum(r.wall_time_ms for r in recs) / trials,
                    master_seed=master_seed))
    return SweepResult(rows=tuple(rows))


def render_report(sweep: SweepResult, out_csv, out_svg=None) -> None:
    """Write the sweep table as CSV and, optionally, an SVG line chart.

    Floats are serialized with ``repr`` so parsing the file reproduces the
    rows exactly. The chart plots success rate against sparsity with one
    polyline per algorithm inside a fixed 800x600 view box.
    """
    if not sweep.rows:
        raise ContractViolationError("refusing to render an empty sweep")
    try:
        with open(out_csv, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER.split(","))
            for row in sweep.rows:
                writer.writerow([
                    row.algorithm, row.m, row.n, row.k, repr(row.noise),
                    row.trials, row.successes, repr(row.success_rate),
                    repr(row.mean_iterations), repr(row.mean_time_ms),
                    row.master_seed,
                ])
    except OSError as exc:
        raise OSError(f"cannot write CSV report to {out_csv}: {exc}") from exc
    if out_svg is not None:
        render_svg(sweep, out_svg)


def render_svg(sweep: SweepResult, out_svg) -> None:
    """Write only the SVG success chart for a sweep."""
    if not sweep.rows:
        raise ContractViolationError("refusing to render an empty sweep")
    try:
        with open(out_svg, "w", newline="") as fh:
            fh.write(_success_chart_svg(sweep))
    except OSError as exc:
        raise OSError(f"cannot write SVG report to {out_svg}: {exc}") from exc


def load_report(path) -> SweepResult:
    """Parse a CSV report written by :func:`render_report`."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER.split(","):
            raise ContractViolationError(f"unexpected report header {header!r}")
        for rec in reader:
            rows.append(SweepRow(
                algorithm=rec[0], m=int(rec[1]), n=int(rec[2]), k=int(rec[3]),
                noise=float(rec[4]), trials=int(rec[5]), successes=int(rec[6]),
                success_rate=float(rec[7]), mean_iterations=float(rec[8]),
                mean_time_ms=float(rec[9]), master_seed=int(rec[10])))
    return SweepResult(rows=tuple(rows))


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b", "#e377c2", "#7f7f7f", "#17becf")


def _success_chart_svg(sweep: SweepResult) -> str:
    """Success rate vs sparsity, one polyline per algorithm, 800x600."""
    width, height = 800, 600
    left, right, top, bottom = 70, 180, 40, 60
    plot_w = width - left - right
    plot_h = height - top - bottom

    algorithms = []
    for row in sweep.rows:
        if row.algorithm not in algorithms:
            algorithms.append(row.algorithm)
    ks = sorted({row.k for row in sweep.rows})
    k_lo, k_hi = min(ks), max(ks)
    span = max(k_hi - k_lo, 1)

    def sx(k):
        return left + plot_w * (k - k_lo) / span

    def sy(rate):
        return top + plot_h * (1.0 - rate)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" '
        f'y2="{top + plot_h}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" '
        f'stroke="black"/>',
        f'<text x="{left + plot_w / 2:.1f}" y="{height - 15}" '
        f'text-anchor="middle" font-size="14">sparsity k</text>',
        f'<text x="20" y="{top + plot_h / 2:.1f}" font-size="14" '
        f'transform="rotate(-90 20 {top + plot_h / 2:.1f})" '
        f'text-anchor="middle">success rate</text>',
    ]
    for tick in (0.0, 0.5, 1.0):
        y = sy(tick)
        parts.append(f'<line x1="{left - 5}" y1="{y:.1f}" x2="{left}" '
                     f'y2="{y:.1f}" stroke="black"/>')
        parts.append(f'<text x="{left - 10}" y="{y + 4:.1f}" '
                     f'text-anchor="end" font-size="12">{tick:.1f}</text>')
    for k in ks:
        x = sx(k)
        parts.append(f'<line x1="{x:.1f}" y1="{top + plot_h}" x2="{x:.1f}" '
                     f'y2="{top + plot_h + 5}" stroke="black"/>')
        parts.append(f'<text x="{x:.1f}" y="{top + plot_h + 20}" '
                     f'text-anchor="middle" font-size="12">{k}</text>')
    for i, algorithm in enumerate(algorithms):
        color = _PALETTE[i % len(_PALETTE)]
        pts = [(row.k, row.success_rate) for row in sweep.rows
               if row.algorithm == algorithm]
        pts.sort()
        coords = " ".join(f"{sx(k):.2f},{sy(r):.2f}" for k, r in pts)
        parts.append(f'<polyline fill="none" stroke="{color}" '
                     f'stroke-width="2" points="{coords}"/>')
        ly = top + 20 * i
        lx = left + plot_w + 20
        parts.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 25}" y2="{ly}" '
                     f'stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{lx + 32}" y="{ly + 4}" '
                     f'font-size="13">{algorithm}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
