"""Classic greedy and thresholding baselines: IHT, HTP, OMP, SP, CoSaMP.

Implemented in their canonical published forms:

* IHT    Blumensath & Davies, Appl. Comput. Harmon. Anal. 27 (2009).
* HTP    Foucart, SIAM J. Numer. Anal. 49 (2011).
* OMP    Mallat & Zhang (1993) / Pati et al. (1993); exactly k greedy
         steps, one least-squares refit per step.
* SP     Dai & Milenkovic, IEEE Trans. Inf. Theory 55 (2009); candidate
         union of size 2k, prune to k, final refit, halt when the
         residual stops decreasing.
* CoSaMP Needell & Tropp, Appl. Comput. Harmon. Anal. 26 (2009);
         candidate union of size 3k, prune to k without a second refit,
         halting as in SP.

The step length applies to IHT/HTP only; OMP, SP, and CoSaMP are
parameter-free. All baselines share SolverConfig and RecoveryResult.
"""

from __future__ import annotations

import math
import time
from typing import Callable, Optional

import numpy as np

from .linalg import least_squares_on_support
from .model import ProblemInstance
from .solvers import ConvergedReason, RecoveryResult, SolverConfig, _run_outer
from .thresholding import hard_threshold, top_k_indices


def recover_iht(problem: ProblemInstance, cfg: SolverConfig) -> RecoveryResult:
    """Iterative hard thresholding: keep the k largest magnitudes of the
    gradient-step vector."""
    k = problem.k

    def step(u, x):
        return hard_threshold(u, k).vector, None, None

    return _run_outer(problem, cfg, step)


def recover_htp(problem: ProblemInstance, cfg: SolverConfig) -> RecoveryResult:
    """Hard thresholding pursuit: IHT selection, then least squares on the
    selected support."""
    a = problem.matrix
    y = problem.y
    k = problem.k

    def step(u, x):
        support = top_k_indices(u, k)
        return least_squares_on_support(a, y, support), None, None

    return _run_outer(problem, cfg, step)


def _greedy_result(x, iterations, reason, residual_history, error_history,
                   started) -> RecoveryResult:
    return RecoveryResult(
        x_hat=x, iterations_used=iterations, converged_reason=reason,
        residual_history=residual_history, error_history=error_history,
        wall_time=time.perf_counter() - started)


def _error_tracker(problem: ProblemInstance):
    if problem.truth is None:
        return None, None
    truth = problem.truth.dense()
    truth_norm = float(np.linalg.norm(truth))

    def err(x):
        return float(np.linalg.norm(x - truth)) / truth_norm

    return err, [1.0]


def recover_omp(problem: ProblemInstance, cfg: SolverConfig) -> RecoveryResult:
    """Orthogonal matching pursuit: k greedy correlation picks.

    Each step adds the index of the largest residual correlation (ties to
    the smallest index; already-selected indices are masked out so the
    support grows by exactly one) and refits by least squares. Returns
    after k steps, or earlier if the residual already meets the tolerance.
    """
    a = problem.matrix
    y = problem.y
    k = problem.k
    err, error_history = _error_tracker(problem)

    started = time.perf_counter()
    n = a.shape[1]
    x = np.zeros(n)
    y_norm = float(np.linalg.norm(y))
    threshold = cfg.residual_tolerance * y_norm
    residual_history = [y_norm]
    reason = ConvergedReason.MAX_ITER
    iterations = 0
    if y_norm <= threshold:
        reason = ConvergedReason.RESIDUAL
        return _greedy_result(x, 0, reason, residual_history, error_history,
                              started)

    residual = y
    selected: list[int] = []
    masked = np.zeros(n, dtype=bool)
    for p in range(1, k + 1):
        correlation = np.abs(a.T @ residual)
        correlation[masked] = -np.inf
        pick = int(np.flatnonzero(correlation == correlation.max())[0])
        selected.append(pick)
        masked[pick] = True
        x = least_squares_on_support(a, y, np.sort(selected))
        residual = y - a @ x
        res = float(np.linalg.norm(residual))
        residual_history.append(res)
        if error_history is not None:
            error_history.append(err(x))
        iterations = p
        if res <= threshold:
            reason = ConvergedReason.RESIDUAL
            break
    return _greedy_result(x, iterations, reason, residual_history,
                          error_history, started)


def _pursuit_loop(problem: ProblemInstance, cfg: SolverConfig,
                  candidate_width: int, refit_after_prune: bool) -> RecoveryResult:
    """Shared SP/CoSaMP loop: merge supports, fit, prune, optionally refit;
    stop when the residual norm stops decreasing."""
    a = problem.matrix
    y = problem.y
    k = problem.k
    err, error_history = _error_tracker(problem)

    started = time.perf_counter()
    n = a.shape[1]
    x = np.zeros(n)
    y_norm = float(np.linalg.norm(y))
    threshold = cfg.residual_tolerance * y_norm
    residual_history = [y_norm]
    reason = ConvergedReason.MAX_ITER
    iterations = 0
    if y_norm <= threshold:
        return _greedy_result(x, 0, ConvergedReason.RESIDUAL,
                              residual_history, error_history, started)

    residual = y
    res_prev = y_norm
    for p in range(1, cfg.max_outer_iterations + 1):
        proxy_width = min(candidate_width, n)
        candidates = np.union1d(np.flatnonzero(x),
                                top_k_indices(a.T @ residual, proxy_width))
        z = least_squares_on_support(a, y, candidates)
        keep = top_k_indices(z, k)
        if refit_after_prune:
            x_new = least_squares_on_support(a, y, keep)
        else:
            x_new = np.zeros(n)
            x_new[keep] = z[keep]
        res = float(np.linalg.norm(y - a @ x_new))
        if not math.isfinite(res):
            break
        if p > 1 and res >= res_prev:
            # Residual stopped decreasing: keep the previous iterate.
            reason = ConvergedReason.STAGNATION
            break
        x = x_new
        residual = y - a @ x
        res_prev = res
        residual_history.append(res)
        if error_history is not None:
            error_history.append(err(x))
        iterations = p
        if res <= threshold:
            reason = ConvergedReason.RESIDUAL
            break
    return _greedy_result(x, iterations, reason, residual_history,
                          error_history, started)


def recover_sp(problem: ProblemInstance, cfg: SolverConfig) -> RecoveryResult:
    """Subspace pursuit: k-wide candidate extension with refit after pruning."""
    return _pursuit_loop(problem, cfg, candidate_width=problem.k,
                         refit_after_prune=True)


def recover_cosamp(problem: ProblemInstance, cfg: SolverConfig) -> RecoveryResult:
    """CoSaMP: 2k-wide candidate extension, prune to k without refit."""
    return _pursuit_loop(problem, cfg, candidate_width=2 * problem.k,
                         refit_after_prune=False)
