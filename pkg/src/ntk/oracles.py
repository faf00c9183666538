"""Brute-force and sampling verifiers.

Everything here trades scale for certainty: exhaustive enumeration of
binary selectors, dense grid search over the relaxed selection box,
finite-difference gradients, and sampled isometry-defect bounds. Each is
kept independent of the production code paths it checks, so agreement is
evidence rather than tautology. Enumerations refuse inputs beyond the
documented budgets instead of silently degrading.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ContractViolationError, EnumerationBudgetError
from .linalg import as_matrix, as_vector
from .regularizers import Regularizer, tau
from .rng import Stream, derive_substream

ENUMERATION_BUDGET = 10**6
EXACT_RIC_MAX_DIM = 12
GRID_MAX_DIM = 6
GRID_STEPS = (0.05, 0.1)


@dataclass(frozen=True)
class OracleResult:
    """Minimizer support, objective value, and work performed."""

    argmin: np.ndarray
    value: float
    candidates_examined: int


@dataclass(frozen=True)
class RicEstimate:
    """Sampled lower bound on the order-K restricted isometry constant."""

    order: int
    delta_lower: float
    samples: int
    seed: int


def _check_budget(n: int, k: int) -> int:
    count = math.comb(n, k)
    if count > ENUMERATION_BUDGET:
        raise EnumerationBudgetError(
            f"C({n},{k}) = {count} exceeds the enumeration budget "
            f"of {ENUMERATION_BUDGET}")
    return count


def brute_force_binary_ot(a, y, u, k: int) -> OracleResult:
    """Exhaustive optimal k-selection: minimize ||y - A(u . w)||_2^2 over
    binary w with exactly k ones.

    Enumerates supports in lexicographic order; the first minimizer found
    wins ties. Refuses when C(n, k) exceeds the enumeration budget.
    """
    a = as_matrix(a)
    y = as_vector(y, "y")
    u = as_vector(u, "u")
    n = u.shape[0]
    if y.shape[0] != a.shape[0] or n != a.shape[1]:
        raise ContractViolationError(
            f"shape mismatch: A is {a.shape}, |y|={y.shape[0]}, |u|={n}")
    if not 1 <= k <= n:
        raise ContractViolationError(f"k must satisfy 1 <= k <= {n}, got {k}")
    _check_budget(n, k)
    scaled = a * u
    best_support = None
    best_value = math.inf
    examined = 0
    for combo in itertools.combinations(range(n), k):
        residual = y - scaled[:, combo].sum(axis=1)
        value = float(residual @ residual)
        examined += 1
        if value < best_value:
            best_value = value
            best_support = combo
    return OracleResult(
        argmin=np.asarray(best_support, dtype=np.intp),
        value=best_value, candidates_examined=examined)


def brute_force_lp_min(c, k: int) -> OracleResult:
    """Minimize c^T w over the extreme points of
    {w : sum w = k, 0 <= w <= 1}, i.e. over all k-sparse binary vectors.

    Values are exact (compensated) sums, so equal value multisets compare
    equal regardless of addition order; lexicographic first-found
    tie-breaking therefore lands on the smallest-index selection.
    """
    c = as_vector(c, "c")
    n = c.shape[0]
    if not 1 <= k <= n:
        raise ContractViolationError(f"k must satisfy 1 <= k <= {n}, got {k}")
    _check_budget(n, k)
    values = c.tolist()
    best_support = None
    best_value = math.inf
    examined = 0
    for combo in itertools.combinations(range(n), k):
        value = math.fsum(values[i] for i in combo)
        examined += 1
        if value < best_value:
            best_value = value
            best_support = combo
    return OracleResult(
        argmin=np.asarray(best_support, dtype=np.intp),
        value=best_value, candidates_examined=examined)


def _bounded_compositions(total: int, parts: int, bound: int):
    """Yield tuples of ``parts`` integers in [0, bound] summing to ``total``,
    in lexicographic order."""
    if parts == 1:
        if 0 <= total <= bound:
            yield (total,)
        return
    lo = max(0, total - bound * (parts - 1))
    hi = min(bound, total)
    for head in range(lo, hi + 1):
        for rest in _bounded_compositions(total - head, parts - 1, bound):
            yield (head,) + rest


def _phi_rows(reg: Regularizer, rows: np.ndarray) -> np.ndarray:
    b = tau(rows)
    if reg.kind == "quad":
        return b.sum(axis=1)
    if reg.kind == "log":
        return np.log1p(b).sum(axis=1)
    if reg.kind == "rational":
        return (b / (1.0 + b)).sum(axis=1)
    u = reg.weights
    return (u * u * b).sum(axis=1)


def grid_min_g_alpha(a, y, u, k: int, alpha: float, reg: Regularizer,
                     grid_step: float) -> OracleResult:
    """Grid search for the regularized selection objective over the box.

    Minimizes g_alpha over the grid {0, step, ..., 1}^n restricted to
    |sum w - k| <= step/2, which for integer k pins the level sum exactly.
    Only usable at toy dimension (n <= 6) and steps 0.05 or 0.1; the
    returned point is the best grid point, so any conclusion drawn from it
    carries an O(step) resolution error.
    """
    a = as_matrix(a)
    y = as_vector(y, "y")
    u = as_vector(u, "u")
    n = u.shape[0]
    if n > GRID_MAX_DIM:
        raise EnumerationBudgetError(
            f"grid search limited to n <= {GRID_MAX_DIM}, got n = {n}")
    if grid_step not in GRID_STEPS:
        raise ContractViolationError(
            f"grid_step must be one of {GRID_STEPS}, got {grid_step}")
    if not 1 <= k <= n:
        raise ContractViolationError(f"k must satisfy 1 <= k <= {n}, got {k}")
    if alpha <= 0:
        raise ContractViolationError("alpha must be positive")
    reg = reg.bound(u)
    levels = round(1.0 / grid_step)
    points = np.array(
        list(_bounded_compositions(k * levels, n, levels)), dtype=np.float64)
    if points.size == 0:
        raise ContractViolationError("grid has no feasible points")
    grid = points * grid_step
    residuals = y[:, None] - (a * u) @ grid.T
    f_vals = np.einsum("ij,ij->j", residuals, residuals)
    g_vals = f_vals + alpha * _phi_rows(reg, grid)
    best = int(np.argmin(g_vals))
    return OracleResult(
        argmin=grid[best], value=float(g_vals[best]),
        candidates_examined=grid.shape[0])


def finite_diff_grad(eval_fn: Callable[[np.ndarray], float], w, h: float) -> np.ndarray:
    """Central-difference gradient of a scalar function, one coordinate at
    a time: (eval(w + h e_i) - eval(w - h e_i)) / 2h."""
    w = as_vector(w, "w")
    if h <= 0:
        raise ContractViolationError("h must be positive")
    grad = np.empty(w.shape[0])
    for i in range(w.shape[0]):
        bumped = w.copy()
        bumped[i] = w[i] + h
        upper = eval_fn(bumped)
        bumped[i] = w[i] - h
        lower = eval_fn(bumped)
        grad[i] = (upper - lower) / (2.0 * h)
    return grad


def estimate_ric(a, order: int, samples: int, seed: int) -> RicEstimate:
    """Sampled lower bound on the restricted isometry constant of order K.

    For each sparsity j = 1..K, draws ``samples`` j-sparse unit vectors
    (uniform support, Gaussian values) from a substream keyed by j and
    records max |(||Az||^2 - ||z||^2)| / ||z||^2. Every sampled vector is
    K-sparse, so the maximum is a valid lower bound on the true constant;
    including the lower orders makes estimates nested across both
    ``samples`` and ``order``, hence monotone in each.
    """
    a = as_matrix(a)
    n = a.shape[1]
    if not 1 <= order <= a.shape[0]:
        raise ContractViolationError(
            f"order must satisfy 1 <= K <= {a.shape[0]}, got {order}")
    if samples < 1:
        raise ContractViolationError("samples must be >= 1")
    delta = 0.0
    for j in range(1, order + 1):
        stream = Stream(derive_substream(seed, j))
        for _ in range(samples):
            support = stream.subset(n, j)
            values = stream.gaussian(j)
            squared = float(values @ values)
            if squared == 0.0:
                continue
            image = a[:, support] @ values
            defect = abs(float(image @ image) - squared) / squared
            if defect > delta:
                delta = defect
    return RicEstimate(order=order, delta_lower=delta,
                       samples=order * samples, seed=seed)


def exhaustive_ric(a, order: int) -> float:
    """Exact restricted isometry constant at toy scale.

    Enumerates every support of size ``order`` and takes eigenvalue
    extremes of the Gram submatrix; interlacing makes size-K supports
    cover all smaller ones. Refused above n = 12 (the problem is NP-hard,
    and the cost is combinatorial).
    """
    a = as_matrix(a)
    n = a.shape[1]
    if n > EXACT_RIC_MAX_DIM:
        raise EnumerationBudgetError(
            f"exact constant limited to n <= {EXACT_RIC_MAX_DIM}, got {n}")
    if not 1 <= order <= min(a.shape):
        raise ContractViolationError(
            f"order must satisfy 1 <= K <= {min(a.shape)}, got {order}")
    delta = 0.0
    for combo in itertools.combinations(range(n), order):
        gram = a[:, combo].T @ a[:, combo]
        eigs = np.linalg.eigvalsh(gram)
        delta = max(delta, float(eigs[-1] - 1.0), float(1.0 - eigs[0]))
    return delta
