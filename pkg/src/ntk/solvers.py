"""Natural-thresholding recovery algorithms.

One outer iteration takes the gradient step u = x + lambda * A^T(y - Ax),
builds a starting binary selector on the k largest magnitudes of u, and
then repeatedly linearizes the regularized objective g_alpha at the
current selector: the minimizer of the linearization over the polytope
{w : sum w = k, 0 <= w <= 1} is the binary vector supported on the k
smallest entries of the gradient, so each inner step is one gradient
evaluation plus one selection. The new iterate keeps the selected entries
of u directly (``recover_nt``) or refits them by least squares on the
selected support (``recover_ntp``).

With alpha at or above the concavity threshold of the regularizer, every
inner step is a descent step on the residual, and the first selection is
never worse than plain hard thresholding of u.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .errors import ContractViolationError
from .linalg import as_matrix, as_vector, least_squares_on_support
from .model import ProblemInstance
from .regularizers import Regularizer, alpha_star
from .thresholding import bottom_k_indices, top_k_indices

# Hard cap on inner linearization steps when inner_iterations is inf.
INNER_ITERATION_CAP = 50


class ConvergedReason(Enum):
    RESIDUAL = "residual"
    STAGNATION = "stagnation"
    MAX_ITER = "max_iter"


@dataclass(frozen=True)
class AlphaPolicy:
    """How the regularization weight is chosen each outer iteration.

    ``fixed``: a constant value. ``rayleigh``: multiplier times the
    concavity threshold recomputed from the current gradient-step vector
    (multiplier 1.02 reproduces the default safety margin).
    """

    mode: str
    value: float

    def __post_init__(self):
        if self.mode not in ("fixed", "rayleigh"):
            raise ContractViolationError(f"unknown alpha policy {self.mode!r}")
        if self.mode == "fixed" and self.value <= 0:
            raise ContractViolationError("fixed alpha must be positive")
        if self.mode == "rayleigh" and self.value < 1.0:
            raise ContractViolationError("rayleigh multiplier must be >= 1")

    @classmethod
    def fixed(cls, value: float = 5.0) -> "AlphaPolicy":
        return cls("fixed", float(value))

    @classmethod
    def rayleigh(cls, multiplier: float = 1.0) -> "AlphaPolicy":
        return cls("rayleigh", float(multiplier))

    def resolve(self, reg: Regularizer, a: np.ndarray, u: np.ndarray) -> float:
        if self.mode == "fixed":
            return self.value
        return self.value * alpha_star(reg, a, u, safety=1.0)


@dataclass
class SolverConfig:
    """Shared solver settings.

    ``residual_tolerance`` is relative to ||y||_2. ``stagnation_enabled``
    False runs the full iteration budget (benchmark parity mode).
    ``inner_iterations`` may be math.inf, capped at INNER_ITERATION_CAP.
    """

    step_length: float = 2.0
    alpha_policy: AlphaPolicy = field(default_factory=AlphaPolicy.fixed)
    inner_iterations: float = 1
    max_outer_iterations: int = 150
    residual_tolerance: float = 1e-10
    stagnation_tolerance: float = 1e-12
    stagnation_enabled: bool = True
    regularizer: str = "wquad"
    termination_epsilon: float = 1e-12

    def __post_init__(self):
        if self.step_length <= 0:
            raise ContractViolationError("step_length must be positive")
        if not (self.inner_iterations == math.inf
                or (float(self.inner_iterations).is_integer()
                    and self.inner_iterations >= 1)):
            raise ContractViolationError(
                "inner_iterations must be an integer >= 1 or math.inf")
        if self.max_outer_iterations < 1:
            raise ContractViolationError("max_outer_iterations must be >= 1")
        for name in ("residual_tolerance", "stagnation_tolerance",
                     "termination_epsilon"):
            if getattr(self, name) < 0:
                raise ContractViolationError(f"{name} must be nonnegative")
        # Validates the kind token.
        Regularizer(self.regularizer)


@dataclass(frozen=True)
class IterateState:
    """Snapshot of one outer iteration, for monitoring callbacks."""

    iteration: int
    x: np.ndarray
    u: np.ndarray
    w_minus: Optional[np.ndarray]
    w_plus: Optional[np.ndarray]
    f_history: list


@dataclass(frozen=True)
class RecoveryResult:
    x_hat: np.ndarray
    iterations_used: int
    converged_reason: ConvergedReason
    residual_history: list
    error_history: Optional[list]
    wall_time: float


def gradient_step(a, y, x, step_length: float) -> np.ndarray:
    """One gradient-descent step on the squared residual: x + step * A^T(y - Ax)."""
    a = as_matrix(a)
    y = as_vector(y, "y")
    x = as_vector(x, "x")
    if y.shape[0] != a.shape[0] or x.shape[0] != a.shape[1]:
        raise ContractViolationError(
            f"gradient_step: A is {a.shape}, |y|={y.shape[0]}, |x|={x.shape[0]}")
    if step_length <= 0:
        raise ContractViolationError("step_length must be positive")
    return x + step_length * (a.T @ (y - a @ x))


def _indicator(indices: np.ndarray, n: int) -> np.ndarray:
    w = np.zeros(n)
    w[indices] = 1.0
    return w


def _binary_penalty_slope(reg: Regularizer, u: np.ndarray):
    """Gradient scale of the regularizer on binary vectors, where the
    kernel value is the constant 3/4: grad phi = scale * (1 - 2w)."""
    if reg.kind == "quad":
        return 1.0
    if reg.kind == "log":
        return 4.0 / 7.0
    if reg.kind == "rational":
        return 16.0 / 49.0
    weights = reg.weights if reg.weights is not None else u
    return weights * weights


def nt_inner_loop(
    a,
    y,
    u,
    k: int,
    alpha: float,
    q: float,
    reg: Regularizer,
    termination_epsilon: float = 1e-12,
    w_start: Optional[np.ndarray] = None,
    on_step: Optional[Callable] = None,
) -> np.ndarray:
    """Repeated linearized selection; returns a binary vector with k ones.

    Starts from the selector of the k largest magnitudes of u (or from
    ``w_start``, a binary vector with k ones). Each step evaluates
    c = grad g_alpha at the current selector and moves to the selector of
    the k smallest entries of c. Stops after q steps, or earlier once
    c^T w stops changing between consecutive selectors (compared with
    relative slack ``termination_epsilon``, since an exact-equality test
    is fragile in floating point). ``on_step(j, w_minus, w_plus, c)`` is
    called after each selection.

    Every visited selector is binary, so the regularizer gradient reduces
    to a constant scale times (1 - 2w), and the data term uses the
    column-scaled matrix A diag(u) computed once: the per-step cost is
    one m*n product plus selection.
    """
    a = as_matrix(a)
    u = as_vector(u, "u")
    n = u.shape[0]
    if not 1 <= k <= n:
        raise ContractViolationError(f"k must satisfy 1 <= k <= {n}, got {k}")
    if q != math.inf and (not float(q).is_integer() or q < 1):
        raise ContractViolationError("q must be an integer >= 1 or math.inf")
    if alpha <= 0:
        raise ContractViolationError("alpha must be positive")
    reg = reg.bound(u)
    scaled = a * u
    slope_scale = _binary_penalty_slope(reg, u)
    if w_start is None:
        selection = top_k_indices(u, k)
        w_minus = _indicator(selection, n)
    else:
        w_minus = as_vector(w_start, "w_start")
        selection = np.flatnonzero(w_minus)
        if selection.size != k or not np.all(w_minus[selection] == 1.0):
            raise ContractViolationError(
                "w_start must be binary with exactly k ones")
    steps = INNER_ITERATION_CAP if q == math.inf else int(q)
    w_plus = w_minus
    terminated = False
    for j in range(steps):
        residual = y - scaled[:, selection].sum(axis=1)
        c = -2.0 * (scaled.T @ residual) \
            + alpha * (slope_scale * (1.0 - 2.0 * w_minus))
        selection_new = bottom_k_indices(c, k)
        w_plus = _indicator(selection_new, n)
        if on_step is not None:
            on_step(j, w_minus, w_plus, c)
        value_minus = float(c[selection].sum())
        value_plus = float(c[selection_new].sum())
        if abs(value_plus - value_minus) <= termination_epsilon * (1.0 + abs(value_minus)):
            terminated = True
            break
        w_minus = w_plus
        selection = selection_new
    if q == math.inf and not terminated:
        warnings.warn(
            f"inner linearization did not settle within the cap of "
            f"{INNER_ITERATION_CAP} steps", RuntimeWarning, stacklevel=2)
    return w_plus


def _sparse_image(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """A x exploiting the sparsity of x."""
    idx = np.flatnonzero(x)
    if idx.size == 0:
        return np.zeros(a.shape[0])
    return a[:, idx] @ x[idx]


def _run_outer(
    problem: ProblemInstance,
    cfg: SolverConfig,
    step: Callable,
    on_iterate: Optional[Callable] = None,
) -> RecoveryResult:
    """Shared outer loop: gradient step, algorithm-specific update,
    residual/stagnation/budget stopping. The measurement residual is
    carried between iterations, and iterate images use their sparsity."""
    a = problem.matrix
    y = problem.y
    n = a.shape[1]
    truth = problem.truth.dense() if problem.truth is not None else None
    truth_norm = float(np.linalg.norm(truth)) if truth is not None else 0.0

    started = time.perf_counter()
    x = np.zeros(n)
    residual = y
    y_norm = float(np.linalg.norm(y))
    threshold = cfg.residual_tolerance * y_norm
    residual_history = [y_norm]
    error_history = [1.0] if truth is not None else None

    reason = ConvergedReason.MAX_ITER
    iterations = 0
    if y_norm <= threshold:
        reason = ConvergedReason.RESIDUAL
    else:
        for p in range(1, cfg.max_outer_iterations + 1):
            u = x + cfg.step_length * (a.T @ residual)
            x_new, w_minus, w_plus = step(u, x)
            residual = y - _sparse_image(a, x_new)
            res = float(np.linalg.norm(residual))
            residual_history.append(res)
            if truth is not None:
                error_history.append(
                    float(np.linalg.norm(x_new - truth)) / truth_norm)
            iterations = p
            if on_iterate is not None:
                on_iterate(IterateState(
                    iteration=p, x=x_new, u=u, w_minus=w_minus,
                    w_plus=w_plus, f_history=list(residual_history)))
            if not math.isfinite(res):
                # Divergent iterate: counted as non-convergence.
                x = x_new
                break
            if res <= threshold:
                x = x_new
                reason = ConvergedReason.RESIDUAL
                break
            if (cfg.stagnation_enabled
                    and float(np.linalg.norm(x_new - x))
                    <= cfg.stagnation_tolerance * max(1.0, float(np.linalg.norm(x)))):
                x = x_new
                reason = ConvergedReason.STAGNATION
                break
            x = x_new

    return RecoveryResult(
        x_hat=x,
        iterations_used=iterations,
        converged_reason=reason,
        residual_history=residual_history,
        error_history=error_history,
        wall_time=time.perf_counter() - started,
    )


def _nt_step(problem: ProblemInstance, cfg: SolverConfig, project: bool) -> Callable:
    a = problem.matrix
    y = problem.y
    k = problem.k
    base_reg = Regularizer(cfg.regularizer)

    def step(u, x):
        reg = base_reg.bound(u)
        alpha = cfg.alpha_policy.resolve(reg, a, u)
        w_minus = _indicator(top_k_indices(u, k), u.shape[0])
        w_plus = nt_inner_loop(
            a, y, u, k, alpha, cfg.inner_iterations, reg,
            termination_epsilon=cfg.termination_epsilon, w_start=w_minus)
        if project:
            support = np.flatnonzero(u * w_plus)
            x_new = least_squares_on_support(a, y, support)
        else:
            x_new = u * w_plus
        return x_new, w_minus, w_plus

    return step


def recover_nt(problem: ProblemInstance, cfg: SolverConfig,
               on_iterate: Optional[Callable] = None) -> RecoveryResult:
    """Natural thresholding: keep the selected entries of u directly."""
    return _run_outer(problem, cfg, _nt_step(problem, cfg, project=False),
                      on_iterate)


def recover_ntp(problem: ProblemInstance, cfg: SolverConfig,
                on_iterate: Optional[Callable] = None) -> RecoveryResult:
    """Natural thresholding pursuit: least-squares refit on the selected
    support (which may have fewer than k indices where u vanishes)."""
    return _run_outer(problem, cfg, _nt_step(problem, cfg, project=True),
                      on_iterate)
