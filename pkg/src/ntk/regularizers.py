"""Binary regularizers and the regularized selection objective.

A binary regularizer is a smooth positive function on a neighborhood of
[0, 1]^n whose minimum over the box is attained exactly at the 0/1
vectors. All four shipped kinds are built from the concave kernel

    tau(t) = (t + 1/2) * (3/2 - t),

which is positive on (-1/2, 3/2) and minimal (value 3/4) at t in {0, 1}:

    quad      sum tau(w_i)
    log       sum log(1 + tau(w_i))
    rational  sum tau(w_i) / (1 + tau(w_i))
    wquad     sum u_i^2 * tau(w_i)   (weights u required)

The selection objective for a gradient-step vector u is

    g_alpha(w) = ||y - A (u . w)||_2^2 + alpha * phi(w),

where ``.`` is the entrywise product. ``alpha_star`` returns the concavity
threshold: for alpha at or above it g_alpha is concave, which is what
makes the linearized selection step a descent step on binary iterates.

Other smooth concave compositions g(tau(.)) would fit the same interface,
but exactly these four kinds are shipped.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError
from .linalg import as_matrix, as_vector, lambda_max_sym

KIND_TOKENS = ("quad", "log", "rational", "wquad")

# log/rational need tau > 0 strictly away from the domain edge; quad and
# wquad are polynomial and tolerate the closed interval.
_EDGE_SLACK = 1e-12

_ALPHA_MULTIPLIER = {"quad": 1.0, "log": 2.0, "rational": 4.0, "wquad": 1.0}


@dataclass(frozen=True)
class Regularizer:
    """One of the four shipped regularizer kinds, plus weights for wquad."""

    kind: str
    weights: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in KIND_TOKENS:
            raise ContractViolationError(
                f"unknown regularizer kind {self.kind!r}; "
                f"expected one of {KIND_TOKENS}")
        if self.weights is not None:
            w = as_vector(self.weights, "weights")
            object.__setattr__(self, "weights", w)

    def bound(self, u) -> "Regularizer":
        """Return a copy with weights bound to ``u`` when the kind needs
        weights and none are set; other kinds pass through unchanged."""
        if self.kind == "wquad" and self.weights is None:
            return Regularizer("wquad", np.asarray(u, dtype=np.float64))
        return self

    def _checked_weights(self, n: int) -> np.ndarray:
        if self.weights is None:
            raise ContractViolationError("wquad regularizer requires weights")
        if self.weights.shape[0] != n:
            raise ContractViolationError(
                f"weights have length {self.weights.shape[0]}, expected {n}")
        if not np.any(self.weights):
            raise ContractViolationError("wquad weights must be nonzero")
        return self.weights


def tau(t: np.ndarray) -> np.ndarray:
    """Concave kernel (t + 1/2)(3/2 - t), minimal on {0, 1}."""
    return (t + 0.5) * (1.5 - t)


def _check_domain(reg: Regularizer, w: np.ndarray) -> None:
    slack = _EDGE_SLACK if reg.kind in ("log", "rational") else 0.0
    lo, hi = -0.5 + slack, 1.5 - slack
    if w.size and (w.min() < lo or w.max() > hi):
        raise ContractViolationError(
            f"w entries must lie in [{lo}, {hi}] for kind {reg.kind!r}")


def phi_value(reg: Regularizer, w) -> float:
    """Regularizer value at w."""
    w = as_vector(w, "w")
    _check_domain(reg, w)
    b = tau(w)
    if reg.kind == "quad":
        return float(np.sum(b))
    if reg.kind == "log":
        return float(np.sum(np.log1p(b)))
    if reg.kind == "rational":
        return float(np.sum(b / (1.0 + b)))
    u = reg._checked_weights(w.shape[0])
    return float(np.sum(u * u * b))


def phi_gradient(reg: Regularizer, w) -> np.ndarray:
    """Entrywise gradient of the regularizer at w."""
    w = as_vector(w, "w")
    _check_domain(reg, w)
    slope = 1.0 - 2.0 * w
    if reg.kind == "quad":
        return slope
    if reg.kind == "log":
        return slope / (1.0 + tau(w))
    if reg.kind == "rational":
        return slope / (1.0 + tau(w)) ** 2
    u = reg._checked_weights(w.shape[0])
    return u * u * slope


def phi_hessian_diag(reg: Regularizer, w) -> np.ndarray:
    """Diagonal of the (diagonal) regularizer Hessian at w."""
    w = as_vector(w, "w")
    _check_domain(reg, w)
    if reg.kind == "quad":
        return np.full(w.shape[0], -2.0)
    b = tau(w)
    if reg.kind == "log":
        return (-6.0 + 2.0 * b) / (1.0 + b) ** 2
    if reg.kind == "rational":
        slope = 1.0 - 2.0 * w
        return (-2.0 * (1.0 + b) - 2.0 * slope * slope) / (1.0 + b) ** 3
    u = reg._checked_weights(w.shape[0])
    return -2.0 * u * u


@dataclass(frozen=True)
class ObjectiveEval:
    """One evaluation of g_alpha = f + alpha * phi and its gradient."""

    f_value: float
    phi_value: float
    g_value: float
    gradient: np.ndarray
    alpha: float


def eval_g_alpha(a, y, u, w, alpha: float, reg: Regularizer) -> ObjectiveEval:
    """Evaluate the regularized selection objective at w.

    f(w) = ||y - A(u . w)||_2^2 with gradient -2 u . (A^T (y - A(u . w)));
    the regularizer gradient is added with weight alpha. For the wquad
    kind with unbound weights, the weights default to u itself.
    """
    a = as_matrix(a)
    y = as_vector(y, "y")
    u = as_vector(u, "u")
    w = as_vector(w, "w")
    if y.shape[0] != a.shape[0] or u.shape[0] != a.shape[1] or w.shape[0] != a.shape[1]:
        raise ContractViolationError(
            f"shape mismatch: A is {a.shape}, |y|={y.shape[0]}, "
            f"|u|={u.shape[0]}, |w|={w.shape[0]}")
    if alpha <= 0:
        raise ContractViolationError("alpha must be positive")
    reg = reg.bound(u)
    residual = y - a @ (u * w)
    f = float(residual @ residual)
    phi = phi_value(reg, w)
    gradient = -2.0 * u * (a.T @ residual) + alpha * phi_gradient(reg, w)
    return ObjectiveEval(
        f_value=f, phi_value=phi, g_value=f + alpha * phi,
        gradient=gradient, alpha=alpha)


def alpha_star(reg: Regularizer, a, u=None, safety: float = 1.02) -> float:
    """Concavity threshold for g_alpha, scaled by a safety factor.

    quad / log / rational need 1x / 2x / 4x the dominant eigenvalue of
    U A^T A U (U = diag(u)); wquad needs the dominant eigenvalue of
    A^T A regardless of u. Both operators are applied matrix-free. The
    default ``safety`` 1.02 absorbs the power-iteration underestimate.
    A zero u with the unweighted kinds makes f constant in w, so 0 is
    returned with a warning.
    """
    a = as_matrix(a)
    if safety < 1.0:
        raise ContractViolationError("safety must be at least 1")
    n = a.shape[1]
    if reg.kind == "wquad":
        def apply(v):
            return a.T @ (a @ v)
    else:
        if u is None:
            raise ContractViolationError(
                f"alpha_star with kind {reg.kind!r} requires u")
        u = as_vector(u, "u")
        if u.shape[0] != n:
            raise ContractViolationError(
                f"u has length {u.shape[0]}, expected {n}")
        if not np.any(u):
            warnings.warn(
                "alpha_star: u is identically zero, so the data term is "
                "constant and any alpha keeps the objective concave",
                RuntimeWarning, stacklevel=2)
            return 0.0

        def apply(v):
            return u * (a.T @ (a @ (u * v)))

    lam = lambda_max_sym(apply, n).value
    return safety * _ALPHA_MULTIPLIER[reg.kind] * lam
