"""Dense linear-algebra kernels and the NTKM matrix file format.

Matrices are 2-D float64 numpy arrays; the on-disk layout is column-major
so that column extraction of serialized matrices stays contiguous.
Vectors are 1-D float64 arrays. Index sets are strictly increasing arrays
of 0-based positions. All operations are pure and thread-safe on shared
read-only inputs.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ContractViolationError
from .rng import Stream

NTKM_MAGIC = b"NTKM"
NTKM_VERSION = 1

# Internal seed for the power-iteration restart perturbation.
_POWER_RESTART_SEED = 0x4E544B4D01


def as_vector(x, name: str = "vector") -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ContractViolationError(f"{name} must be 1-D, got shape {x.shape}")
    return x


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ContractViolationError(f"{name} must be 2-D, got shape {a.shape}")
    return a


def as_index_set(indices, dim: int) -> np.ndarray:
    """Validate a strictly increasing index set against an ambient dimension."""
    idx = np.asarray(indices, dtype=np.intp)
    if idx.ndim != 1:
        raise ContractViolationError("index set must be 1-D")
    if idx.size:
        if idx[0] < 0 or idx[-1] >= dim:
            raise ContractViolationError(
                f"index set entries must lie in [0, {dim}), got range "
                f"[{idx[0]}, {idx[-1]}]")
        if np.any(np.diff(idx) <= 0):
            raise ContractViolationError("index set must be strictly increasing")
    return idx


def mat_vec(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Product A x."""
    a = as_matrix(a)
    x = as_vector(x, "x")
    if x.shape[0] != a.shape[1]:
        raise ContractViolationError(
            f"mat_vec: x has length {x.shape[0]}, expected {a.shape[1]}")
    return a @ x


def mat_t_vec(a: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Product A^T r (the building block of the error-metric gradient)."""
    a = as_matrix(a)
    r = as_vector(r, "r")
    if r.shape[0] != a.shape[0]:
        raise ContractViolationError(
            f"mat_t_vec: r has length {r.shape[0]}, expected {a.shape[0]}")
    return a.T @ r


def least_squares_on_support(a: np.ndarray, y: np.ndarray, support) -> np.ndarray:
    """Minimize ||y - A z||_2 over vectors supported on ``support``.

    Returns the full-length solution with entries outside ``support``
    exactly zero. Rank-deficient (or underdetermined) column submatrices
    yield the minimum-norm solution; the call never fails for conforming
    shapes.
    """
    a = as_matrix(a)
    y = as_vector(y, "y")
    if y.shape[0] != a.shape[0]:
        raise ContractViolationError(
            f"least_squares_on_support: y has length {y.shape[0]}, "
            f"expected {a.shape[0]}")
    idx = as_index_set(support, a.shape[1])
    z = np.zeros(a.shape[1])
    if idx.size:
        coef, _, _, _ = np.linalg.lstsq(a[:, idx], y, rcond=None)
        z[idx] = coef
    return z


@dataclass(frozen=True)
class PowerIterationResult:
    """Dominant-eigenvalue estimate for a symmetric PSD operator."""

    value: float
    converged: bool
    iterations: int


def lambda_max_sym(
    apply: Callable[[np.ndarray], np.ndarray],
    dim: int,
    tol: float = 1e-6,
    max_iter: int = 500,
) -> PowerIterationResult:
    """Estimate the largest eigenvalue of a symmetric PSD operator.

    Power iteration from the normalized all-ones vector; the running
    estimate is the Rayleigh quotient, so it never exceeds the true
    dominant eigenvalue. After the estimate first stabilizes to relative
    tolerance ``tol``, the iterate is perturbed once with a deterministic
    seeded direction and iterated to a second stabilization; this guards
    against a start vector (near-)orthogonal to the dominant eigenspace.
    Non-convergence within ``max_iter`` total applications returns the
    best estimate with ``converged`` False.
    """
    if dim <= 0:
        raise ContractViolationError("dim must be positive")
    if tol <= 0:
        raise ContractViolationError("tol must be positive")

    v = np.full(dim, 1.0 / np.sqrt(dim))
    best = 0.0
    iterations = 0
    perturbed = False
    converged = False
    estimate = 0.0

    while iterations < max_iter:
        w = apply(v)
        iterations += 1
        rayleigh = float(v @ w)
        if rayleigh > best:
            best = rayleigh
        norm_w = float(np.linalg.norm(w))
        if norm_w == 0.0:
            # v lies in the nullspace; either M = 0 or the start was
            # unlucky. One seeded restart decides which.
            if perturbed:
                return PowerIterationResult(best, True, iterations)
            v = _restart_direction(dim)
            perturbed = True
            continue
        stable = abs(rayleigh - estimate) <= tol * max(abs(rayleigh), 1e-300)
        estimate = rayleigh
        v = w / norm_w
        if stable:
            if perturbed:
                converged = True
                break
            v = _perturb(v, dim)
            perturbed = True

    return PowerIterationResult(best, converged, iterations)


def _restart_direction(dim: int) -> np.ndarray:
    g = Stream(_POWER_RESTART_SEED).gaussian(dim)
    norm = float(np.linalg.norm(g))
    if norm == 0.0:
        g = np.zeros(dim)
        g[0] = 1.0
        return g
    return g / norm


def _perturb(v: np.ndarray, dim: int) -> np.ndarray:
    mixed = v + 1e-3 * _restart_direction(dim)
    return mixed / float(np.linalg.norm(mixed))


def write_ntkm(path, a: np.ndarray) -> None:
    """Write a matrix in NTKM format.

    Layout: magic ``NTKM``, version byte 0x01, rows and cols as
    little-endian uint32, then rows*cols little-endian float64 values in
    column-major order.
    """
    a = as_matrix(a)
    rows, cols = a.shape
    header = struct.pack("<4sBII", NTKM_MAGIC, NTKM_VERSION, rows, cols)
    body = np.asfortranarray(a, dtype="<f8").tobytes(order="F")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(body)


def read_ntkm(path) -> np.ndarray:
    """Read a matrix written by :func:`write_ntkm`."""
    with open(path, "rb") as fh:
        raw = fh.read()
    header_size = struct.calcsize("<4sBII")
    if len(raw) < header_size:
        raise ContractViolationError("NTKM file truncated before header")
    magic, version, rows, cols = struct.unpack_from("<4sBII", raw)
    if magic != NTKM_MAGIC:
        raise ContractViolationError(f"bad NTKM magic {magic!r}")
    if version != NTKM_VERSION:
        raise ContractViolationError(f"unsupported NTKM version {version}")
    expected = header_size + rows * cols * 8
    if len(raw) != expected:
        raise ContractViolationError(
            f"NTKM payload size {len(raw)} does not match header "
            f"({rows}x{cols} -> {expected} bytes)")
    body = np.frombuffer(raw, dtype="<f8", offset=header_size)
    return np.asfortranarray(body.reshape((rows, cols), order="F"))
