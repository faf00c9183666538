"""Index-selection operators: k largest magnitudes, k smallest entries,
and hard thresholding.

Ties are exact floating-point equalities and always resolve to the
smallest index, which keeps every selection deterministic. Selection runs
on a partition of the value array plus an ordered scan of the boundary
tie group, so no full sort of distinct values is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError
from .linalg import as_vector


@dataclass(frozen=True)
class ThresholdResult:
    """Selected index set plus the thresholded vector (zero off-support)."""

    indices: np.ndarray
    vector: np.ndarray


def _check_k(z: np.ndarray, k: int) -> None:
    if not 1 <= k <= z.shape[0]:
        raise ContractViolationError(
            f"k must satisfy 1 <= k <= {z.shape[0]}, got {k}")


def _smallest_k(values: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k smallest values, ties to the smallest index."""
    n = values.shape[0]
    if k == n:
        return np.arange(n, dtype=np.intp)
    cut = np.partition(values, k - 1)[k - 1]
    below = np.flatnonzero(values < cut)
    at_cut = np.flatnonzero(values == cut)[: k - below.size]
    return np.sort(np.concatenate([below, at_cut]))


def top_k_indices(z, k: int) -> np.ndarray:
    """Index set of the k largest magnitudes of z, sorted ascending."""
    z = as_vector(z, "z")
    _check_k(z, k)
    return _smallest_k(-np.abs(z), k)


def bottom_k_indices(z, k: int) -> np.ndarray:
    """Index set of the k smallest (signed) entries of z, sorted ascending."""
    z = as_vector(z, "z")
    _check_k(z, k)
    return _smallest_k(z, k)


def hard_threshold(z, k: int) -> ThresholdResult:
    """Keep the k largest magnitudes of z and zero the remaining entries."""
    z = as_vector(z, "z")
    idx = top_k_indices(z, k)
    vector = np.zeros_like(z)
    vector[idx] = z[idx]
    return ThresholdResult(indices=idx, vector=vector)
