"""Problem-instance construction: seeded Gaussian sensing matrices,
sparse ground-truth signals, and noisy measurement synthesis.

All generators are pure functions of their seeds. A master seed fans out
into independent substreams for the matrix, the signal, and the noise
vector via ``derive_substream`` (XOR with multiples of the golden-ratio
constant), so regenerating any component in isolation is possible.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError
from .linalg import as_index_set, as_matrix, as_vector
from .rng import Stream, derive_substream

_MATRIX_STREAM = 1
_SIGNAL_STREAM = 2
_NOISE_STREAM = 3

# Columns whose norm is already this close to 1 are left untouched, which
# makes column normalization idempotent bit-for-bit.
_UNIT_NORM_SLACK = 1e-14


@dataclass(frozen=True)
class SensingMatrix:
    """Dense sensing matrix with its generation metadata."""

    matrix: np.ndarray
    normalized: bool
    seed: int

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class SparseSignal:
    """Ground-truth sparse vector stored as (support, values)."""

    dimension: int
    support: np.ndarray
    values: np.ndarray
    seed: int

    def __post_init__(self):
        support = as_index_set(self.support, self.dimension)
        values = as_vector(self.values, "values")
        if support.shape[0] != values.shape[0]:
            raise ContractViolationError(
                "support and values must have equal length")
        if np.any(values == 0.0):
            raise ContractViolationError("signal values must be nonzero")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "values", values)

    @property
    def sparsity(self) -> int:
        return self.support.shape[0]

    def dense(self) -> np.ndarray:
        x = np.zeros(self.dimension)
        x[self.support] = self.values
        return x


@dataclass(frozen=True)
class ProblemInstance:
    """Measurements plus everything needed to score a recovery."""

    sensing: SensingMatrix
    y: np.ndarray
    k: int
    truth: SparseSignal | None = None
    noise_level: float = 0.0
    noise_seed: int = 0

    def __post_init__(self):
        y = as_vector(self.y, "y")
        if y.shape[0] != self.sensing.rows:
            raise ContractViolationError(
                f"y has length {y.shape[0]}, expected {self.sensing.rows}")
        if not 1 <= self.k <= self.sensing.rows:
            raise ContractViolationError(
                f"k must satisfy 1 <= k <= {self.sensing.rows}, got {self.k}")
        if self.noise_level < 0:
            raise ContractViolationError("noise_level must be nonnegative")
        object.__setattr__(self, "y", y)

    @property
    def matrix(self) -> np.ndarray:
        return self.sensing.matrix


def normalize_columns(a: np.ndarray) -> np.ndarray:
    """Scale every column to unit l2-norm.

    Columns already within ``_UNIT_NORM_SLACK`` of unit norm (and exactly
    zero columns) are returned untouched, so applying the function twice
    is a bit-exact no-op.
    """
    a = as_matrix(a)
    norms = np.linalg.norm(a, axis=0)
    scale = np.where(
        (norms == 0.0) | (np.abs(norms - 1.0) < _UNIT_NORM_SLACK), 1.0, norms)
    return a / scale


def gen_gaussian_matrix(m: int, n: int, seed: int, normalize: bool = True) -> SensingMatrix:
    """i.i.d. standard-normal m-by-n matrix, optionally column-normalized.

    Entries fill the matrix in column-major order from a single seeded
    stream, so identical (m, n, seed) reproduce the matrix bit-exactly.
    Requires m <= n (the underdetermined measurement regime).
    """
    if m < 1 or n < 1:
        raise ContractViolationError("matrix dimensions must be positive")
    if m > n:
        raise ContractViolationError(
            f"need m <= n for an underdetermined sensing matrix, got {m}x{n}")
    draws = Stream(seed).gaussian(m * n)
    a = np.asfortranarray(draws.reshape((m, n), order="F"))
    if normalize:
        a = normalize_columns(a)
    return SensingMatrix(matrix=a, normalized=normalize, seed=seed)


def gen_sparse_signal(n: int, k: int, seed: int) -> SparseSignal:
    """k-sparse signal: uniform support, i.i.d. standard-normal values.

    The stream is consumed as n subset keys followed by the value draws;
    any value that comes out exactly 0.0 is redrawn from the stream tail
    (a probability-zero guard that keeps the nonzero invariant).
    """
    if not 1 <= k <= n:
        raise ContractViolationError(f"need 1 <= k <= n, got k={k}, n={n}")
    stream = Stream(seed)
    support = stream.subset(n, k)
    values = stream.gaussian(k)
    while True:
        zero = values == 0.0
        if not zero.any():
            break
        values[zero] = stream.gaussian(int(zero.sum()))
    return SparseSignal(dimension=n, support=support, values=values, seed=seed)


def gen_instance(m: int, n: int, k: int, noise_level: float, master_seed: int) -> ProblemInstance:
    """Full synthetic recovery problem y = A x + xi * v.

    A is column-normalized Gaussian, x is k-sparse Gaussian, and v is a
    Gaussian vector scaled to unit l2-norm, so ||y - A x||_2 equals
    ``noise_level`` exactly (up to roundoff). With ``noise_level`` 0 the
    noise term is skipped entirely and y = A x bit-exactly.
    """
    if noise_level < 0:
        raise ContractViolationError("noise_level must be nonnegative")
    seed_a = derive_substream(master_seed, _MATRIX_STREAM)
    seed_x = derive_substream(master_seed, _SIGNAL_STREAM)
    seed_v = derive_substream(master_seed, _NOISE_STREAM)
    sensing = gen_gaussian_matrix(m, n, seed_a, normalize=True)
    truth = gen_sparse_signal(n, k, seed_x)
    y = sensing.matrix @ truth.dense()
    if noise_level > 0:
        v = Stream(seed_v).gaussian(m)
        v = v / np.linalg.norm(v)
        y = y + noise_level * v
    return ProblemInstance(
        sensing=sensing, y=y, k=k, truth=truth,
        noise_level=noise_level, noise_seed=seed_v)


def write_signal_csv(path, signal: SparseSignal) -> None:
    """Write a sparse signal as ``index,value`` rows (support only)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "value"])
        for i, v in zip(signal.support, signal.values):
            writer.writerow([int(i), repr(float(v))])


def write_vector_csv(path, vec) -> None:
    """Write a dense vector as ``index,value`` rows."""
    vec = as_vector(vec)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "value"])
        for i, v in enumerate(vec):
            writer.writerow([i, repr(float(v))])


def read_indexed_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read ``index,value`` rows back as (indices, values)."""
    indices: list[int] = []
    values: list[float] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["index", "value"]:
            raise ContractViolationError(
                f"expected header 'index,value', got {header!r}")
        for row in reader:
            indices.append(int(row[0]))
            values.append(float(row[1]))
    return np.asarray(indices, dtype=np.intp), np.asarray(values)
