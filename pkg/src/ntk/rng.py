"""Seeded random number generation with bit-exact reproducibility.

The generator is a 64-bit counter stream: draw ``i`` of a stream seeded
with ``s`` is ``finalize(s + (i+1) * GOLDEN)`` where GOLDEN is the odd
64-bit golden-ratio constant and ``finalize`` is the standard two-round
xorshift-multiply mixer (shift constants 30/27/31, multipliers
0xBF58476D1CE4E5B9 and 0x94D049BB133111EB). Counter addressing makes bulk
generation vectorizable and gives the prefix property: the first ``j``
draws of a stream do not depend on how many draws follow.

Gaussian variates use the Box-Muller transform on consecutive uniform
pairs; a pair (u1, u2) yields the two draws r*cos(2*pi*u2), r*sin(2*pi*u2)
with r = sqrt(-2*ln(u1)), emitted in that order. Uniforms are mapped from
the high 53 bits into (0, 1] so the logarithm is always finite.

Integer streams are bit-exact everywhere; sequences that pass through
exp/log/sqrt/cos are bit-exact only on a fixed platform/libm.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MULT1 = 0xBF58476D1CE4E5B9
_MULT2 = 0x94D049BB133111EB


def mix64(value: int) -> int:
    """Finalize a 64-bit integer with the xorshift-multiply mixer."""
    z = (value & MASK64) * GOLDEN & MASK64
    z = (z ^ (z >> 30)) * _MULT1 & MASK64
    z = (z ^ (z >> 27)) * _MULT2 & MASK64
    return z ^ (z >> 31)


def derive_substream(master_seed: int, stream_id: int) -> int:
    """Seed for substream ``stream_id``: master XOR (stream_id * GOLDEN),
    with wrapping 64-bit multiplication."""
    return (master_seed ^ (stream_id * GOLDEN & MASK64)) & MASK64


class Stream:
    """Sequential view over one counter-addressed random stream."""

    def __init__(self, seed: int):
        self._seed = np.uint64(seed & MASK64)
        self._position = 0

    def raw(self, count: int) -> np.ndarray:
        """Next ``count`` raw 64-bit draws as a uint64 array."""
        if count < 0:
            raise ValueError("count must be nonnegative")
        start = self._position
        self._position += count
        idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
        z = self._seed + idx * np.uint64(GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MULT1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MULT2)
        return z ^ (z >> np.uint64(31))

    def uniform(self, count: int) -> np.ndarray:
        """Next ``count`` uniforms in the half-open interval (0, 1]."""
        bits = self.raw(count) >> np.uint64(11)
        return (bits.astype(np.float64) + 1.0) * 2.0**-53

    def gaussian(self, count: int) -> np.ndarray:
        """Next ``count`` standard normal draws (Box-Muller pairs)."""
        pairs = (count + 1) // 2
        u = self.uniform(2 * pairs)
        r = np.sqrt(-2.0 * np.log(u[0::2]))
        theta = (2.0 * np.pi) * u[1::2]
        out = np.empty(2 * pairs)
        out[0::2] = r * np.cos(theta)
        out[1::2] = r * np.sin(theta)
        return out[:count]

    def subset(self, n: int, k: int) -> np.ndarray:
        """Uniform k-subset of {0, ..., n-1}, sorted ascending.

        Draws one 64-bit key per position and keeps the k smallest keys
        (key ties, probability ~ n^2 / 2^64, resolve to lower indices).
        """
        if not 0 <= k <= n:
            raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
        keys = self.raw(n)
        order = np.argsort(keys, kind="stable")
        return np.sort(order[:k])
