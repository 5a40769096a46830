"""Deterministic pseudo-random numbers shared by every stochastic component.

The generator is SplitMix64: draw k of a stream seeded with s is
``mix64(s + k * GAMMA)`` where GAMMA is a fixed odd constant and ``mix64`` a
bijective finalizer.  Because each output depends only on the draw index,
whole blocks of the stream can be produced with vectorised uint64 arithmetic
and are bit-identical to repeated scalar draws.

Gaussian variates come from the Box-Muller transform applied to consecutive
uniform pairs; ``normals(n)`` always consumes ``2 * ceil(n / 2)`` raw draws.
Streams are reproducible per seed within this codebase only; no compatibility
with any other library's streams is attempted.
"""

from __future__ import annotations

import numpy as np

_MASK = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_TWO53 = float(1 << 53)


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


def _mix64_block(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


class Rng:
    """Counter-based SplitMix64 stream with scalar and block interfaces."""

    def __init__(self, seed: int):
        self._seed = int(seed) & _MASK
        self._drawn = 0  # number of 64-bit outputs consumed so far

    def next_u64(self) -> int:
        self._drawn += 1
        return _mix64((self._seed + self._drawn * _GAMMA) & _MASK)

    def _block_u64(self, n: int) -> np.ndarray:
        ks = np.arange(self._drawn + 1, self._drawn + n + 1, dtype=np.uint64)
        self._drawn += n
        return _mix64_block(np.uint64(self._seed) + ks * np.uint64(_GAMMA))

    def uniform(self) -> float:
        """One double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) / _TWO53

    def uniforms(self, n: int) -> np.ndarray:
        """n doubles in [0, 1)."""
        return np.asarray(self._block_u64(n) >> np.uint64(11), dtype=np.float64) / _TWO53

    def normals(self, n: int, mean: float = 0.0, std: float = 1.0) -> np.ndarray:
        """n Gaussian draws via Box-Muller on ceil(n/2) uniform pairs.

        u1 is mapped into (0, 1] so log(u1) is always finite.
        """
        pairs = (n + 1) // 2
        raw = self._block_u64(2 * pairs)
        u1 = (np.asarray(raw[0::2] >> np.uint64(11), dtype=np.float64) + 1.0) / _TWO53
        u2 = np.asarray(raw[1::2] >> np.uint64(11), dtype=np.float64) / _TWO53
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        z = np.empty(2 * pairs)
        z[0::2] = r * np.cos(theta)
        z[1::2] = r * np.sin(theta)
        return mean + std * z[:n]

    def below(self, n: int) -> int:
        """Integer uniform on [0, n) by rejection (no modulo bias)."""
        if n <= 0:
            raise ValueError("below() needs n >= 1")
        limit = _MASK - (_MASK + 1) % n  # last acceptable raw value
        while True:
            u = self.next_u64()
            if u <= limit:
                return u % n

    def permutation(self, n: int) -> np.ndarray:
        """Fisher-Yates permutation of range(n)."""
        idx = np.arange(n)
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            idx[i], idx[j] = idx[j], idx[i]
        return idx
