"""Reproducible random streams.

Seeds are derived with SplitMix64, bits come from PCG64 (whose output
stream numpy keeps stable across releases and platforms), and Gaussians are
produced by the Box-Muller transform, so a (seed, stream) pair pins down
every variate.
"""

from __future__ import annotations

import numpy as np

__all__ = ["splitmix64", "derive_seed", "Rng"]

_MASK = (1 << 64) - 1
ALGORITHM = "pcg64+boxmuller/splitmix64-v1"


def splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(master: int, stream: int) -> int:
    """64-bit seed of stream `stream` under master seed `master`."""
    return splitmix64((splitmix64(master & _MASK) + stream) & _MASK)


class Rng:
    """Random stream identified by ``(seed, stream)``."""

    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed)
        self.stream = int(stream)
        self._bits = np.random.PCG64(derive_seed(self.seed, self.stream))

    def __repr__(self):
        return f"Rng(seed={self.seed}, stream={self.stream}, algorithm={ALGORITHM!r})"

    def uniform(self, size: int) -> np.ndarray:
        """Doubles in [0, 1) built from the top 53 bits of each word."""
        raw = self._bits.random_raw(size)
        return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)

    def normal(self, size: int, sd: float = 1.0) -> np.ndarray:
        """Gaussian variates with mean 0 and standard deviation `sd`."""
        pairs = (size + 1) // 2
        u = self.uniform(2 * pairs)
        u1 = 1.0 - u[0::2]
        u2 = u[1::2]
        radius = np.sqrt(-2.0 * np.log(u1))
        angle = 2.0 * np.pi * u2
        z = np.empty(2 * pairs)
        z[0::2] = radius * np.cos(angle)
        z[1::2] = radius * np.sin(angle)
        return sd * z[:size]
