"""Seeded random stream with a fixed generator algorithm.

All stochastic choices in the package (augmentation draws, parameter
initialization, batch shuffling, synthetic data jitter) go through a
RandomStream so that a single seed pins the whole pipeline. PCG64 is
fixed as the generator: same seed + same draw order gives the same
values on every platform.
"""

from __future__ import annotations

import numpy as np


class RandomStream:
    """Deterministic random source wrapping a PCG64 generator.

    Single-owner: never share one stream across concurrent tasks.
    Fork with :meth:`child` to derive independent streams.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self.position = 0
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None) -> np.ndarray | float:
        self.position += 1
        return self._gen.uniform(low, high, size=size)

    def normal(self, loc: float = 0.0, scale: float = 1.0, size=None) -> np.ndarray | float:
        self.position += 1
        return self._gen.normal(loc, scale, size=size)

    def integers(self, low: int, high: int, size=None):
        """Uniform integers in [low, high] (both endpoints inclusive)."""
        self.position += 1
        return self._gen.integers(low, high, size=size, endpoint=True)

    def choice(self, n: int, size: int, replace: bool = False) -> np.ndarray:
        """Draw `size` indices from range(n)."""
        self.position += 1
        return self._gen.choice(n, size=size, replace=replace)

    def weighted_index(self, weights) -> int:
        """Index drawn proportional to non-negative weights."""
        w = np.asarray(weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0 or np.any(w < 0) or w.sum() <= 0:
            raise ValueError("weights must be a non-empty 1-D array of non-negative values")
        self.position += 1
        return int(self._gen.choice(w.size, p=w / w.sum()))

    def permutation(self, n: int) -> np.ndarray:
        self.position += 1
        return self._gen.permutation(n)

    def child(self, tag: int) -> "RandomStream":
        """Derive an independent stream; (seed, tag) fully determines it."""
        mixed = np.random.SeedSequence([self.seed & 0xFFFFFFFFFFFFFFFF, int(tag)])
        stream = RandomStream.__new__(RandomStream)
        stream.seed = int(mixed.generate_state(1, np.uint64)[0])
        stream.position = 0
        stream._gen = np.random.Generator(np.random.PCG64(mixed))
        return stream
