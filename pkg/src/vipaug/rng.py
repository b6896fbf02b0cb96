"""Deterministic random streams with stable per-sample substreams.

A stream is a pure function of (seed, derivation path): the same seed
and the same substream indices always produce the same draw sequence,
no matter how many workers run or in what order samples complete.
"""

from __future__ import annotations

import numpy as np


class RngStream:
    def __init__(self, seed: int, path: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.path = tuple(int(p) for p in path)
        seq = np.random.SeedSequence(self.seed, spawn_key=self.path)
        self._gen = np.random.Generator(np.random.PCG64(seq))

    def substream(self, index: int) -> "RngStream":
        """Independent stream derived from (seed, path + (index,))."""
        return RngStream(self.seed, self.path + (int(index),))

    def uniform(self, low: float = 0.0, high: float = 1.0) -> float:
        return float(self._gen.uniform(low, high))

    def integers(self, low: int, high: int) -> int:
        """One integer drawn uniformly from [low, high)."""
        return int(self._gen.integers(low, high))

    def standard_normal(self, shape) -> np.ndarray:
        return self._gen.standard_normal(shape)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, path={self.path})"
