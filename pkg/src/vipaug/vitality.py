"""Partition phase coordinates into vital and non-vital sets.

An S x S x 1 argmax filter tiles the (u, v) plane of each channel
without overlap; the coordinate holding the largest amplitude in each
window is vital. Ties break row-major (first maximum wins). When the
filter size does not divide H or W, trailing partial windows are
treated as smaller windows with their own argmax.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class VitalMask:
    """Boolean grid marking per-window argmax coordinates."""

    bits: np.ndarray
    filter_size: int

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=bool)
        if bits.ndim != 3:
            raise ValueError(f"expected an H x W x C mask, got shape {bits.shape}")
        if self.filter_size < 1:
            raise ValueError(f"filter_size must be >= 1, got {self.filter_size}")
        object.__setattr__(self, "bits", bits)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.bits.shape


@dataclass(frozen=True)
class RankMask(VitalMask):
    """Marks the k-th largest amplitude coordinate per window; k=1 is vital."""

    rank: int = 1

    def __post_init__(self):
        super().__post_init__()
        if self.rank < 1:
            raise ValueError(f"rank must be >= 1, got {self.rank}")


def _as_grid(amplitude: np.ndarray) -> np.ndarray:
    amp = np.asarray(amplitude, dtype=np.float64)
    if amp.ndim != 3:
        raise ValueError(f"expected an H x W x C grid, got shape {amp.shape}")
    if not np.all(np.isfinite(amp)):
        raise ValueError("amplitude grid contains non-finite values")
    if np.any(amp < 0):
        raise ValueError("amplitude grid must be non-negative")
    return amp


def _rank_bits(amp: np.ndarray, size: int, rank: int) -> np.ndarray:
    """One bit per window at the rank-th largest value, row-major ties.

    Partial windows with fewer than ``rank`` members get no mark.
    """
    h, w, c = amp.shape
    bits = np.zeros(amp.shape, dtype=bool)
    hc, wc = h - h % size, w - w % size

    if hc and wc:
        tiles = (
            amp[:hc, :wc]
            .reshape(hc // size, size, wc // size, size, c)
            .transpose(0, 2, 4, 1, 3)
            .reshape(hc // size, wc // size, c, size * size)
        )
        # stable sort of negated values = descending with row-major tie order
        sel = np.argsort(-tiles, axis=-1, kind="stable")[..., rank - 1]
        ru, rv, ch = np.indices(sel.shape)
        bits[ru * size + sel // size, rv * size + sel % size, ch] = True

    edge_starts = []
    if w % size:
        edge_starts += [(u0, wc) for u0 in range(0, hc, size)]
    if h % size:
        edge_starts += [(hc, v0) for v0 in range(0, w, size)]
    for u0, v0 in edge_starts:
        win = amp[u0 : u0 + size, v0 : v0 + size, :]
        hh, ww = win.shape[:2]
        if rank > hh * ww:
            continue
        sel = np.argsort(-win.reshape(hh * ww, c), axis=0, kind="stable")[rank - 1]
        bits[u0 + sel // ww, v0 + sel % ww, np.arange(c)] = True
    return bits


def detect_vital(amplitude: np.ndarray, filter_size: int) -> VitalMask:
    """Mark the per-window amplitude argmax across every channel."""
    amp = _as_grid(amplitude)
    size = int(filter_size)
    if size < 1:
        raise ValueError(f"filter_size must be >= 1, got {filter_size}")
    if size > amp.shape[0] or size > amp.shape[1]:
        raise ValueError(
            f"filter_size {size} exceeds grid extent {amp.shape[0]}x{amp.shape[1]}"
        )
    return VitalMask(_rank_bits(amp, size, 1), size)


def rank_mask(amplitude: np.ndarray, filter_size: int, rank: int) -> RankMask:
    """Mark the coordinate with the rank-th largest amplitude per window."""
    amp = _as_grid(amplitude)
    size = int(filter_size)
    if size < 1:
        raise ValueError(f"filter_size must be >= 1, got {filter_size}")
    if size > amp.shape[0] or size > amp.shape[1]:
        raise ValueError(
            f"filter_size {size} exceeds grid extent {amp.shape[0]}x{amp.shape[1]}"
        )
    k = int(rank)
    if k < 1 or k > size * size:
        raise ValueError(f"rank must lie in [1, {size * size}], got {rank}")
    return RankMask(_rank_bits(amp, size, k), size, k)


def invert_mask(mask: VitalMask) -> VitalMask:
    """Logical complement per coordinate."""
    return VitalMask(~mask.bits, mask.filter_size)
