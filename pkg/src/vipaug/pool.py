"""Classless replacement-image pool with cached phase spectra.

Each pool entry is an image from a user-supplied directory (fractals
by default, but any classless set works), center-cropped and resized
to one canonical shape, transformed once, and kept as a phase grid.
The pool is immutable after construction and safe to share across
workers.

Cache file layout (little-endian): magic ``VIPF``, format version u16,
H, W, C as u32, then per entry a u32 path length, the UTF-8 path, and
the raw float64 phase grid.
"""

from __future__ import annotations

import os
import struct
import warnings
from dataclasses import dataclass

import numpy as np

from .images import center_crop_resize, list_image_files, load_image
from .rng import RngStream
from .spectrum import dft2_per_channel, dft3, to_polar

CACHE_MAGIC = b"VIPF"
CACHE_VERSION = 1


@dataclass(frozen=True)
class PoolEntry:
    path: str
    phase: np.ndarray


@dataclass(frozen=True)
class FractalPool:
    entries: tuple[PoolEntry, ...]
    canonical_shape: tuple[int, int, int]
    dft_mode: str = "3d"

    def __post_init__(self):
        for entry in self.entries:
            if entry.phase.shape != tuple(self.canonical_shape):
                raise ValueError(
                    f"entry {entry.path!r} has shape {entry.phase.shape}, "
                    f"want {self.canonical_shape}"
                )
            if np.any(entry.phase > np.pi) or np.any(entry.phase <= -np.pi):
                raise ValueError(f"entry {entry.path!r} phase outside (-pi, pi]")

    @property
    def count(self) -> int:
        return len(self.entries)


def build_pool(
    directory: str | os.PathLike,
    canonical_shape: tuple[int, int, int],
    dft_mode: str = "3d",
) -> FractalPool:
    """Ingest every decodable image under ``directory``.

    Entries are ordered by lexicographic filename so rebuilding from
    the same directory reproduces the pool exactly. Undecodable files
    are skipped with a warning; the build fails only when nothing
    decodes.
    """
    fwd = dft3 if dft_mode == "3d" else dft2_per_channel
    names = list_image_files(directory)
    if not names:
        raise ValueError(f"no image files in {os.fspath(directory)!r}")
    entries = []
    for name in names:
        path = os.path.join(os.fspath(directory), name)
        try:
            img = load_image(path)
        except Exception as exc:  # undecodable file
            warnings.warn(f"skipping {path!r}: {exc}")
            continue
        canonical = np.clip(center_crop_resize(img, tuple(canonical_shape)), 0.0, 1.0)
        phase = to_polar(fwd(canonical)).phase
        entries.append(PoolEntry(name, phase))
    if not entries:
        raise ValueError(f"no decodable images in {os.fspath(directory)!r}")
    return FractalPool(tuple(entries), tuple(canonical_shape), dft_mode)


def sample_entry(pool: FractalPool, rng: RngStream) -> tuple[int, np.ndarray]:
    """Uniformly pick one cached entry; returns (index, phase grid)."""
    if pool.count < 1:
        raise ValueError("cannot sample from an empty pool")
    idx = rng.integers(0, pool.count)
    return idx, pool.entries[idx].phase


def sample_phase(pool: FractalPool, rng: RngStream) -> np.ndarray:
    return sample_entry(pool, rng)[1]


def save_pool_cache(pool: FractalPool, path: str | os.PathLike) -> None:
    h, w, c = pool.canonical_shape
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(struct.pack("<H", CACHE_VERSION))
        fh.write(struct.pack("<III", h, w, c))
        for entry in pool.entries:
            encoded = entry.path.encode("utf-8")
            fh.write(struct.pack("<I", len(encoded)))
            fh.write(encoded)
            fh.write(entry.phase.astype("<f8").tobytes())


def load_pool_cache(path: str | os.PathLike, dft_mode: str = "3d") -> FractalPool:
    """Read a cache file back. The format carries no transform-mode
    field, so the caller's mode tag is trusted."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != CACHE_MAGIC:
            raise ValueError(f"not a pool cache file: bad magic {magic!r}")
        (version,) = struct.unpack("<H", fh.read(2))
        if version != CACHE_VERSION:
            raise ValueError(f"unsupported cache version {version}")
        h, w, c = struct.unpack("<III", fh.read(12))
        grid_bytes = h * w * c * 8
        entries = []
        while True:
            head = fh.read(4)
            if not head:
                break
            if len(head) < 4:
                raise ValueError("truncated pool cache")
            (path_len,) = struct.unpack("<I", head)
            name = fh.read(path_len).decode("utf-8")
            raw = fh.read(grid_bytes)
            if len(raw) < grid_bytes:
                raise ValueError("truncated pool cache")
            phase = np.frombuffer(raw, dtype="<f8").reshape(h, w, c)
            entries.append(PoolEntry(name, phase.astype(np.float64)))
    if not entries:
        raise ValueError("pool cache holds no entries")
    return FractalPool(tuple(entries), (h, w, c), dft_mode)
