"""Diagnostics: phase-fluctuation counting, phase-ablation
reconstruction, and corruption-error (CE/mCE) arithmetic."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np

from .spectrum import (
    PolarSpectrum,
    dft2_per_channel,
    dft3,
    from_polar,
    idft2_per_channel,
    idft3,
    to_polar,
    wrap_phase,
)
from .vitality import VitalMask

SEVERITIES = 5
CSV_HEADER = ["corruption", "s1", "s2", "s3", "s4", "s5"]


@dataclass(frozen=True)
class CorruptionErrorTable:
    """Per-(corruption, severity) error percentages for one network."""

    corruption_names: tuple[str, ...]
    errors: np.ndarray  # shape (n_corruptions, 5)
    network_name: str = ""

    def __post_init__(self):
        errors = np.asarray(self.errors, dtype=np.float64)
        names = tuple(self.corruption_names)
        if errors.ndim != 2 or errors.shape != (len(names), SEVERITIES):
            raise ValueError(
                f"errors must have shape ({len(names)}, {SEVERITIES}), got {errors.shape}"
            )
        if not np.all(np.isfinite(errors)):
            raise ValueError("error table contains non-finite cells")
        if np.any(errors < 0) or np.any(errors > 100):
            raise ValueError("errors must be percentages in [0, 100]")
        object.__setattr__(self, "errors", errors)
        object.__setattr__(self, "corruption_names", names)


def count_phase_fluctuations(
    clean: np.ndarray,
    corrupted: np.ndarray,
    threshold: float,
    dft_mode: str = "3d",
) -> int:
    """Count coordinates whose wrapped phase difference exceeds the
    threshold (strictly)."""
    a = np.asarray(clean, dtype=np.float64)
    b = np.asarray(corrupted, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    fwd = dft3 if dft_mode == "3d" else dft2_per_channel
    delta = wrap_phase(to_polar(fwd(b)).phase - to_polar(fwd(a)).phase)
    return int(np.count_nonzero(np.abs(delta) > threshold))


def phase_ablation_reconstruct(
    image: np.ndarray,
    keep: VitalMask,
    dft_mode: str = "3d",
    zero_coefficients: bool = False,
) -> np.ndarray:
    """Rebuild the image keeping phases only inside ``keep``.

    Default behavior keeps the full amplitude grid and zeroes the angle
    outside the mask; ``zero_coefficients=True`` zeroes the whole
    coefficient instead.
    """
    img = np.asarray(image, dtype=np.float64)
    if img.shape != keep.bits.shape:
        raise ValueError(f"image shape {img.shape} != mask shape {keep.bits.shape}")
    fwd = dft3 if dft_mode == "3d" else dft2_per_channel
    inv = idft3 if dft_mode == "3d" else idft2_per_channel
    polar = to_polar(fwd(img))
    phase = np.where(keep.bits, polar.phase, 0.0)
    amp = np.where(keep.bits, polar.amplitude, 0.0) if zero_coefficients else polar.amplitude
    return np.clip(inv(from_polar(PolarSpectrum(amp, phase))), 0.0, 1.0)


def compute_mce(
    network: CorruptionErrorTable, reference: CorruptionErrorTable
) -> tuple[dict[str, float], float]:
    """Per-corruption CE (percent, normalized by the reference network)
    and their arithmetic mean."""
    if network.corruption_names != reference.corruption_names:
        raise ValueError("corruption grids differ between network and reference")
    ref_sums = reference.errors.sum(axis=1)
    if np.any(ref_sums == 0):
        raise ValueError("reference severity sums must be nonzero")
    ce = network.errors.sum(axis=1) / ref_sums * 100.0
    ce_map = {name: float(v) for name, v in zip(network.corruption_names, ce)}
    return ce_map, float(ce.mean())


def load_error_table(path: str | os.PathLike, network_name: str = "") -> CorruptionErrorTable:
    """Read ``corruption,s1,s2,s3,s4,s5`` CSV rows into a table."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{os.fspath(path)!r} is empty") from None
        if [cell.strip() for cell in header] != CSV_HEADER:
            raise ValueError(
                f"bad header {header!r}; expected {','.join(CSV_HEADER)}"
            )
        names, rows = [], []
        for row in reader:
            if not row:
                continue
            if len(row) != 1 + SEVERITIES:
                raise ValueError(f"row {row!r} needs 1 name + {SEVERITIES} values")
            names.append(row[0].strip())
            rows.append([float(cell) for cell in row[1:]])
    return CorruptionErrorTable(tuple(names), np.array(rows), network_name)
