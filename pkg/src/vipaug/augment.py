"""Phase-jitter, fractal-phase substitution, amplitude swapping, and the
full augmentation pipeline.

Pipeline stages, in order:

1. forward transform (3d or per-channel 2d),
2. vital mask from the original amplitude (reused by every stage),
3. fractal phase substitution at non-vital coordinates, gated by
   ``p_fractal``, optionally retaining the strongest non-vital
   coordinate inside the centered low-frequency block,
4. pixel-op round trip: rebuild an image from (original amplitude,
   current phase), apply one pixel op, re-transform, keep the phase,
5. Gaussian phase jitter, weak at vital coordinates and stronger
   elsewhere,
6. amplitude swap with the partner image, gated by
   ``p_amplitude_swap``,
7. inverse transform, real part, clamp to [0, 1].

Randomness is consumed in a fixed order per sample (fractal gate,
pixel-op index, pixel-op magnitude, jitter grid, swap gate), so a
replay with the same stream is bitwise identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .rng import RngStream
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
from .vitality import RankMask, VitalMask, detect_vital, rank_mask


class ConfigError(ValueError):
    """Raised for invalid or unknown pipeline configuration."""


# magnitude ranges per pixel op; ops without a knob use (0, 0)
PIXEL_OP_RANGES: dict[str, tuple[float, float]] = {
    "rotate": (-15.0, 15.0),
    "translate_x": (-0.2, 0.2),
    "translate_y": (-0.2, 0.2),
    "shear_x": (-0.2, 0.2),
    "shear_y": (-0.2, 0.2),
    "solarize": (0.0, 1.0),
    "posterize": (4.0, 8.0),
    "equalize": (0.0, 0.0),
    "identity": (0.0, 0.0),
}

DFT_MODES = ("3d", "2d")
VARIANTS = ("standard", "reverse", "uniform")


@dataclass(frozen=True)
class PixelOp:
    name: str
    low: float
    high: float

    def __post_init__(self):
        if self.name not in PIXEL_OP_RANGES:
            raise ConfigError(
                f"unknown pixel op {self.name!r}; known: {sorted(PIXEL_OP_RANGES)}"
            )
        if self.high < self.low:
            raise ConfigError(f"pixel op {self.name!r} range is reversed")


def _default_pixel_ops() -> tuple[PixelOp, ...]:
    return tuple(PixelOp(name, lo, hi) for name, (lo, hi) in PIXEL_OP_RANGES.items())


@dataclass(frozen=True)
class AugmentConfig:
    """All pipeline hyperparameters. Defaults match the 32x32 reference
    setting (filter 2x2x1, sigmas 0.001/0.014, low-frequency ratio 4/9)."""

    sigma_vital: float = 0.001
    sigma_nonvital: float = 0.014
    filter_size: int = 2
    low_freq_ratio: float = 4.0 / 9.0
    p_fractal: float = 0.5
    p_amplitude_swap: float = 0.5
    dft_mode: str = "3d"
    variant: str = "standard"
    pixel_ops: tuple[PixelOp, ...] = field(default_factory=_default_pixel_ops)
    seed: int = 0

    def __post_init__(self):
        if self.sigma_vital < 0 or self.sigma_nonvital < 0:
            raise ConfigError("sigmas must be non-negative")
        if self.variant not in VARIANTS:
            raise ConfigError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.variant == "standard" and self.sigma_vital > self.sigma_nonvital:
            raise ConfigError("standard variant requires sigma_vital <= sigma_nonvital")
        if not 0.0 <= self.low_freq_ratio <= 1.0:
            raise ConfigError("low_freq_ratio must lie in [0, 1]")
        for name in ("p_fractal", "p_amplitude_swap"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {p}")
        if self.dft_mode not in DFT_MODES:
            raise ConfigError(f"dft_mode must be one of {DFT_MODES}, got {self.dft_mode!r}")
        if int(self.filter_size) < 1:
            raise ConfigError("filter_size must be >= 1")
        object.__setattr__(self, "filter_size", int(self.filter_size))
        object.__setattr__(self, "seed", int(self.seed))
        ops = tuple(self.pixel_ops)
        if not ops:
            raise ConfigError("pixel_ops must not be empty")
        object.__setattr__(self, "pixel_ops", ops)

    @classmethod
    def from_mapping(cls, mapping: dict) -> "AugmentConfig":
        """Build a config from a plain dict (e.g. parsed JSON).

        Unknown keys are rejected. ``pixel_ops`` entries may be bare op
        names or ``{"name": ..., "range": [lo, hi]}`` objects.
        """
        known = {
            "sigma_vital",
            "sigma_nonvital",
            "filter_size",
            "low_freq_ratio",
            "p_fractal",
            "p_amplitude_swap",
            "dft_mode",
            "variant",
            "pixel_ops",
            "seed",
        }
        unknown = set(mapping) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(mapping)
        if "pixel_ops" in kwargs:
            kwargs["pixel_ops"] = tuple(
                _parse_pixel_op(entry) for entry in kwargs["pixel_ops"]
            )
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def to_mapping(self) -> dict:
        """JSON-serializable snapshot with exactly the config field names."""
        return {
            "sigma_vital": self.sigma_vital,
            "sigma_nonvital": self.sigma_nonvital,
            "filter_size": self.filter_size,
            "low_freq_ratio": self.low_freq_ratio,
            "p_fractal": self.p_fractal,
            "p_amplitude_swap": self.p_amplitude_swap,
            "dft_mode": self.dft_mode,
            "variant": self.variant,
            "pixel_ops": [
                {"name": op.name, "range": [op.low, op.high]} for op in self.pixel_ops
            ],
            "seed": self.seed,
        }


def _parse_pixel_op(entry) -> PixelOp:
    if isinstance(entry, str):
        lo, hi = PIXEL_OP_RANGES.get(entry, (0.0, 0.0))
        return PixelOp(entry, lo, hi)
    if isinstance(entry, dict):
        extra = set(entry) - {"name", "range"}
        if extra:
            raise ConfigError(f"unknown pixel op keys: {sorted(extra)}")
        name = entry.get("name")
        if not isinstance(name, str):
            raise ConfigError("pixel op entry needs a string 'name'")
        if "range" in entry:
            lo, hi = entry["range"]
            return PixelOp(name, float(lo), float(hi))
        lo, hi = PIXEL_OP_RANGES.get(name, (0.0, 0.0))
        return PixelOp(name, lo, hi)
    if isinstance(entry, PixelOp):
        return entry
    raise ConfigError(f"bad pixel op entry: {entry!r}")


def _forward(config_mode: str):
    return dft3 if config_mode == "3d" else dft2_per_channel


def _inverse(config_mode: str):
    return idft3 if config_mode == "3d" else idft2_per_channel


def vipaug_g(
    phase: np.ndarray,
    mask: VitalMask,
    sigma_vital: float,
    sigma_nonvital: float,
    rng: RngStream,
) -> np.ndarray:
    """Add zero-mean Gaussian jitter to every phase coordinate.

    Coordinates marked in ``mask`` draw with ``sigma_vital``, the rest
    with ``sigma_nonvital``; results re-wrap into (-pi, pi]. With both
    sigmas zero the input comes back unchanged.
    """
    ph = np.asarray(phase, dtype=np.float64)
    if ph.shape != mask.bits.shape:
        raise ValueError(f"phase shape {ph.shape} != mask shape {mask.bits.shape}")
    if sigma_vital < 0 or sigma_nonvital < 0:
        raise ValueError("sigmas must be non-negative")
    noise = rng.standard_normal(ph.shape)
    sigma = np.where(mask.bits, float(sigma_vital), float(sigma_nonvital))
    return wrap_phase(ph + noise * sigma)


def vipaug_f(
    phase: np.ndarray,
    mask: VitalMask,
    fractal_phase: np.ndarray,
    retain: RankMask | None = None,
    rng: RngStream | None = None,
) -> np.ndarray:
    """Substitute non-vital phases with the fractal image's phases.

    Coordinates in ``mask`` (and in ``retain``, when given) keep their
    original phase; everything else takes the fractal value exactly.
    The stream argument is accepted for interface symmetry; selection
    randomness lives with the pool.
    """
    ph = np.asarray(phase, dtype=np.float64)
    fr = np.asarray(fractal_phase, dtype=np.float64)
    if ph.shape != mask.bits.shape or fr.shape != ph.shape:
        raise ValueError(
            f"shape mismatch: phase {ph.shape}, mask {mask.bits.shape}, fractal {fr.shape}"
        )
    keep = mask.bits if retain is None else (mask.bits | retain.bits)
    return np.where(keep, ph, fr)


def _low_freq_block(shape: tuple[int, int, int], ratio: float) -> np.ndarray:
    """Natural-layout membership of the centered low-frequency block.

    Block side lengths are round(H*sqrt(ratio)) x round(W*sqrt(ratio))
    (half-up) in the DC-centered layout, spanning all channels.
    """
    h, w, _ = shape
    side_h = int(math.floor(h * math.sqrt(ratio) + 0.5))
    side_w = int(math.floor(w * math.sqrt(ratio) + 0.5))
    block = np.zeros(shape, dtype=bool)
    if side_h == 0 or side_w == 0:
        return block
    r0 = h // 2 - side_h // 2
    c0 = w // 2 - side_w // 2
    block[r0 : r0 + side_h, c0 : c0 + side_w, :] = True
    return np.fft.ifftshift(block, axes=(0, 1))


def low_freq_retain_mask(
    amplitude: np.ndarray,
    filter_size: int,
    ratio: float,
    *,
    rank: int = 2,
) -> RankMask:
    """Rank-2 mask restricted to the centered low-frequency block.

    ``ratio`` is the fraction of all phase coordinates covered by the
    block; 0 yields an empty mask, 1 the full rank-2 mask. The rank is
    overridable for the reverse variant, which retains rank 1 instead.
    """
    if not 0.0 <= ratio <= 1.0:
        raise ValueError(f"ratio must lie in [0, 1], got {ratio}")
    base = rank_mask(amplitude, filter_size, rank)
    block = _low_freq_block(base.bits.shape, ratio)
    return RankMask(base.bits & block, base.filter_size, base.rank)


def apr_sp(polar_self: PolarSpectrum, polar_other: PolarSpectrum) -> PolarSpectrum:
    """Keep own phases, take the other spectrum's amplitudes."""
    if polar_self.shape != polar_other.shape:
        raise ValueError(
            f"shape mismatch: {polar_self.shape} vs {polar_other.shape}"
        )
    if polar_self.layout != polar_other.layout:
        raise ValueError("layout mismatch between spectra")
    return PolarSpectrum(polar_other.amplitude, polar_self.phase, polar_self.layout)


# ---------------------------------------------------------------------------
# pixel ops


def _affine2d(image: np.ndarray, mat: np.ndarray, offset: np.ndarray) -> np.ndarray:
    """Bilinear 2D affine resample of every channel; out-of-bounds is 0.

    ``mat``/``offset`` map output (row, col) to input (row, col).
    """
    full_mat = np.eye(3)
    full_mat[:2, :2] = mat
    full_offset = np.array([offset[0], offset[1], 0.0])
    # grid-constant interpolates against the fill value instead of
    # snapping barely-outside coordinates to it
    return ndimage.affine_transform(
        image, full_mat, offset=full_offset, order=1, mode="grid-constant", cval=0.0,
        prefilter=False,
    )


def _rotate(image: np.ndarray, degrees: float) -> np.ndarray:
    h, w = image.shape[:2]
    center = np.array([(h - 1) / 2.0, (w - 1) / 2.0])
    theta = math.radians(degrees)
    rot = np.array([[math.cos(theta), -math.sin(theta)],
                    [math.sin(theta), math.cos(theta)]])
    offset = center - rot @ center
    return _affine2d(image, rot, offset)


def _translate(image: np.ndarray, frac: float, axis: int) -> np.ndarray:
    shift = frac * image.shape[axis]
    offset = np.zeros(2)
    offset[axis] = -shift
    return _affine2d(image, np.eye(2), offset)


def _shear(image: np.ndarray, factor: float, axis: int) -> np.ndarray:
    # axis 1: columns slide proportionally to row distance from center
    h, w = image.shape[:2]
    center = np.array([(h - 1) / 2.0, (w - 1) / 2.0])
    mat = np.eye(2)
    if axis == 1:
        mat[1, 0] = -factor
    else:
        mat[0, 1] = -factor
    offset = center - mat @ center
    return _affine2d(image, mat, offset)


def _solarize(image: np.ndarray, threshold: float) -> np.ndarray:
    return np.where(image >= threshold, 1.0 - image, image)


def _posterize(image: np.ndarray, magnitude: float) -> np.ndarray:
    bits = int(np.clip(round(magnitude), 1, 8))
    q = np.floor(np.clip(image, 0.0, 1.0) * 255.0).astype(np.uint8)
    keep = (0xFF << (8 - bits)) & 0xFF
    return (q & keep).astype(np.float64) / 255.0


def _equalize(image: np.ndarray) -> np.ndarray:
    """Per-channel histogram equalization on the 256-level lattice."""
    q = np.floor(np.clip(image, 0.0, 1.0) * 255.0).astype(np.int64)
    out = np.empty_like(image)
    for ch in range(image.shape[2]):
        hist = np.bincount(q[:, :, ch].ravel(), minlength=256)
        nonzero = hist[hist > 0]
        if nonzero.size <= 1:
            out[:, :, ch] = q[:, :, ch] / 255.0
            continue
        step = (int(hist.sum()) - int(nonzero[-1])) // 255
        if step == 0:
            out[:, :, ch] = q[:, :, ch] / 255.0
            continue
        cum = np.concatenate(([0], np.cumsum(hist)[:-1]))
        lut = np.clip((step // 2 + cum) // step, 0, 255)
        out[:, :, ch] = lut[q[:, :, ch]] / 255.0
    return out


def apply_pixel_op(image: np.ndarray, name: str, magnitude: float) -> np.ndarray:
    """Apply one named pixel op at the given magnitude."""
    img = np.asarray(image, dtype=np.float64)
    if name == "identity":
        return img
    if name == "rotate":
        return _rotate(img, magnitude)
    if name == "translate_x":
        return _translate(img, magnitude, axis=1)
    if name == "translate_y":
        return _translate(img, magnitude, axis=0)
    if name == "shear_x":
        return _shear(img, magnitude, axis=1)
    if name == "shear_y":
        return _shear(img, magnitude, axis=0)
    if name == "solarize":
        return _solarize(img, magnitude)
    if name == "posterize":
        return _posterize(img, magnitude)
    if name == "equalize":
        return _equalize(img)
    raise ConfigError(f"unknown pixel op {name!r}")


def _pixel_stage_traced(
    image: np.ndarray, config: AugmentConfig, rng: RngStream
) -> tuple[np.ndarray, str, float]:
    ops = config.pixel_ops
    op = ops[rng.integers(0, len(ops))]
    magnitude = op.low + rng.uniform() * (op.high - op.low)
    return apply_pixel_op(image, op.name, magnitude), op.name, magnitude


def pixel_stage_t(image: np.ndarray, config: AugmentConfig, rng: RngStream) -> np.ndarray:
    """Apply one randomly chosen enabled pixel op at a random magnitude.

    Always consumes exactly two draws (op index, magnitude) so the
    stream position stays predictable.
    """
    out, _, _ = _pixel_stage_traced(image, config, rng)
    return out


# ---------------------------------------------------------------------------
# full pipeline


@dataclass(frozen=True)
class PipelineTrace:
    """What the gated stages actually did for one sample."""

    fractal_applied: bool
    amplitude_swapped: bool
    pixel_op: str
    pixel_magnitude: float


def vipaug_traced(
    image: np.ndarray,
    partner: np.ndarray,
    fractal_phase: np.ndarray | None,
    config: AugmentConfig,
    rng: RngStream,
) -> tuple[np.ndarray, PipelineTrace]:
    """Run the full pipeline and report the per-stage outcomes."""
    img = np.asarray(image, dtype=np.float64)
    prt = np.asarray(partner, dtype=np.float64)
    if img.shape != prt.shape:
        raise ValueError(f"image shape {img.shape} != partner shape {prt.shape}")
    if fractal_phase is None:
        if config.p_fractal > 0:
            raise ConfigError("p_fractal > 0 requires a fractal phase grid")
    else:
        fractal_phase = np.asarray(fractal_phase, dtype=np.float64)
        if fractal_phase.shape != img.shape:
            raise ValueError(
                f"fractal phase shape {fractal_phase.shape} != image shape {img.shape}"
            )

    fwd, inv = _forward(config.dft_mode), _inverse(config.dft_mode)
    polar = to_polar(fwd(img))
    amp0 = polar.amplitude
    phase = polar.phase

    # masks come from the original amplitude once and are reused
    if config.variant == "reverse":
        protect = rank_mask(amp0, config.filter_size, 2)
        retain_rank = 1
    else:
        protect = detect_vital(amp0, config.filter_size)
        retain_rank = 2

    fractal_applied = rng.uniform() < config.p_fractal
    if fractal_applied:
        retain = None
        if config.low_freq_ratio > 0:
            retain = low_freq_retain_mask(
                amp0, config.filter_size, config.low_freq_ratio, rank=retain_rank
            )
        if config.variant == "uniform":
            sub_mask = VitalMask(np.zeros(img.shape, dtype=bool), config.filter_size)
        else:
            sub_mask = protect
        phase = vipaug_f(phase, sub_mask, fractal_phase, retain=retain)

    intermediate = np.clip(inv(from_polar(PolarSpectrum(amp0, phase))), 0.0, 1.0)
    shifted, op_name, op_mag = _pixel_stage_traced(intermediate, config, rng)
    phase = to_polar(fwd(shifted)).phase

    sigma_vital = config.sigma_vital
    if config.variant == "uniform":
        sigma_vital = config.sigma_nonvital
    phase = vipaug_g(phase, protect, sigma_vital, config.sigma_nonvital, rng)

    amplitude_swapped = rng.uniform() < config.p_amplitude_swap
    amp = to_polar(fwd(prt)).amplitude if amplitude_swapped else amp0

    out = np.clip(inv(from_polar(PolarSpectrum(amp, phase))), 0.0, 1.0)
    trace = PipelineTrace(fractal_applied, amplitude_swapped, op_name, op_mag)
    return out, trace


def vipaug(
    image: np.ndarray,
    partner: np.ndarray,
    fractal_phase: np.ndarray | None,
    config: AugmentConfig,
    rng: RngStream,
) -> np.ndarray:
    """Full augmentation: fractal substitution, pixel-op phase change,
    Gaussian jitter, amplitude swap, and reconstruction."""
    out, _ = vipaug_traced(image, partner, fractal_phase, config, rng)
    return out
