"""Forward/inverse DFTs and Cartesian/polar spectral representations.

Images are H x W x C float arrays. Spectra carry a layout tag telling
whether the zero-frequency coefficient sits at index (0, 0, 0)
(``natural``) or at the grid center (``dc_centered``).

The forward transforms are unnormalized sums; the inverse transforms
carry the full 1/(H*W*C) (or 1/(H*W) per channel) factor. Inverse
transforms return the real part of the complex result: phase edits
break Hermitian symmetry and realification is this library's contract
for turning such spectra back into images. No clamping happens here;
pixel-range handling belongs to ingestion/encoding boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NATURAL = "natural"
DC_CENTERED = "dc_centered"

_LAYOUTS = (NATURAL, DC_CENTERED)


def wrap_phase(angles: np.ndarray) -> np.ndarray:
    """Map angles into the principal interval (-pi, pi].

    Values already inside the interval pass through unchanged (bit for
    bit), which keeps zero-noise perturbations exact.
    """
    a = np.asarray(angles, dtype=np.float64)
    wrapped = np.pi - np.mod(np.pi - a, 2.0 * np.pi)
    # np.mod can round up to the modulus itself, landing on -pi exactly
    wrapped = np.where(wrapped <= -np.pi, np.pi, wrapped)
    return np.where((a > np.pi) | (a <= -np.pi), wrapped, a)


def _as_image(image: np.ndarray) -> np.ndarray:
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim != 3:
        raise ValueError(f"expected an H x W x C array, got shape {arr.shape}")
    if min(arr.shape) < 1:
        raise ValueError(f"all dimensions must be positive, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("image contains non-finite values")
    return arr


def _check_shape(shape: tuple[int, ...]) -> None:
    if len(shape) != 3 or min(shape) < 1:
        raise ValueError(f"expected a rank-3 shape with positive dims, got {shape}")


@dataclass(frozen=True)
class ComplexSpectrum:
    """Complex grid F(u, v, w). Treat as immutable after construction."""

    data: np.ndarray
    layout: str = NATURAL

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.complex128)
        _check_shape(data.shape)
        if self.layout not in _LAYOUTS:
            raise ValueError(f"unknown layout {self.layout!r}")
        object.__setattr__(self, "data", data)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.data.shape


@dataclass(frozen=True)
class PolarSpectrum:
    """Paired amplitude and phase grids of a spectrum.

    Amplitudes are non-negative; phases lie in (-pi, pi].
    """

    amplitude: np.ndarray
    phase: np.ndarray
    layout: str = NATURAL

    def __post_init__(self):
        amp = np.asarray(self.amplitude, dtype=np.float64)
        ph = np.asarray(self.phase, dtype=np.float64)
        _check_shape(amp.shape)
        if ph.shape != amp.shape:
            raise ValueError(f"amplitude shape {amp.shape} != phase shape {ph.shape}")
        if self.layout not in _LAYOUTS:
            raise ValueError(f"unknown layout {self.layout!r}")
        if not np.all(np.isfinite(amp)) or not np.all(np.isfinite(ph)):
            raise ValueError("spectrum contains non-finite values")
        if np.any(amp < 0):
            raise ValueError("amplitude must be non-negative")
        if np.any(ph > np.pi) or np.any(ph <= -np.pi):
            raise ValueError("phase must lie in (-pi, pi]")
        object.__setattr__(self, "amplitude", amp)
        object.__setattr__(self, "phase", ph)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.amplitude.shape


def dft3(image: np.ndarray) -> ComplexSpectrum:
    """Unnormalized 3D DFT over height, width, and channel axes."""
    img = _as_image(image)
    return ComplexSpectrum(np.fft.fftn(img, axes=(0, 1, 2)), NATURAL)


def dft2_per_channel(image: np.ndarray) -> ComplexSpectrum:
    """Unnormalized 2D DFT of each channel slice; channels pass through."""
    img = _as_image(image)
    return ComplexSpectrum(np.fft.fft2(img, axes=(0, 1)), NATURAL)


def idft3(spec: ComplexSpectrum) -> np.ndarray:
    """Inverse 3D DFT (factor 1/(H*W*C)); returns the real part."""
    if spec.layout != NATURAL:
        raise ValueError("inverse transform requires natural layout")
    return np.fft.ifftn(spec.data, axes=(0, 1, 2)).real


def idft2_per_channel(spec: ComplexSpectrum) -> np.ndarray:
    """Inverse per-channel 2D DFT (factor 1/(H*W)); returns the real part."""
    if spec.layout != NATURAL:
        raise ValueError("inverse transform requires natural layout")
    return np.fft.ifft2(spec.data, axes=(0, 1)).real


def to_polar(spec: ComplexSpectrum) -> PolarSpectrum:
    """Split a complex spectrum into amplitude and principal-value phase.

    Coordinates with zero amplitude get phase 0 by convention.
    """
    amp = np.abs(spec.data)
    phase = wrap_phase(np.angle(spec.data))
    phase = np.where(amp == 0.0, 0.0, phase)
    return PolarSpectrum(amp, phase, spec.layout)


def from_polar(polar: PolarSpectrum) -> ComplexSpectrum:
    """Recombine amplitude and phase into A * exp(j*P)."""
    data = polar.amplitude * np.exp(1j * polar.phase)
    return ComplexSpectrum(data, polar.layout)


def shift_dc_center(spec):
    """Cyclically rotate u and v so the DC term moves to the grid center.

    Applied to a ``dc_centered`` spectrum it performs the inverse shift.
    The channel axis is never rotated. Works for both ComplexSpectrum
    and PolarSpectrum and flips the layout tag.
    """
    if isinstance(spec, ComplexSpectrum):
        if spec.layout == NATURAL:
            return ComplexSpectrum(np.fft.fftshift(spec.data, axes=(0, 1)), DC_CENTERED)
        return ComplexSpectrum(np.fft.ifftshift(spec.data, axes=(0, 1)), NATURAL)
    if isinstance(spec, PolarSpectrum):
        if spec.layout == NATURAL:
            return PolarSpectrum(
                np.fft.fftshift(spec.amplitude, axes=(0, 1)),
                np.fft.fftshift(spec.phase, axes=(0, 1)),
                DC_CENTERED,
            )
        return PolarSpectrum(
            np.fft.ifftshift(spec.amplitude, axes=(0, 1)),
            np.fft.ifftshift(spec.phase, axes=(0, 1)),
            NATURAL,
        )
    raise TypeError(f"expected ComplexSpectrum or PolarSpectrum, got {type(spec).__name__}")
