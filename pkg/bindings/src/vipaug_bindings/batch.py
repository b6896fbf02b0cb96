from __future__ import annotations

import numpy as np

from vipaug import (
    AugmentConfig,
    RngStream,
    detect_vital,
    dft2_per_channel,
    dft3,
    to_polar,
    vipaug,
)


def _boundary_array(value, name: str, dtype=np.float64) -> np.ndarray:
    """Adopt an incoming buffer, copying only on layout/dtype mismatch."""
    arr = np.asarray(value)
    if arr.dtype != dtype or not arr.flags["C_CONTIGUOUS"]:
        arr = np.ascontiguousarray(arr, dtype=dtype)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def _boundary_batch(values, name: str) -> list[np.ndarray]:
    items = [_boundary_array(item, f"{name}[{i}]") for i, item in enumerate(values)]
    if not items:
        raise ValueError(f"{name} batch is empty")
    for i, item in enumerate(items):
        if item.ndim != 3:
            raise ValueError(
                f"{name}[{i}] must be H x W x C, got shape {item.shape}"
            )
        if item.shape != items[0].shape:
            raise ValueError(
                f"{name}[{i}] has shape {item.shape}, expected {items[0].shape}"
            )
    return items


def validate_config(config) -> AugmentConfig:
    """Check a plain mapping against the pipeline config schema."""
    if isinstance(config, AugmentConfig):
        return config
    if not isinstance(config, dict):
        raise ValueError(f"config must be a mapping, got {type(config).__name__}")
    return AugmentConfig.from_mapping(config)


def py_vipaug_batch(images, partners, config, seed: int, fractals=None) -> np.ndarray:
    """Augment a batch; element i uses the substream derived from
    (seed, i) and is bitwise equal to the corresponding core call.

    Without ``fractals``, each sample's own phase grid stands in as the
    substitution source, which turns the fractal stage into a no-op
    when it fires.
    """
    imgs = _boundary_batch(images, "images")
    prts = _boundary_batch(partners, "partners")
    if len(imgs) != len(prts):
        raise ValueError(
            f"images batch has {len(imgs)} elements, partners has {len(prts)}"
        )
    if prts[0].shape != imgs[0].shape:
        raise ValueError(
            f"partners[0] has shape {prts[0].shape}, expected {imgs[0].shape}"
        )
    cfg = validate_config(config)
    if fractals is not None:
        fracs = _boundary_batch(fractals, "fractals")
        if len(fracs) != len(imgs):
            raise ValueError(
                f"fractals batch has {len(fracs)} elements, expected {len(imgs)}"
            )
    else:
        fwd = dft3 if cfg.dft_mode == "3d" else dft2_per_channel
        fracs = [to_polar(fwd(img)).phase for img in imgs]

    root = RngStream(int(seed))
    out = np.empty((len(imgs),) + imgs[0].shape, dtype=np.float64)
    for i, (img, prt, frac) in enumerate(zip(imgs, prts, fracs)):
        out[i] = vipaug(img, prt, frac, cfg, root.substream(i))
    return out


def py_detect_vital(amplitude, filter_size: int) -> np.ndarray:
    """Boolean grid marking the per-window amplitude argmax."""
    amp = _boundary_array(amplitude, "amplitude")
    return np.ascontiguousarray(detect_vital(amp, int(filter_size)).bits)
