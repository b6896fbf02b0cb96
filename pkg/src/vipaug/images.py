"""Image file ingestion and encoding helpers shared by the pool and CLI.

Pixels live in [0, 1] as float64 H x W x C arrays; encoding quantizes
with round(x * 255) so a disabled pipeline round-trips within 1/255.
"""

from __future__ import annotations

import os

import numpy as np
from PIL import Image

IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg")


def load_image(path: str | os.PathLike) -> np.ndarray:
    with Image.open(path) as im:
        rgb = im.convert("RGB")
        return np.asarray(rgb, dtype=np.float64) / 255.0


def save_image(path: str | os.PathLike, image: np.ndarray) -> None:
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected an H x W x 3 image, got shape {arr.shape}")
    q = np.clip(np.round(arr * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(q, mode="RGB").save(path, format="PNG")


def center_crop_resize(image: np.ndarray, shape: tuple[int, int, int]) -> np.ndarray:
    """Center-crop to the target aspect ratio, then resize bilinearly."""
    h, w, c = shape
    if c != image.shape[2]:
        raise ValueError(f"channel mismatch: want {c}, image has {image.shape[2]}")
    src_h, src_w = image.shape[:2]
    # crop the longer axis to match the target aspect
    if src_w * h > src_h * w:
        crop_w = max(1, int(round(src_h * w / h)))
        x0 = (src_w - crop_w) // 2
        cropped = image[:, x0 : x0 + crop_w, :]
    else:
        crop_h = max(1, int(round(src_w * h / w)))
        y0 = (src_h - crop_h) // 2
        cropped = image[y0 : y0 + crop_h, :, :]
    if cropped.shape[:2] == (h, w):
        return np.asarray(cropped, dtype=np.float64)
    out = np.empty((h, w, c), dtype=np.float64)
    for ch in range(c):
        plane = Image.fromarray(cropped[:, :, ch].astype(np.float32), mode="F")
        out[:, :, ch] = np.asarray(
            plane.resize((w, h), resample=Image.Resampling.BILINEAR), dtype=np.float64
        )
    return out


def list_image_files(directory: str | os.PathLike) -> list[str]:
    """Image filenames in a directory, lexicographically sorted."""
    names = [
        name
        for name in os.listdir(directory)
        if name.lower().endswith(IMAGE_EXTENSIONS)
    ]
    return sorted(names)
