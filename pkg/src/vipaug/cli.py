"""Batch command-line front end.

Commands: ``augment`` (dataset augmentation with manifest), ``replay``
(re-run a manifest), ``pool-build`` (phase cache), ``inspect`` (panel
grid), ``fluct`` (phase-fluctuation CSV), ``mce`` (corruption-error
table).

Exit codes: 0 success, 2 configuration error, 3 I/O or data error,
1 anything else. Failed runs remove whatever partial outputs they
wrote.
"""

from __future__ import annotations

import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import click
import numpy as np

from .analyzer import compute_mce, count_phase_fluctuations, load_error_table, phase_ablation_reconstruct
from .augment import AugmentConfig, ConfigError, vipaug_g, vipaug_f, vipaug_traced, low_freq_retain_mask
from .images import list_image_files, load_image, save_image
from .pool import build_pool, load_pool_cache, sample_entry, sample_phase, save_pool_cache
from .rng import RngStream
from .spectrum import PolarSpectrum, dft2_per_channel, dft3, from_polar, idft2_per_channel, idft3, to_polar
from .vitality import detect_vital, invert_mask

MANIFEST_NAME = "manifest.json"
MANIFEST_FORMAT = "vipaug-manifest/1"


def _load_config(path) -> AugmentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {os.fspath(path)!r} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    return AugmentConfig.from_mapping(raw)


def _transforms(mode: str):
    if mode == "3d":
        return dft3, idft3
    return dft2_per_channel, idft2_per_channel


def _augment_sample(index, images, pool, config, seed):
    """Everything derived from (seed, index): partner, fractal, stages."""
    rng = RngStream(seed).substream(index)
    n = len(images)
    if n > 1:
        j = rng.integers(0, n - 1)
        partner_idx = j if j < index else j + 1
    else:
        partner_idx = index
    fractal_idx = None
    fractal_phase = None
    if pool is not None:
        fractal_idx, fractal_phase = sample_entry(pool, rng)
    out, trace = vipaug_traced(
        images[index], images[partner_idx], fractal_phase, config, rng
    )
    return out, partner_idx, fractal_idx, trace


def _run_batch(names, images, pool, config, seed, workers):
    def worker(i):
        return _augment_sample(i, images, pool, config, seed)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool_exec:
            results = list(pool_exec.map(worker, range(len(images))))
    else:
        results = [worker(i) for i in range(len(images))]

    out_names = [os.path.splitext(name)[0] + ".png" for name in names]
    if len(set(out_names)) != len(out_names):
        raise ValueError("input stems collide after .png renaming")

    entries = []
    outputs = []
    for i, (out, partner_idx, fractal_idx, trace) in enumerate(results):
        out_name = out_names[i]
        entries.append(
            {
                "input": names[i],
                "index": i,
                "output": out_name,
                "partner": names[partner_idx],
                "fractal_index": fractal_idx,
                "fractal_applied": trace.fractal_applied,
                "amplitude_swapped": trace.amplitude_swapped,
                "pixel_op": trace.pixel_op,
                "pixel_magnitude": trace.pixel_magnitude,
            }
        )
        outputs.append((out_name, out))
    return entries, outputs


def _write_outputs(out_dir, outputs, manifest):
    os.makedirs(out_dir, exist_ok=True)
    written = []
    try:
        for name, image in outputs:
            target = os.path.join(out_dir, name)
            save_image(target, image)
            written.append(target)
        manifest_path = os.path.join(out_dir, MANIFEST_NAME)
        with open(manifest_path, "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(manifest_path)
    except Exception:
        for path in written:
            try:
                os.remove(path)
            except OSError:
                pass
        raise


def _prepare_inputs(in_dir):
    names = list_image_files(in_dir)
    if not names:
        raise ValueError(f"no input images in {os.fspath(in_dir)!r}")
    images = [load_image(os.path.join(in_dir, name)) for name in names]
    shapes = {img.shape for img in images}
    if len(shapes) > 1:
        raise ValueError(f"input images must share one shape, found {sorted(shapes)}")
    return names, images


def _load_pool_for(config, pool_path, image_shape):
    if pool_path is None:
        if config.p_fractal > 0:
            raise ConfigError("config has p_fractal > 0 but no --pool was given")
        return None
    pool = load_pool_cache(pool_path, config.dft_mode)
    if tuple(pool.canonical_shape) != tuple(image_shape):
        raise ValueError(
            f"pool shape {pool.canonical_shape} does not match images {image_shape}"
        )
    return pool


def cmd_augment(in_dir, out_dir, config_path, seed=None, workers=1, pool=None) -> int:
    """Augment every image in ``in_dir`` once; write PNGs + manifest."""
    try:
        config = _load_config(config_path)
        effective_seed = config.seed if seed is None else int(seed)
        names, images = _prepare_inputs(in_dir)
        pool_obj = _load_pool_for(config, pool, images[0].shape)
        entries, outputs = _run_batch(
            names, images, pool_obj, config, effective_seed, max(1, int(workers))
        )
        manifest = {
            "format": MANIFEST_FORMAT,
            "seed": effective_seed,
            "config": config.to_mapping(),
            "input_dir": os.path.abspath(in_dir),
            "pool": os.path.abspath(pool) if pool else None,
            "entries": entries,
        }
        _write_outputs(out_dir, outputs, manifest)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


def cmd_replay(manifest_path, out_dir) -> int:
    """Re-run a recorded manifest; outputs are bitwise identical."""
    try:
        with open(manifest_path) as fh:
            manifest = json.load(fh)
        if manifest.get("format") != MANIFEST_FORMAT:
            raise ConfigError(f"unsupported manifest format {manifest.get('format')!r}")
        config = AugmentConfig.from_mapping(manifest["config"])
        seed = int(manifest["seed"])
        names, images = _prepare_inputs(manifest["input_dir"])
        recorded = manifest["entries"]
        if [(e["input"], e["index"]) for e in recorded] != [
            (name, i) for i, name in enumerate(names)
        ]:
            raise ValueError("input directory contents changed since the manifest was written")
        pool_obj = _load_pool_for(config, manifest.get("pool"), images[0].shape)
        entries, outputs = _run_batch(names, images, pool_obj, config, seed, 1)
        for got, want in zip(entries, recorded):
            if got != want:
                raise ValueError(
                    f"replay diverged on {want['input']!r}: recorded {want}, got {got}"
                )
        _write_outputs(out_dir, outputs, manifest)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


def cmd_pool_build(directory, cache_out, shape=(32, 32, 3), dft_mode="3d") -> int:
    """Build a phase pool from an image directory and cache it."""
    try:
        pool = build_pool(directory, tuple(shape), dft_mode)
        save_pool_cache(pool, cache_out)
        print(f"cached {pool.count} entries to {os.fspath(cache_out)}")
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


def cmd_inspect(image_path, config_path, out_png, pool=None, partner=None) -> int:
    """Write a 1x6 panel grid: original, vital-only, non-vital-only,
    Gaussian jitter, fractal substitution, full pipeline."""
    try:
        config = _load_config(config_path)
        img = load_image(image_path)
        partner_img = load_image(partner) if partner else img
        if partner_img.shape != img.shape:
            raise ValueError("partner image shape differs from the input image")
        fwd, inv = _transforms(config.dft_mode)
        polar = to_polar(fwd(img))
        mask = detect_vital(polar.amplitude, config.filter_size)
        base = RngStream(config.seed)

        if pool:
            pool_obj = load_pool_cache(pool, config.dft_mode)
            if tuple(pool_obj.canonical_shape) != img.shape:
                raise ValueError("pool shape does not match the input image")
            fractal_phase = sample_phase(pool_obj, base.substream(100))
        else:
            fractal_phase = polar.phase

        retain = None
        if config.low_freq_ratio > 0:
            retain = low_freq_retain_mask(
                polar.amplitude, config.filter_size, config.low_freq_ratio
            )

        def rebuild(phase):
            spec = from_polar(PolarSpectrum(polar.amplitude, phase))
            return np.clip(inv(spec), 0.0, 1.0)

        panels = [
            img,
            phase_ablation_reconstruct(img, mask, config.dft_mode),
            phase_ablation_reconstruct(img, invert_mask(mask), config.dft_mode),
            rebuild(
                vipaug_g(
                    polar.phase,
                    mask,
                    config.sigma_vital,
                    config.sigma_nonvital,
                    base.substream(101),
                )
            ),
            rebuild(vipaug_f(polar.phase, mask, fractal_phase, retain=retain)),
            vipaug_traced(
                img,
                partner_img,
                fractal_phase if config.p_fractal > 0 else None,
                config,
                base.substream(102),
            )[0],
        ]
        save_image(out_png, np.concatenate(panels, axis=1))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


def cmd_fluct(clean_dir, corrupted_dir, thresholds=(0.1,), dft_mode="3d") -> int:
    """Per-pair phase fluctuation counts as ``file,threshold,count``
    CSV on stdout, plus an average row per threshold."""
    try:
        clean_names = list_image_files(clean_dir)
        corrupted_names = set(list_image_files(corrupted_dir))
        pairs = [name for name in clean_names if name in corrupted_names]
        if not pairs:
            raise ValueError("no filename pairs shared between the two directories")
        writer = csv.writer(sys.stdout)
        writer.writerow(["file", "threshold", "count"])
        totals = {t: 0 for t in thresholds}
        for name in pairs:
            clean = load_image(os.path.join(clean_dir, name))
            corrupted = load_image(os.path.join(corrupted_dir, name))
            for t in thresholds:
                count = count_phase_fluctuations(clean, corrupted, t, dft_mode)
                totals[t] += count
                writer.writerow([name, t, count])
        for t in thresholds:
            writer.writerow(["average", t, totals[t] / len(pairs)])
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


def cmd_mce(network_csv, reference_csv) -> int:
    """Per-corruption CE and mCE as ``corruption,ce`` CSV on stdout."""
    try:
        network = load_error_table(network_csv, "network")
        reference = load_error_table(reference_csv, "reference")
        ce_map, mce = compute_mce(network, reference)
        writer = csv.writer(sys.stdout)
        writer.writerow(["corruption", "ce"])
        for name, value in ce_map.items():
            writer.writerow([name, value])
        writer.writerow(["mCE", mce])
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


# ---------------------------------------------------------------------------
# click wiring


def _parse_shape(text: str) -> tuple[int, int, int]:
    parts = text.lower().split("x")
    if len(parts) != 3:
        raise click.BadParameter("shape must look like HxWxC, e.g. 32x32x3")
    return tuple(int(p) for p in parts)


@click.group()
def main():
    """Frequency-domain augmentation toolkit."""


@main.command("augment")
@click.argument("in_dir", type=click.Path(exists=True, file_okay=False))
@click.argument("out_dir", type=click.Path(file_okay=False))
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--pool", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Phase pool cache file.")
def _augment(in_dir, out_dir, config_path, seed, workers, pool):
    """Augment every image in IN_DIR once into OUT_DIR."""
    sys.exit(cmd_augment(in_dir, out_dir, config_path, seed, workers, pool))


@main.command("replay")
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
@click.argument("out_dir", type=click.Path(file_okay=False))
def _replay(manifest, out_dir):
    """Re-run a recorded MANIFEST into OUT_DIR."""
    sys.exit(cmd_replay(manifest, out_dir))


@main.command("pool-build")
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
@click.argument("cache_out", type=click.Path(dir_okay=False))
@click.option("--shape", default="32x32x3", show_default=True, help="Canonical HxWxC.")
@click.option("--mode", "dft_mode", type=click.Choice(["3d", "2d"]), default="3d",
              show_default=True)
def _pool_build(directory, cache_out, shape, dft_mode):
    """Cache the phase spectra of every image in DIRECTORY."""
    sys.exit(cmd_pool_build(directory, cache_out, _parse_shape(shape), dft_mode))


@main.command("inspect")
@click.argument("image", type=click.Path(exists=True, dir_okay=False))
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("out_png", type=click.Path(dir_okay=False))
@click.option("--pool", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--partner", type=click.Path(exists=True, dir_okay=False), default=None)
def _inspect(image, config_path, out_png, pool, partner):
    """Render the stage-by-stage panel grid for one IMAGE."""
    sys.exit(cmd_inspect(image, config_path, out_png, pool, partner))


@main.command("fluct")
@click.argument("clean_dir", type=click.Path(exists=True, file_okay=False))
@click.argument("corrupted_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--thresholds", default="0.1", show_default=True,
              help="Comma-separated radian thresholds.")
@click.option("--mode", "dft_mode", type=click.Choice(["3d", "2d"]), default="3d",
              show_default=True)
def _fluct(clean_dir, corrupted_dir, thresholds, dft_mode):
    """Count phase fluctuations between paired clean/corrupted images."""
    try:
        values = tuple(float(part) for part in thresholds.split(","))
    except ValueError:
        raise click.BadParameter("thresholds must be comma-separated numbers")
    sys.exit(cmd_fluct(clean_dir, corrupted_dir, values, dft_mode))


@main.command("mce")
@click.argument("network_csv", type=click.Path(exists=True, dir_okay=False))
@click.argument("reference_csv", type=click.Path(exists=True, dir_okay=False))
def _mce(network_csv, reference_csv):
    """Normalized corruption errors of NETWORK_CSV against REFERENCE_CSV."""
    sys.exit(cmd_mce(network_csv, reference_csv))


if __name__ == "__main__":
    main()
