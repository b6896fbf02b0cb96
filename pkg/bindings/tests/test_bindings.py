import numpy as np
import pytest

from vipaug import (
    AugmentConfig,
    ConfigError,
    RngStream,
    dft2_per_channel,
    dft3,
    to_polar,
    vipaug,
)
from vipaug_bindings import py_detect_vital, py_vipaug_batch, validate_config


def region_argmax_scan(amplitude, size):
    amp = np.asarray(amplitude, dtype=np.float64)
    h, w, c = amp.shape
    bits = np.zeros(amp.shape, dtype=bool)
    for ch in range(c):
        for u0 in range(0, h, size):
            for v0 in range(0, w, size):
                best, best_uv = -np.inf, None
                for u in range(u0, min(u0 + size, h)):
                    for v in range(v0, min(v0 + size, w)):
                        if amp[u, v, ch] > best:
                            best, best_uv = amp[u, v, ch], (u, v)
                bits[best_uv[0], best_uv[1], ch] = True
    return bits


def disabled_config():
    return {
        "sigma_vital": 0.0,
        "sigma_nonvital": 0.0,
        "low_freq_ratio": 0.0,
        "p_fractal": 0.0,
        "p_amplitude_swap": 0.0,
        "pixel_ops": ["identity"],
    }


def core_reference(images, partners, config, seed):
    """Per-sample core calls with substreams 0..N-1."""
    cfg = validate_config(config)
    fwd = dft3 if cfg.dft_mode == "3d" else dft2_per_channel
    out = []
    for i, (img, prt) in enumerate(zip(images, partners)):
        fractal = to_polar(fwd(img)).phase
        out.append(vipaug(img, prt, fractal, cfg, RngStream(seed).substream(i)))
    return np.stack(out)


class TestBatchAugment:
    def test_disabled_config_returns_input(self):
        img = np.random.default_rng(0).random((8, 8, 3))
        out = py_vipaug_batch([img], [img], disabled_config(), seed=1)
        np.testing.assert_allclose(out[0], img, atol=1e-6)

    def test_same_seed_identical_arrays(self):
        gen = np.random.default_rng(1)
        imgs = gen.random((3, 8, 8, 3))
        prts = gen.random((3, 8, 8, 3))
        a = py_vipaug_batch(imgs, prts, {}, seed=5)
        b = py_vipaug_batch(imgs, prts, {}, seed=5)
        np.testing.assert_array_equal(a, b)

    def test_batch_equals_per_sample_core_calls(self):
        gen = np.random.default_rng(2)
        imgs = gen.random((4, 8, 8, 3))
        prts = gen.random((4, 8, 8, 3))
        got = py_vipaug_batch(imgs, prts, {}, seed=17)
        want = core_reference(imgs, prts, {}, seed=17)
        np.testing.assert_array_equal(got, want)

    def test_bitwise_equality_on_hundred_random_batches(self):
        gen = np.random.default_rng(3)
        configs = [
            {},
            {"dft_mode": "2d"},
            {"variant": "uniform", "sigma_vital": 0.01, "sigma_nonvital": 0.01},
            {"variant": "reverse"},
            {"p_fractal": 1.0, "p_amplitude_swap": 1.0},
        ]
        for batch_index in range(100):
            n = int(gen.integers(1, 4))
            imgs = gen.random((n, 8, 8, 3))
            prts = gen.random((n, 8, 8, 3))
            config = configs[batch_index % len(configs)]
            seed = int(gen.integers(0, 2**32))
            got = py_vipaug_batch(imgs, prts, config, seed=seed)
            want = core_reference(imgs, prts, config, seed=seed)
            np.testing.assert_array_equal(got, want)

    def test_explicit_fractal_batch(self):
        gen = np.random.default_rng(4)
        imgs = gen.random((2, 8, 8, 3))
        prts = gen.random((2, 8, 8, 3))
        fracs = np.stack([to_polar(dft3(gen.random((8, 8, 3)))).phase for _ in range(2)])
        config = {"p_fractal": 1.0}
        got = py_vipaug_batch(imgs, prts, config, seed=6, fractals=fracs)
        cfg = validate_config(config)
        want = np.stack(
            [
                vipaug(imgs[i], prts[i], fracs[i], cfg, RngStream(6).substream(i))
                for i in range(2)
            ]
        )
        np.testing.assert_array_equal(got, want)

    def test_non_contiguous_input_copied_at_boundary(self):
        gen = np.random.default_rng(5)
        base = gen.random((8, 8, 3))
        transposed = np.swapaxes(np.swapaxes(base, 0, 1).copy(), 0, 1)
        assert not transposed.flags["C_CONTIGUOUS"]
        got = py_vipaug_batch([transposed], [transposed], disabled_config(), seed=0)
        want = py_vipaug_batch([base], [base], disabled_config(), seed=0)
        np.testing.assert_array_equal(got, want)

    def test_shape_mismatch_names_offending_index(self):
        gen = np.random.default_rng(6)
        imgs = [gen.random((8, 8, 3)), gen.random((8, 8, 3)), gen.random((4, 8, 3))]
        prts = [gen.random((8, 8, 3))] * 3
        with pytest.raises(ValueError, match=r"images\[2\]"):
            py_vipaug_batch(imgs, prts, disabled_config(), seed=0)

    def test_partner_batch_length_mismatch(self):
        gen = np.random.default_rng(7)
        with pytest.raises(ValueError, match="partners"):
            py_vipaug_batch(
                gen.random((2, 4, 4, 3)), gen.random((3, 4, 4, 3)), disabled_config(), 0
            )

    def test_unknown_config_key_rejected(self):
        gen = np.random.default_rng(8)
        img = gen.random((4, 4, 3))
        with pytest.raises(ConfigError):
            py_vipaug_batch([img], [img], {"sigma_vial": 0.0}, seed=0)


class TestDetectVital:
    def test_constructed_example(self):
        amp = np.array(
            [
                [9.0, 1.0, 2.0, 1.0],
                [1.0, 1.0, 1.0, 8.0],
                [7.0, 1.0, 1.0, 1.0],
                [1.0, 6.0, 1.0, 1.0],
            ]
        ).reshape(4, 4, 1)
        bits = py_detect_vital(amp, 2)
        marks = set(zip(*np.nonzero(bits)))
        assert marks == {(0, 0, 0), (1, 3, 0), (2, 0, 0), (2, 2, 0)}

    def test_uniform_grid_tie_break(self):
        bits = py_detect_vital(np.ones((4, 4, 1)), 2)
        marks = set(zip(*np.nonzero(bits)))
        assert marks == {(0, 0, 0), (0, 2, 0), (2, 0, 0), (2, 2, 0)}

    def test_random_against_scan_oracle(self):
        gen = np.random.default_rng(9)
        for _ in range(25):
            amp = gen.random((8, 6, 3))
            np.testing.assert_array_equal(
                py_detect_vital(amp, 2), region_argmax_scan(amp, 2)
            )

    def test_result_is_contiguous_bool(self):
        bits = py_detect_vital(np.random.default_rng(10).random((4, 4, 2)), 2)
        assert bits.dtype == np.bool_ and bits.flags["C_CONTIGUOUS"]


class TestValidateConfig:
    def test_defaults_accepted(self):
        cfg = validate_config({})
        assert isinstance(cfg, AugmentConfig)

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            validate_config({"nope": 1})

    def test_non_mapping_rejected(self):
        with pytest.raises(ValueError):
            validate_config([1, 2, 3])
