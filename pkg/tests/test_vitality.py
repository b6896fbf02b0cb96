import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vipaug.vitality import RankMask, VitalMask, detect_vital, invert_mask, rank_mask

from oracles import region_rank_scan


def constructed_grid():
    return np.array(
        [
            [9.0, 1.0, 2.0, 1.0],
            [1.0, 1.0, 1.0, 8.0],
            [7.0, 1.0, 1.0, 1.0],
            [1.0, 6.0, 1.0, 1.0],
        ]
    ).reshape(4, 4, 1)


def marks(mask):
    return set(zip(*np.nonzero(mask.bits)))


class TestDetectVital:
    def test_constructed_per_region_maxima(self):
        # regions (2x2): maxima 9@(0,0), 8@(1,3), 7@(2,0); the all-ones
        # region ties and resolves row-major to (2,2)
        mask = detect_vital(constructed_grid(), 2)
        assert marks(mask) == {(0, 0, 0), (1, 3, 0), (2, 0, 0), (2, 2, 0)}

    def test_uniform_grid_tie_break_top_left(self):
        mask = detect_vital(np.ones((6, 6, 2)), 2)
        expected = {(u, v, w) for u in (0, 2, 4) for v in (0, 2, 4) for w in (0, 1)}
        assert marks(mask) == expected

    def test_matches_brute_force_scan(self, rng):
        amp = rng.random((8, 8, 3))
        mask = detect_vital(amp, 2)
        np.testing.assert_array_equal(mask.bits, region_rank_scan(amp, 2, 1))

    def test_partial_windows(self, rng):
        amp = rng.random((7, 5, 2))
        mask = detect_vital(amp, 3)
        np.testing.assert_array_equal(mask.bits, region_rank_scan(amp, 3, 1))
        # ceil(7/3) * ceil(5/3) * 2
        assert int(mask.bits.sum()) == 3 * 2 * 2

    def test_mark_count(self, rng):
        for shape, s in [((8, 8, 3), 2), ((9, 7, 1), 4), ((5, 5, 2), 5)]:
            amp = rng.random(shape)
            mask = detect_vital(amp, s)
            expected = -(-shape[0] // s) * -(-shape[1] // s) * shape[2]
            assert int(mask.bits.sum()) == expected

    def test_marked_value_dominates_region(self, rng):
        amp = rng.random((6, 6, 3))
        mask = detect_vital(amp, 3)
        for u0 in range(0, 6, 3):
            for v0 in range(0, 6, 3):
                for w in range(3):
                    window = amp[u0 : u0 + 3, v0 : v0 + 3, w]
                    hit = mask.bits[u0 : u0 + 3, v0 : v0 + 3, w]
                    assert window[hit][0] >= window.max()

    def test_filter_larger_than_grid_rejected(self):
        with pytest.raises(ValueError):
            detect_vital(np.ones((4, 4, 1)), 5)

    def test_zero_filter_rejected(self):
        with pytest.raises(ValueError):
            detect_vital(np.ones((4, 4, 1)), 0)


class TestRankMask:
    def test_constructed_second_largest_row_major(self):
        # region {9,1,1,1}: second-largest is the first 1 row-major at (0,1)
        mask = rank_mask(constructed_grid(), 2, 2)
        assert (0, 1, 0) in marks(mask)

    def test_rank_one_equals_detect_vital(self, rng):
        for _ in range(100):
            amp = rng.random((6, 4, 2))
            np.testing.assert_array_equal(
                rank_mask(amp, 2, 1).bits, detect_vital(amp, 2).bits
            )

    def test_ranks_partition_each_region(self, rng):
        amp = rng.random((6, 6, 3))
        union = np.zeros_like(amp, dtype=bool)
        for k in range(1, 10):
            bits = rank_mask(amp, 3, k).bits
            np.testing.assert_array_equal(bits, region_rank_scan(amp, 3, k))
            assert not np.any(union & bits)  # pairwise disjoint
            union |= bits
        assert np.all(union)  # ranks 1..9 cover every coordinate

    def test_rank_beyond_window_rejected(self):
        with pytest.raises(ValueError):
            rank_mask(np.ones((4, 4, 1)), 2, 5)

    def test_partial_window_smaller_than_rank_unmarked(self, rng):
        amp = rng.random((5, 4, 1))
        bits = rank_mask(amp, 4, 16).bits
        # trailing 1x4 strip has only 4 members, no rank-16 mark
        assert not bits[4:, :, :].any()


class TestInvertMask:
    def test_all_false_becomes_all_true(self):
        mask = VitalMask(np.zeros((3, 3, 1), dtype=bool), 2)
        assert np.all(invert_mask(mask).bits)

    def test_involution(self, rng):
        mask = detect_vital(rng.random((6, 6, 2)), 2)
        np.testing.assert_array_equal(invert_mask(invert_mask(mask)).bits, mask.bits)

    def test_popcounts_sum_to_grid_size(self, rng):
        mask = detect_vital(rng.random((6, 6, 2)), 3)
        total = mask.bits.sum() + invert_mask(mask).bits.sum()
        assert total == 6 * 6 * 2


@settings(max_examples=50)
@given(
    st.integers(min_value=0, max_value=2**32 - 1),
    st.floats(min_value=1e-3, max_value=1e3, allow_nan=False),
)
def test_positive_scaling_invariance(seed, scale):
    amp = np.random.default_rng(seed).random((6, 6, 2))
    np.testing.assert_array_equal(
        detect_vital(amp, 2).bits, detect_vital(amp * scale, 2).bits
    )


def test_rank_mask_type_carries_rank(rng):
    mask = rank_mask(rng.random((4, 4, 1)), 2, 2)
    assert isinstance(mask, RankMask)
    assert mask.rank == 2
    assert mask.filter_size == 2
