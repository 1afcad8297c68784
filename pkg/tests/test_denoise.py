import itertools

import numpy as np
import pytest
from pydantic import ValidationError

from gesture.denoise import (
    DirectionSet,
    MdwmfConfig,
    collinear_directions,
    default_directions,
    direction_statistics,
    directional_differences,
    inject_rvin,
    inject_rvin_counted,
    is_noisy,
    mdwmf,
    mdwmf_rgb,
    mdwmf_trace,
    parse_thresholds,
    weighted_median,
)
from gesture.imagecore import GrayImage, RgbImage, psnr

ALL_OFFSETS = {(i, j) for i, j in itertools.product(range(-2, 3), repeat=2) if (i, j) != (0, 0)}


class TestDirections:
    def test_pair_lines_partition_the_window(self):
        dirs = default_directions()
        assert len(dirs) == 12
        offsets = [offset for line in dirs.lines for offset in line]
        assert len(offsets) == len(set(offsets)) == 24
        assert set(offsets) == ALL_OFFSETS

    def test_collinear_lines(self):
        dirs = collinear_directions()
        assert len(dirs) == 8
        assert {(0, 1), (0, 2), (0, -1), (0, -2)} in [set(line) for line in dirs.lines]
        assert {offset for line in dirs.lines for offset in line} == ALL_OFFSETS

    def test_every_pair_line_lies_on_a_collinear_line(self):
        collinear = [set(line) for line in collinear_directions().lines]
        for line in default_directions().lines:
            assert any(set(line) <= merged for merged in collinear)

    def test_missing_antipode_is_rejected(self):
        with pytest.raises(ValueError):
            DirectionSet((((0, 1),),))

    def test_overlapping_lines_are_rejected(self):
        with pytest.raises(ValueError):
            DirectionSet((((0, 1), (0, -1)), ((0, -1), (0, 1))))

    def test_offset_outside_window(self):
        with pytest.raises(ValueError):
            DirectionSet((((0, 3), (0, -3)),))


class TestMdwmfConfig:
    def test_defaults(self):
        config = MdwmfConfig()
        assert config.thresholds == [33, 23, 16]
        assert config.weight == 2

    @pytest.mark.parametrize("thresholds", [[], [33, 0], [-1]])
    def test_invalid_thresholds(self, thresholds):
        with pytest.raises(ValidationError):
            MdwmfConfig(thresholds=thresholds)

    def test_text_round_trip(self):
        config = MdwmfConfig(thresholds=[40, 20.5], weight=3, directions="collinear")
        assert "thresholds=40,20.5" in config.to_text()
        assert MdwmfConfig.from_text(config.to_text()) == config

    def test_parse_thresholds(self):
        assert parse_thresholds(" 33, 23,16 ") == [33.0, 23.0, 16.0]
        with pytest.raises(ValueError):
            parse_thresholds(" , ")


class TestRvin:
    def test_zero_density_is_identity(self, band_image):
        assert np.array_equal(inject_rvin(band_image, 0.0, 5).pixels, band_image.pixels)

    def test_full_density_redraws_everything(self, band_image):
        noisy, count = inject_rvin_counted(band_image, 1.0, 5)
        assert count == band_image.width * band_image.height
        # Uniform redraws almost never reproduce the clean value
        assert np.mean(noisy.pixels == band_image.pixels) < 0.02

    def test_count_follows_binomial(self, band_image):
        _, count = inject_rvin_counted(band_image, 0.4, 2024)
        assert abs(count - 26214) <= 750

    def test_seeded(self, band_image):
        a = inject_rvin(band_image, 0.3, 9)
        b = inject_rvin(band_image, 0.3, 9)
        c = inject_rvin(band_image, 0.3, 10)
        assert np.array_equal(a.pixels, b.pixels)
        assert not np.array_equal(a.pixels, c.pixels)

    def test_color_positions_are_shared(self):
        image = RgbImage(np.full((32, 32, 3), 7, dtype=np.uint8))
        noisy, count = inject_rvin_counted(image, 0.5, 1)
        touched = np.any(noisy.pixels != 7, axis=2)
        assert touched.sum() <= count

    @pytest.mark.parametrize("density", [-0.1, 1.5])
    def test_density_out_of_range(self, band_image, density):
        with pytest.raises(ValueError):
            inject_rvin(band_image, density, 0)


class TestDirectionalDifferences:
    def test_constant_image(self):
        image = GrayImage(np.full((9, 9), 42, dtype=np.uint8))
        assert directional_differences(image, 4, 4, default_directions()) == [0] * 12

    def test_linear_ramp(self):
        image = GrayImage(np.tile(np.arange(9, dtype=np.uint8) * 10, (9, 1)))
        assert directional_differences(image, 4, 4, default_directions()) == [0] * 12

    def test_isolated_impulse(self):
        pixels = np.zeros((5, 5), dtype=np.uint8)
        pixels[2, 2] = 255
        image = GrayImage(pixels)
        assert directional_differences(image, 2, 2, default_directions()) == [510] * 12
        # Knight-move lines hold a single pair inside the 5x5 window
        assert directional_differences(image, 2, 2, collinear_directions()) == [1020] * 4 + [510] * 4

    def test_out_of_bounds(self):
        with pytest.raises(IndexError):
            directional_differences(GrayImage(np.zeros((3, 3))), 3, 0, default_directions())

    def test_vectorized_statistics_agree(self):
        pixels = np.random.default_rng(4).integers(0, 256, size=(11, 13), dtype=np.uint8)
        image = GrayImage(pixels)
        for dirs in (default_directions(), collinear_directions()):
            stats = direction_statistics(pixels, dirs)
            for y, x in itertools.product(range(11), range(13)):
                assert stats[:, y, x].tolist() == directional_differences(image, x, y, dirs)


class TestNoiseDecision:
    def test_clean(self):
        assert not is_noisy([0] * 12, 33)

    def test_impulse(self):
        assert is_noisy([1020] * 8, 33)

    def test_edge_direction_spares_the_pixel(self):
        assert not is_noisy([900, 800, 0, 700], 33)

    def test_empty(self):
        with pytest.raises(ValueError):
            is_noisy([], 33)


class TestWeightedMedian:
    def test_singleton(self):
        assert weighted_median([5], [7]) == 5

    def test_plain_median(self):
        assert weighted_median([1, 2, 3], [1, 1, 1]) == 2

    def test_heavy_value_wins(self):
        assert weighted_median([1, 2, 9], [1, 1, 4]) == 9

    def test_matches_replicated_multiset(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            values = rng.integers(0, 256, size=rng.integers(1, 10)).tolist()
            weights = rng.integers(1, 4, size=len(values)).tolist()
            multiset = sorted(v for v, w in zip(values, weights) for _ in range(w))
            assert weighted_median(values, weights) == multiset[(len(multiset) - 1) // 2]

    @pytest.mark.parametrize("values, weights", [([], []), ([1, 2], [1]), ([1], [0])])
    def test_invalid(self, values, weights):
        with pytest.raises(ValueError):
            weighted_median(values, weights)


class TestMdwmf:
    def test_constant_image_is_unchanged(self):
        image = GrayImage(np.full((20, 20), 77, dtype=np.uint8))
        restored, changed = mdwmf_trace(image, MdwmfConfig())
        assert np.array_equal(restored.pixels, image.pixels)
        assert changed == [0, 0, 0]

    def test_single_impulse_is_restored(self):
        pixels = np.full((15, 15), 100, dtype=np.uint8)
        pixels[7, 7] = 255
        restored = mdwmf(GrayImage(pixels), MdwmfConfig())
        assert np.all(restored.pixels == 100)

    def test_clean_image_passes_through(self, band_image):
        for directions in ("pairs", "collinear"):
            restored = mdwmf(band_image, MdwmfConfig(directions=directions))
            altered = np.count_nonzero(restored.pixels != band_image.pixels)
            assert altered <= 0.001 * band_image.pixels.size

    @pytest.mark.parametrize("density", [0.1, 0.2, 0.4])
    def test_restoration_gain(self, band_image, density):
        noisy = inject_rvin(band_image, density, seed=int(density * 100))
        restored = mdwmf(noisy, MdwmfConfig())
        assert psnr(band_image, restored) >= psnr(band_image, noisy) + 5.0

    def test_deterministic(self, band_image):
        noisy = inject_rvin(band_image, 0.2, 3)
        assert np.array_equal(mdwmf(noisy, MdwmfConfig()).pixels, mdwmf(noisy, MdwmfConfig()).pixels)

    def test_adjacent_impulses_are_both_repaired(self):
        pixels = np.full((9, 9), 50, dtype=np.uint8)
        pixels[4, 4] = 250
        pixels[4, 5] = 240
        config = MdwmfConfig(thresholds=[33])
        _, changed = mdwmf_trace(GrayImage(pixels), config)
        assert changed == [2]

    def test_rgb_filters_channels_independently(self, band_image):
        noisy = inject_rvin(band_image, 0.2, 6)
        stacked = RgbImage(np.stack([noisy.pixels] * 3, axis=2))
        restored, changed = mdwmf_rgb(stacked, MdwmfConfig())
        single, single_changed = mdwmf_trace(noisy, MdwmfConfig())
        for channel in range(3):
            assert np.array_equal(restored.pixels[:, :, channel], single.pixels)
        assert changed == [3 * c for c in single_changed]

    @pytest.mark.parametrize("directions", ["pairs", "collinear"])
    def test_outputs_come_from_the_source_window(self, band_image, directions):
        noisy = inject_rvin(band_image, 0.3, seed=4)
        restored, changed = mdwmf_trace(noisy, MdwmfConfig(thresholds=[20], directions=directions))
        assert changed[0] > 0
        height, width = noisy.pixels.shape
        padded = np.pad(noisy.pixels, 2, mode="edge")
        windows = np.stack(
            [padded[2 + j:2 + j + height, 2 + i:2 + i + width] for i, j in itertools.product(range(-2, 3), repeat=2)]
        )
        assert np.all((windows == restored.pixels[None]).any(axis=0))

    def test_settled_pixels_keep_their_value(self, band_image):
        noisy = inject_rvin(band_image, 0.2, seed=12)
        once = mdwmf(noisy, MdwmfConfig())
        settled = direction_statistics(once.pixels, default_directions()).min(axis=0) <= 16
        again = mdwmf(once, MdwmfConfig(thresholds=[16]))
        assert settled.any()
        assert np.array_equal(again.pixels[settled], once.pixels[settled])

    def test_clean_bands_are_a_fixed_point(self, band_image):
        stats = direction_statistics(band_image.pixels, default_directions())
        assert stats.min(axis=0).max() <= 16
        restored, changed = mdwmf_trace(band_image, MdwmfConfig())
        assert changed == [0, 0, 0]
        assert np.array_equal(mdwmf(restored, MdwmfConfig()).pixels, restored.pixels)
