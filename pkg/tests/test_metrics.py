"""Vision metric suite: examples, brute-force oracles, and properties."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from layereval import (
    MetricParams,
    ShapeMismatchError,
    SynthSpec,
    UndefinedCorrelationError,
    UndefinedRecallError,
    dip_correlation,
    dip_field,
    extract_layers,
    layer_iou_matrix,
    layer_recall_iou,
    pearson,
    pixel_accuracy,
    recall_iou,
    ssim,
    synth_mask,
    vision_report,
)

from oracles import (
    naive_dip_field,
    naive_iou_matrix,
    naive_pixel_accuracy,
    naive_recall_iou,
    naive_ssim,
    random_mask,
    sloped_line_mask,
)


def pair_of_masks(seed: int, max_side: int = 24) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    rows = int(rng.integers(2, max_side))
    cols = int(rng.integers(2, max_side))
    return random_mask(rng, rows, cols, 0.3), random_mask(rng, rows, cols, 0.3)


class TestPixelAccuracy:
    def test_identical_masks_score_one(self):
        mask = random_mask(np.random.default_rng(0), 10, 10)
        assert pixel_accuracy(mask, mask) == 1.0

    def test_complement_scores_zero(self):
        mask = random_mask(np.random.default_rng(1), 10, 10)
        assert pixel_accuracy(mask, 1 - mask) == 0.0

    def test_two_differing_cells_out_of_nine(self):
        a = np.zeros((3, 3), dtype=np.uint8)
        b = a.copy()
        b[0, 0] = 1
        b[2, 1] = 1
        assert pixel_accuracy(a, b) == pytest.approx(7 / 9, abs=0)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ShapeMismatchError):
            pixel_accuracy(np.zeros((2, 3), dtype=np.uint8), np.zeros((3, 2), dtype=np.uint8))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10**9))
    def test_matches_double_loop_oracle(self, seed):
        a, b = pair_of_masks(seed)
        assert pixel_accuracy(a, b) == naive_pixel_accuracy(a, b)


class TestRecallIou:
    def test_superset_prediction_scores_one(self):
        rng = np.random.default_rng(2)
        gt = random_mask(rng, 8, 8, 0.3)
        pred = gt | random_mask(rng, 8, 8, 0.2)
        assert recall_iou(pred, gt) == 1.0

    def test_disjoint_masks_score_zero(self):
        a = np.zeros((4, 4), dtype=np.uint8)
        a[0, :] = 1
        b = np.zeros((4, 4), dtype=np.uint8)
        b[2, :] = 1
        assert recall_iou(a, b) == 0.0

    def test_partial_overlap_ratio(self):
        gt = np.zeros((2, 5), dtype=np.uint8)
        gt[0, :] = 1  # 5 positives
        gt[1, :] = 1  # 10 total
        pred = np.zeros((2, 5), dtype=np.uint8)
        pred[0, :] = 1
        pred[1, 0] = 1  # overlap 6
        assert recall_iou(pred, gt) == pytest.approx(0.6, abs=0)

    def test_empty_ground_truth_is_undefined(self):
        with pytest.raises(UndefinedRecallError) as err:
            recall_iou(np.ones((3, 3), dtype=np.uint8), np.zeros((3, 3), dtype=np.uint8))
        assert err.value.reason == "empty-ground-truth"

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10**9))
    def test_matches_double_loop_oracle(self, seed):
        a, b = pair_of_masks(seed)
        if not b.any():
            b[0, 0] = 1
        assert recall_iou(a, b) == naive_recall_iou(a, b)


class TestPearson:
    def test_self_correlation_is_one(self):
        x = [1.0, 2.0, 5.0, 3.0]
        assert pearson(x, x) == 1.0

    def test_negation_is_minus_one(self):
        x = np.array([0.5, -1.0, 2.0, 0.0])
        assert pearson(x, -x) == -1.0

    def test_constant_input_is_undefined(self):
        with pytest.raises(UndefinedCorrelationError) as err:
            pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
        assert err.value.reason == "zero-variance"
        with pytest.raises(UndefinedCorrelationError):
            pearson([1.0, 2.0, 3.0], [4.0, 4.0, 4.0])

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            pearson([1.0, 2.0], [1.0, 2.0, 3.0])

    def test_too_short_rejected(self):
        with pytest.raises(ValueError):
            pearson([1.0], [2.0])

    @settings(max_examples=100, deadline=None)
    @given(
        st.lists(st.integers(-1000, 1000), min_size=2, max_size=40),
        st.floats(0.01, 50),
        st.floats(-100, 100),
    )
    def test_affine_relation_scores_one(self, values, scale, offset):
        x = np.array(values, dtype=np.float64)
        if np.ptp(x) == 0:
            x[0] += 1.0
        y = scale * x + offset
        assert abs(pearson(x, y) - 1.0) <= 1e-12
        assert abs(pearson(x, -scale * x + offset) + 1.0) <= 1e-12

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 10**9))
    def test_bounded_by_one(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=20)
        y = rng.normal(size=20)
        assert abs(pearson(x, y)) <= 1.0 + 1e-12


class TestDipField:
    def test_horizontal_line_has_zero_dip(self):
        mask = np.zeros((7, 15), dtype=np.uint8)
        mask[3, :] = 1
        field = dip_field(mask, 5)
        assert np.all(field.angles == 0.0)

    def test_descending_diagonal_gives_quarter_pi(self):
        mask = sloped_line_mask(20, 20, row_step=1, col_step=1, anchor_row=2)
        field = dip_field(mask, 5)
        # Pixels on the line, at least a window away from its ends.
        for k in range(5, 13):
            assert field.angles[2 + k, k] == pytest.approx(math.pi / 4, abs=1e-9)

    def test_all_zero_mask_keeps_zero_field(self):
        field = dip_field(np.zeros((9, 9), dtype=np.uint8), 3)
        assert np.all(field.angles == 0.0)

    def test_angles_stay_in_open_half_pi_range(self):
        rng = np.random.default_rng(5)
        mask = random_mask(rng, 30, 30, 0.4)
        field = dip_field(mask, 7)
        assert np.all(field.angles > -math.pi / 2)
        assert np.all(field.angles < math.pi / 2)

    @pytest.mark.parametrize("window", [2, 1, 4, 0, -3])
    def test_invalid_window_rejected(self, window):
        with pytest.raises(ValueError):
            dip_field(np.zeros((9, 9), dtype=np.uint8), window)

    def test_window_larger_than_mask_rejected(self):
        with pytest.raises(ValueError):
            dip_field(np.zeros((5, 9), dtype=np.uint8), 7)

    @pytest.mark.parametrize("window", [3, 5, 7])
    def test_matches_per_window_recomputation(self, window):
        rng = np.random.default_rng(31 + window)
        for _ in range(4):
            rows = int(rng.integers(window, 18))
            cols = int(rng.integers(window, 18))
            mask = random_mask(rng, rows, cols, 0.35)
            produced = dip_field(mask, window).angles
            expected = naive_dip_field(mask, window)
            np.testing.assert_allclose(produced, expected, atol=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10**9))
    def test_matches_per_window_recomputation_property(self, seed):
        rng = np.random.default_rng(seed)
        mask = random_mask(rng, int(rng.integers(5, 14)), int(rng.integers(5, 14)), 0.4)
        np.testing.assert_allclose(
            dip_field(mask, 5).angles, naive_dip_field(mask, 5), atol=1e-12
        )

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10**9), st.integers(1, 5))
    def test_vertical_translation_invariance(self, seed, shift):
        window = 5
        half = window // 2
        rng = np.random.default_rng(seed)
        rows, cols = 24, 16
        mask = np.zeros((rows, cols), dtype=np.uint8)
        mask[half:rows - half - shift] = random_mask(rng, rows - 2 * half - shift, cols, 0.3)
        moved = np.zeros_like(mask)
        moved[shift:] = mask[:-shift]

        original = dip_field(mask, window).angles
        translated = dip_field(moved, window).angles
        for r in range(half, rows - half - shift):
            np.testing.assert_array_equal(translated[r + shift], original[r])


class TestDipCorrelation:
    def test_identical_masks_correlate_perfectly(self):
        mask, _ = synth_mask(SynthSpec(rows=24, cols=40, n_layers=4, base_slope=0.5, seed=8))
        assert dip_correlation(mask, mask, 5) == 1.0

    def test_horizontal_layers_give_constant_fields(self):
        mask = np.zeros((12, 20), dtype=np.uint8)
        mask[3, :] = 1
        mask[8, :] = 1
        shifted = np.zeros_like(mask)
        shifted[4, :] = 1
        shifted[9, :] = 1
        # Horizontal layers produce all-zero dip fields on both sides, so
        # the correlation is undefined rather than 1.
        assert np.all(dip_field(mask, 5).angles == 0.0)
        assert np.all(dip_field(shifted, 5).angles == 0.0)
        with pytest.raises(UndefinedCorrelationError):
            dip_correlation(mask, shifted, 5)

    def test_two_empty_masks_are_undefined(self):
        empty = np.zeros((10, 10), dtype=np.uint8)
        with pytest.raises(UndefinedCorrelationError):
            dip_correlation(empty, empty, 5)


class TestSsim:
    def test_identical_masks_score_exactly_one(self):
        rng = np.random.default_rng(12)
        for _ in range(5):
            mask = random_mask(rng, int(rng.integers(11, 40)), int(rng.integers(11, 40)), 0.3)
            assert abs(ssim(mask, mask) - 1.0) <= 1e-12

    def test_all_zero_vs_all_one(self):
        zeros = np.zeros((16, 16), dtype=np.uint8)
        ones = np.ones((16, 16), dtype=np.uint8)
        c1 = 1e-4
        # mu_x=0, mu_y=1, all second moments 0: value is c1/(1 + c1).
        expected = c1 / (1.0 + c1)
        assert ssim(zeros, ones, 11, c1, 9e-4) == pytest.approx(expected, abs=1e-15)

    def test_window_equal_to_image_gives_single_window(self):
        a = np.eye(8, dtype=np.uint8)
        b = np.ones((8, 8), dtype=np.uint8)
        assert ssim(a, b, 8) == pytest.approx(naive_ssim(a, b, 8, 1e-4, 9e-4), abs=1e-12)

    def test_symmetry(self):
        a, b = pair_of_masks(77)
        w = min(5, *a.shape)
        assert ssim(a, b, w) == ssim(b, a, w)

    @pytest.mark.parametrize("window", [0, 20])
    def test_invalid_window_rejected(self, window):
        with pytest.raises(ValueError):
            ssim(np.zeros((8, 8), dtype=np.uint8), np.zeros((8, 8), dtype=np.uint8), window)

    def test_nonpositive_constants_rejected(self):
        mask = np.zeros((8, 8), dtype=np.uint8)
        with pytest.raises(ValueError):
            ssim(mask, mask, 3, c1=0.0)
        with pytest.raises(ValueError):
            ssim(mask, mask, 3, c2=-1.0)

    def test_random_pair_matches_window_by_window_oracle(self):
        rng = np.random.default_rng(13)
        a = random_mask(rng, 32, 32, 0.4)
        b = random_mask(rng, 32, 32, 0.4)
        assert ssim(a, b, 11) == pytest.approx(naive_ssim(a, b, 11, 1e-4, 9e-4), abs=1e-10)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10**9), st.sampled_from([3, 5, 7]))
    def test_matches_oracle_property(self, seed, window):
        rng = np.random.default_rng(seed)
        rows = int(rng.integers(window, 24))
        cols = int(rng.integers(window, 24))
        a = random_mask(rng, rows, cols, 0.35)
        b = random_mask(rng, rows, cols, 0.35)
        assert ssim(a, b, window) == pytest.approx(naive_ssim(a, b, window, 1e-4, 9e-4), abs=1e-10)


class TestLayerIouMatrix:
    def test_identical_layer_lists_have_unit_diagonal(self):
        mask, _ = synth_mask(SynthSpec(rows=20, cols=30, n_layers=3, seed=4))
        layers = extract_layers(mask)
        grid = layer_iou_matrix(layers, layers).scores
        assert np.allclose(np.diag(grid), 1.0)
        # Distinct synth layers never share pixels.
        assert np.allclose(grid - np.diag(np.diag(grid)), 0.0)

    def test_disjoint_layers_give_zero_grid(self):
        a = np.zeros((6, 6), dtype=np.uint8)
        a[0, :] = 1
        b = np.zeros((6, 6), dtype=np.uint8)
        b[3, :] = 1
        grid = layer_iou_matrix(extract_layers(a), extract_layers(b)).scores
        assert grid.shape == (1, 1)
        assert grid[0, 0] == 0.0

    def test_partial_overlap_value(self):
        a = np.zeros((3, 10), dtype=np.uint8)
        a[0, 0:10] = 1  # 10 pixels
        b = np.zeros((3, 10), dtype=np.uint8)
        b[0, 5:10] = 1
        b[1, 5:10] = 1  # shares 5, has 5 more
        grid = layer_iou_matrix(extract_layers(a), extract_layers(b)).scores
        assert grid[0, 0] == pytest.approx(1 / 3, abs=0)

    def test_empty_sides_give_zero_length_axes(self):
        layers = extract_layers(np.ones((2, 2), dtype=np.uint8))
        assert layer_iou_matrix([], layers).scores.shape == (0, 1)
        assert layer_iou_matrix(layers, []).scores.shape == (1, 0)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10**9))
    def test_score_is_one_iff_pixel_sets_identical(self, seed):
        a, b = pair_of_masks(seed, max_side=16)
        la, lb = extract_layers(a), extract_layers(b)
        grid = layer_iou_matrix(la, lb).scores
        for i, layer_a in enumerate(la):
            for j, layer_b in enumerate(lb):
                assert (grid[i, j] == 1.0) == (layer_a.pixels == layer_b.pixels)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10**9))
    def test_matches_set_oracle(self, seed):
        a, b = pair_of_masks(seed, max_side=20)
        la, lb = extract_layers(a), extract_layers(b)
        produced = layer_iou_matrix(la, lb).scores
        expected = naive_iou_matrix([set(l.pixels) for l in la], [set(l.pixels) for l in lb])
        np.testing.assert_array_equal(produced, expected)


class TestLayerRecallIou:
    def test_identical_single_layer_masks(self):
        mask = np.zeros((5, 8), dtype=np.uint8)
        mask[2, :] = 1
        layers = extract_layers(mask)
        assert layer_recall_iou(layer_iou_matrix(layers, layers), layers, layers) == 1.0

    def test_one_exact_match_one_total_miss(self):
        gt = np.zeros((9, 12), dtype=np.uint8)
        gt[2, :] = 1
        gt[6, :] = 1
        pred = np.zeros((9, 12), dtype=np.uint8)
        pred[2, :] = 1  # reproduces the first layer, misses the second
        la, lg = extract_layers(pred), extract_layers(gt)
        scores = layer_iou_matrix(la, lg)
        # Positive scores: only the exact match at IoU 1.0, so the mean
        # threshold is 1.0 and only that pair is selected.
        assert layer_recall_iou(scores, la, lg) == 1.0

    def test_disjoint_masks_are_undefined(self):
        a = np.zeros((6, 6), dtype=np.uint8)
        a[0, :] = 1
        b = np.zeros((6, 6), dtype=np.uint8)
        b[4, :] = 1
        la, lb = extract_layers(a), extract_layers(b)
        with pytest.raises(UndefinedRecallError) as err:
            layer_recall_iou(layer_iou_matrix(la, lb), la, lb)
        assert err.value.reason == "no-overlapping-layers"

    def test_threshold_selects_at_or_above_mean(self):
        # Two overlapping pairs with IoU 0.5 and 0.25: mean 0.375 keeps only
        # the stronger pair in "positive" mode.
        gt = np.zeros((10, 8), dtype=np.uint8)
        gt[1, 0:4] = 1  # layer G1: 4 px
        gt[5, 0:4] = 1  # layer G2: 4 px
        pred = np.zeros((10, 8), dtype=np.uint8)
        pred[1, 0:2] = 1           # A1: 2 px inside G1 -> IoU 2/4 = 0.5, recall 0.5
        pred[5, 0:1] = 1           # A2: 1 px inside G2 -> IoU 1/4 = 0.25
        la, lg = extract_layers(pred), extract_layers(gt)
        scores = layer_iou_matrix(la, lg)
        assert layer_recall_iou(scores, la, lg) == pytest.approx(0.5)

    def test_all_mode_lowers_threshold(self):
        gt = np.zeros((10, 8), dtype=np.uint8)
        gt[1, 0:4] = 1
        gt[5, 0:4] = 1
        pred = np.zeros((10, 8), dtype=np.uint8)
        pred[1, 0:2] = 1
        pred[5, 0:1] = 1
        la, lg = extract_layers(pred), extract_layers(gt)
        scores = layer_iou_matrix(la, lg)
        # Grid mean = (0.5 + 0.25)/4 = 0.1875: both pairs selected.
        expected = (0.5 + 0.25) / 2
        assert layer_recall_iou(scores, la, lg, threshold_mode="all") == pytest.approx(expected)

    def test_gt_layer_may_appear_in_multiple_pairs(self):
        gt = np.zeros((3, 6), dtype=np.uint8)
        gt[1, :] = 1  # one gt layer, 6 px
        pred = np.zeros((3, 6), dtype=np.uint8)
        pred[1, 0:2] = 1
        pred[1, 4:6] = 1  # two predicted segments, each IoU 2/6
        la, lg = extract_layers(pred), extract_layers(gt)
        scores = layer_iou_matrix(la, lg)
        # Both pairs sit exactly at the mean threshold; both recalls are 2/6.
        assert layer_recall_iou(scores, la, lg) == pytest.approx(2 / 6)

    def test_inconsistent_grid_rejected(self):
        mask = np.ones((2, 2), dtype=np.uint8)
        layers = extract_layers(mask)
        with pytest.raises(ValueError):
            layer_recall_iou(layer_iou_matrix(layers, layers), layers, [])


class TestVisionReport:
    def test_identity_pair_scores_ones(self):
        mask, _ = synth_mask(SynthSpec(rows=32, cols=48, n_layers=5, base_slope=0.6, seed=21))
        report = vision_report(mask, mask)
        assert report.as_dict() == {
            "rho": 1.0, "ssim": 1.0, "acc": 1.0, "iou_r": 1.0, "iou_rl": 1.0,
        }
        assert report.reasons == {}

    def test_empty_prediction_vs_nonempty_gt(self):
        gt, _ = synth_mask(SynthSpec(rows=24, cols=24, n_layers=3, base_slope=0.5, seed=9))
        empty = np.zeros_like(gt)
        report = vision_report(empty, gt)
        background = 1.0 - gt.sum() / gt.size
        assert report.pixel_accuracy == pytest.approx(background, abs=0)
        assert report.recall_iou == 0.0
        assert report.dip_correlation is None
        assert report.reasons["rho"] == "zero-variance"
        assert report.layer_recall_iou is None
        assert report.reasons["iou_rl"] == "no-overlapping-layers"

    def test_complement_pair(self):
        rng = np.random.default_rng(3)
        mask = random_mask(rng, 16, 16, 0.4)
        report = vision_report(mask, 1 - mask)
        assert report.pixel_accuracy == 0.0
        assert report.recall_iou == 0.0

    def test_empty_ground_truth_marks_recall_metrics_absent(self):
        pred, _ = synth_mask(SynthSpec(rows=24, cols=24, n_layers=3, base_slope=0.5, seed=14))
        report = vision_report(pred, np.zeros_like(pred))
        assert report.recall_iou is None
        assert report.reasons["iou_r"] == "empty-ground-truth"
        assert report.layer_recall_iou is None
        assert report.reasons["iou_rl"] == "no-overlapping-layers"
        assert report.dip_correlation is None  # the empty side is constant
        assert report.ssim is not None and report.pixel_accuracy is not None

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ShapeMismatchError):
            vision_report(np.zeros((4, 5), dtype=np.uint8), np.zeros((5, 4), dtype=np.uint8))

    def test_params_are_validated(self):
        with pytest.raises(ValueError):
            MetricParams(iou_threshold_mode="median")


class TestSymmetryAndRange:
    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**9))
    def test_symmetric_metrics(self, seed):
        a, b = pair_of_masks(seed)
        assert pixel_accuracy(a, b) == pixel_accuracy(b, a)
        w = min(3, *a.shape)
        assert ssim(a, b, w) == ssim(b, a, w)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**9))
    def test_recall_is_gt_anchored(self, seed):
        a, b = pair_of_masks(seed)
        if not a.any():
            a[0, 0] = 1
        if not b.any():
            b[-1, -1] = 1
        forward = recall_iou(a, b)
        backward = recall_iou(b, a)
        overlap = int(np.count_nonzero((a == 1) & (b == 1)))
        assert forward * np.count_nonzero(b) == pytest.approx(overlap, abs=1e-9)
        assert backward * np.count_nonzero(a) == pytest.approx(overlap, abs=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**9))
    def test_metric_ranges(self, seed):
        a, b = pair_of_masks(seed)
        assert 0.0 <= pixel_accuracy(a, b) <= 1.0
        w = min(5, *a.shape)
        assert -1.0 <= ssim(a, b, w) <= 1.0
        if b.any():
            assert 0.0 <= recall_iou(a, b) <= 1.0
        la, lb = extract_layers(a), extract_layers(b)
        grid = layer_iou_matrix(la, lb).scores
        assert np.all(grid >= 0.0) and np.all(grid <= 1.0)
        if (grid > 0).any():
            assert 0.0 <= layer_recall_iou(layer_iou_matrix(la, lb), la, lb) <= 1.0
