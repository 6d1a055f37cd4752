"""Pairwise vision-based metrics over binary annotation masks.

Five metrics compare a predicted mask against a ground-truth mask of the
same dimensions:

* ``pixel_accuracy`` — fraction of cells on which the masks agree.
* ``dip_correlation`` — Pearson correlation between the per-pixel dip-angle
  fields of the two masks (see :func:`dip_field`).
* ``ssim`` — mean structural similarity over sliding uniform windows.
* ``recall_iou`` — overlap of positives divided by ground-truth positives.
* ``layer_recall_iou`` — mean per-layer recall over layer pairs whose IoU
  clears an adaptive (mean-IoU) threshold.

All functions are pure; metrics that have no defined value for an input
pair raise :class:`~layereval.errors.UndefinedMetricError` subclasses
rather than silently returning 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ShapeMismatchError,
    UndefinedCorrelationError,
    UndefinedRecallError,
)
from .mask import Layer, as_mask, extract_layers


@dataclass(frozen=True)
class MetricParams:
    """Tunable parameters for the metric suite.

    ``c1``/``c2`` are the SSIM stabilizers for weak denominators; the
    defaults are (0.01*L)^2 and (0.03*L)^2 with dynamic range L = 1 for
    binary masks. ``iou_threshold_mode`` selects whether the adaptive
    layer-pair threshold averages only strictly positive IoU scores
    (``"positive"``, the default) or the full score grid (``"all"``).
    """

    ssim_window: int = 11
    dip_window: int = 5
    c1: float = 1e-4
    c2: float = 9e-4
    iou_threshold_mode: str = "positive"

    def __post_init__(self):
        if self.iou_threshold_mode not in ("positive", "all"):
            raise ValueError(
                f"iou_threshold_mode must be 'positive' or 'all', got {self.iou_threshold_mode!r}"
            )


@dataclass(frozen=True)
class DipField:
    """Per-pixel average dip angles (radians) for one mask.

    Angles lie in (-pi/2, pi/2); pixels whose window yields no usable pair
    of transition points keep the zero default.
    """

    angles: np.ndarray
    window_size: int

    @property
    def rows(self) -> int:
        return int(self.angles.shape[0])

    @property
    def cols(self) -> int:
        return int(self.angles.shape[1])


@dataclass(frozen=True)
class IouScores:
    """Pairwise IoU grid between predicted layers (rows) and ground-truth
    layers (columns)."""

    scores: np.ndarray

    @property
    def n_pred(self) -> int:
        return int(self.scores.shape[0])

    @property
    def n_gt(self) -> int:
        return int(self.scores.shape[1])


@dataclass(frozen=True)
class VisionReport:
    """The five pairwise metrics for one (predicted, ground-truth) pair.

    Metrics that are undefined for the pair are ``None`` and carry a short
    reason code in ``reasons`` keyed by report column name.
    """

    dip_correlation: float | None
    ssim: float | None
    pixel_accuracy: float | None
    recall_iou: float | None
    layer_recall_iou: float | None
    reasons: dict[str, str] = field(default_factory=dict)

    def as_dict(self) -> dict[str, float]:
        """Column-keyed view of the defined metrics."""
        values = {
            "rho": self.dip_correlation,
            "ssim": self.ssim,
            "acc": self.pixel_accuracy,
            "iou_r": self.recall_iou,
            "iou_rl": self.layer_recall_iou,
        }
        return {k: v for k, v in values.items() if v is not None}


def _pair(mask_a, mask_gt) -> tuple[np.ndarray, np.ndarray]:
    a = as_mask(mask_a)
    g = as_mask(mask_gt)
    if a.shape != g.shape:
        raise ShapeMismatchError(f"mask shapes differ: {a.shape} vs {g.shape}")
    return a, g


def pixel_accuracy(mask_a, mask_gt) -> float:
    """Fraction of cells where the two masks agree (both 0 or both 1)."""
    a, g = _pair(mask_a, mask_gt)
    return float(np.count_nonzero(a == g) / a.size)


def recall_iou(mask_a, mask_gt) -> float:
    """Positive overlap divided by ground-truth positives.

    Not symmetric: the denominator is always the ground-truth mask. Raises
    :class:`UndefinedRecallError` when the ground truth is all zero.
    """
    a, g = _pair(mask_a, mask_gt)
    gt_positives = int(np.count_nonzero(g))
    if gt_positives == 0:
        raise UndefinedRecallError("empty-ground-truth", "ground-truth mask has no positive pixels")
    overlap = int(np.count_nonzero((a == 1) & (g == 1)))
    return overlap / gt_positives


def pearson(x, y) -> float:
    """Pearson product-moment correlation of two equal-length sequences.

    Raises :class:`UndefinedCorrelationError` when either input is constant.
    The result is clamped into [-1, 1] against floating-point drift.
    """
    xs = np.asarray(x, dtype=np.float64).ravel()
    ys = np.asarray(y, dtype=np.float64).ravel()
    if xs.size != ys.size:
        raise ValueError(f"length mismatch: {xs.size} vs {ys.size}")
    if xs.size < 2:
        raise ValueError("pearson needs at least 2 samples")
    if np.ptp(xs) == 0 or np.ptp(ys) == 0:
        raise UndefinedCorrelationError("zero-variance", "correlation of a constant sequence is undefined")
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    r = float(np.dot(dx, dy) / math.sqrt(np.dot(dx, dx) * np.dot(dy, dy)))
    return min(1.0, max(-1.0, r))


def _check_dip_window(window_size: int, shape: tuple[int, int]) -> None:
    if window_size < 3 or window_size % 2 == 0:
        raise ValueError(f"dip window must be odd and >= 3, got {window_size}")
    if window_size > min(shape):
        raise ValueError(f"dip window {window_size} exceeds mask dimensions {shape}")


def dip_field(mask, window_size: int = 5) -> DipField:
    """Average local dip angle at every pixel.

    For each pixel the window of ``window_size`` squared centred there
    (clipped at the borders, never padded) is scanned column by column for
    top-edge transitions: cells that are 1 with a 0 directly above, both
    inside the window. Transition points are ordered by (col, row); each
    consecutive pair in distinct columns contributes
    ``atan2(delta_row, delta_col)``, and the pixel's dip is the mean of
    those angles. Pixels with no such pair keep dip 0.
    """
    m = as_mask(mask)
    _check_dip_window(window_size, m.shape)
    rows, cols = m.shape
    half = window_size // 2

    transitions = np.zeros((rows, cols), dtype=bool)
    transitions[1:] = (m[1:] == 1) & (m[:-1] == 0)

    # Per column: nearest transition row at-or-below r / at-or-above r.
    row_index = np.arange(rows)[:, None]
    prev_tr = np.maximum.accumulate(np.where(transitions, row_index, -1), axis=0)
    next_tr = np.minimum.accumulate(np.where(transitions, row_index, rows)[::-1], axis=0)[::-1]

    col_index = np.arange(cols)
    win_lo = np.maximum(col_index - half, 0)
    win_hi = np.minimum(col_index + half, cols - 1)

    out = np.zeros((rows, cols), dtype=np.float64)
    for i in range(rows):
        # A transition needs its 0-cell inside the window too, so the
        # window's own top row is excluded from the scan range.
        top = max(0, i - half) + 1
        bottom = min(rows - 1, i + half)
        first = next_tr[top]
        last = prev_tr[bottom]
        occupied = np.nonzero(first <= bottom)[0]
        if occupied.size < 2:
            continue
        src = occupied[:-1]
        dst = occupied[1:]
        angles = np.arctan2(first[dst] - last[src], dst - src)
        prefix = np.concatenate(([0.0], np.cumsum(angles)))
        # Links wholly inside each window form one contiguous run because
        # both endpoints of a link are adjacent occupied columns.
        start = np.searchsorted(src, win_lo, side="left")
        stop = np.searchsorted(dst, win_hi, side="right")
        count = stop - start
        usable = count > 0
        if not usable.any():
            continue
        sums = prefix[np.where(usable, stop, 0)] - prefix[np.where(usable, start, 0)]
        out[i, usable] = sums[usable] / count[usable]

    return DipField(angles=out, window_size=window_size)


def dip_correlation(mask_a, mask_gt, window_size: int = 5) -> float:
    """Pearson correlation between the flattened dip fields of two masks."""
    a, g = _pair(mask_a, mask_gt)
    field_a = dip_field(a, window_size)
    field_g = dip_field(g, window_size)
    return pearson(field_a.angles.ravel(), field_g.angles.ravel())


def _window_sums(values: np.ndarray, window: int) -> np.ndarray:
    """Sum of every window x window block at stride 1 (valid positions only),
    computed exactly via an integer summed-area table."""
    rows, cols = values.shape
    table = np.zeros((rows + 1, cols + 1), dtype=np.int64)
    table[1:, 1:] = values.astype(np.int64).cumsum(axis=0).cumsum(axis=1)
    return (
        table[window:, window:]
        - table[:-window, window:]
        - table[window:, :-window]
        + table[:-window, :-window]
    )


def ssim(mask_a, mask_gt, window_size: int = 11, c1: float = 1e-4, c2: float = 9e-4) -> float:
    """Mean structural similarity between two masks.

    A uniform ``window_size`` squared window slides at stride 1 over fully
    interior positions; per window the value is

        ((2*mu_x*mu_y + c1) * (2*cov_xy + c2))
        / ((mu_x^2 + mu_y^2 + c1) * (var_x + var_y + c2))

    with plain (population) moments of the binary values, and the result is
    the mean over all windows.
    """
    a, g = _pair(mask_a, mask_gt)
    rows, cols = a.shape
    if window_size < 1 or window_size > min(rows, cols):
        raise ValueError(f"ssim window must be in [1, {min(rows, cols)}], got {window_size}")
    if c1 <= 0 or c2 <= 0:
        raise ValueError("ssim stabilizers c1 and c2 must be > 0")

    n = window_size * window_size
    sum_a = _window_sums(a, window_size)
    sum_g = _window_sums(g, window_size)
    sum_ag = _window_sums(a & g, window_size)  # for 0/1 data, x*y == x AND y

    mu_a = sum_a / n
    mu_g = sum_g / n
    # For 0/1 data E[x^2] == E[x], so var = mu - mu^2.
    var_a = mu_a - mu_a * mu_a
    var_g = mu_g - mu_g * mu_g
    cov = sum_ag / n - mu_a * mu_g

    numerator = (2 * mu_a * mu_g + c1) * (2 * cov + c2)
    denominator = (mu_a * mu_a + mu_g * mu_g + c1) * (var_a + var_g + c2)
    return float(np.mean(numerator / denominator))


def layer_iou_matrix(layers_a: list[Layer], layers_gt: list[Layer]) -> IouScores:
    """IoU between every predicted layer and every ground-truth layer.

    Returns an (n_pred, n_gt) grid; an empty layer list on either side
    yields a grid with a zero-length axis.
    """
    scores = np.zeros((len(layers_a), len(layers_gt)), dtype=np.float64)
    for i, la in enumerate(layers_a):
        for j, lg in enumerate(layers_gt):
            inter = len(la.pixels & lg.pixels)
            if inter:
                scores[i, j] = inter / (len(la.pixels) + len(lg.pixels) - inter)
    return IouScores(scores=scores)


def layer_recall_iou(
    scores: IouScores,
    layers_a: list[Layer],
    layers_gt: list[Layer],
    threshold_mode: str = "positive",
) -> float:
    """Mean recall over layer pairs selected by the adaptive IoU threshold.

    The threshold is the mean IoU (over strictly positive scores by
    default, or over the whole grid with ``threshold_mode="all"``); pairs
    with a positive score at or above it are selected, and each
    contributes ``|intersection| / |ground-truth layer|``. A ground-truth
    layer may appear in several selected pairs. Raises
    :class:`UndefinedRecallError` when no pair overlaps at all.
    """
    if threshold_mode not in ("positive", "all"):
        raise ValueError(f"threshold_mode must be 'positive' or 'all', got {threshold_mode!r}")
    grid = np.asarray(scores.scores, dtype=np.float64)
    if grid.shape != (len(layers_a), len(layers_gt)):
        raise ValueError(
            f"score grid shape {grid.shape} does not match layer counts "
            f"({len(layers_a)}, {len(layers_gt)})"
        )
    positive = grid[grid > 0]
    if positive.size == 0:
        raise UndefinedRecallError("no-overlapping-layers", "no layer pair has positive IoU")
    threshold = float(positive.mean() if threshold_mode == "positive" else grid.mean())
    recalls = []
    for i, j in np.argwhere((grid > 0) & (grid >= threshold)):
        la = layers_a[int(i)]
        lg = layers_gt[int(j)]
        recalls.append(len(la.pixels & lg.pixels) / len(lg.pixels))
    return float(np.mean(recalls))


def vision_report(mask_a, mask_gt, params: MetricParams = MetricParams()) -> VisionReport:
    """Run the full metric suite on one mask pair.

    Sub-metrics without a defined value are reported as ``None`` with a
    reason code instead of a fabricated 0.
    """
    a, g = _pair(mask_a, mask_gt)
    reasons: dict[str, str] = {}

    acc = pixel_accuracy(a, g)
    similarity = ssim(a, g, params.ssim_window, params.c1, params.c2)

    try:
        rho = dip_correlation(a, g, params.dip_window)
    except UndefinedCorrelationError as err:
        rho = None
        reasons["rho"] = err.reason

    try:
        iou_r = recall_iou(a, g)
    except UndefinedRecallError as err:
        iou_r = None
        reasons["iou_r"] = err.reason

    layers_a = extract_layers(a)
    layers_gt = extract_layers(g)
    try:
        iou_rl = layer_recall_iou(
            layer_iou_matrix(layers_a, layers_gt),
            layers_a,
            layers_gt,
            params.iou_threshold_mode,
        )
    except UndefinedRecallError as err:
        iou_rl = None
        reasons["iou_rl"] = err.reason

    return VisionReport(
        dip_correlation=rho,
        ssim=similarity,
        pixel_accuracy=acc,
        recall_iou=iou_r,
        layer_recall_iou=iou_rl,
        reasons=reasons,
    )
