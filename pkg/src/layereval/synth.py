"""Deterministic synthetic mask generation with a built-in connectivity oracle.

Layers are piecewise-linear traces, one pixel per column, drawn inside
disjoint horizontal bands separated by at least one empty row so that
distinct layers can never merge into a single 8-connected component.
Per-layer slope jitter is clamped to [-1, 1] pixels per trace, which keeps
each unbroken trace a single component. A broken layer gets one gap of one
or more columns, which always splits it into exactly two components.

Because the construction is fully controlled, the generator can report the
exact connectivity triple of the mask it built; that report serves as an
independent oracle for the connectivity metric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .connectivity import ConnectivityReport
from .errors import UnplaceableLayersError

SLOPE_JITTER = 0.3  # max |pixels per trace| added to the base slope


@dataclass(frozen=True)
class SynthSpec:
    """Parameters for one synthetic mask.

    ``base_slope`` is in pixels per trace (positive dips downward);
    ``break_prob`` is the per-layer probability of inserting a gap.
    The same spec always produces the same mask.
    """

    rows: int
    cols: int
    n_layers: int
    base_slope: float = 0.0
    break_prob: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"dimensions must be >= 1, got {self.rows}x{self.cols}")
        if self.n_layers < 0:
            raise ValueError(f"n_layers must be >= 0, got {self.n_layers}")
        if not 0.0 <= self.break_prob <= 1.0:
            raise ValueError(f"break_prob must be in [0, 1], got {self.break_prob}")


def synth_mask(spec: SynthSpec) -> tuple[np.ndarray, ConnectivityReport]:
    """Build a mask from *spec* and return it with its exact connectivity triple."""
    mask = np.zeros((spec.rows, spec.cols), dtype=np.uint8)
    if spec.n_layers == 0:
        return mask, ConnectivityReport(continuous=0, broken=0, total=0)

    # n bands of height >= 1 with one separator row between consecutive bands.
    if spec.rows < 2 * spec.n_layers - 1:
        raise UnplaceableLayersError(
            f"cannot place {spec.n_layers} non-overlapping layers in {spec.rows} rows "
            f"(need at least {2 * spec.n_layers - 1})"
        )
    usable = spec.rows - (spec.n_layers - 1)
    base_height = usable // spec.n_layers
    remainder = usable % spec.n_layers
    heights = [base_height + 1 if k < remainder else base_height for k in range(spec.n_layers)]

    rng = np.random.default_rng(spec.seed)
    offsets = np.arange(spec.cols, dtype=np.float64)
    continuous = 0
    broken = 0
    band_top = 0
    for height in heights:
        band_bottom = band_top + height - 1
        slope = float(np.clip(spec.base_slope + rng.uniform(-SLOPE_JITTER, SLOPE_JITTER), -1.0, 1.0))
        anchor = int(rng.integers(band_top, band_bottom + 1))
        # Half-up rounding: consecutive columns differ by at most one row for
        # |slope| <= 1, so each unbroken trace stays 8-connected.
        trace = np.floor(anchor + slope * offsets + 0.5).astype(np.int64)
        trace = np.clip(trace, band_top, band_bottom)

        wants_break = rng.random() < spec.break_prob
        if wants_break and spec.cols >= 3:
            gap_start = int(rng.integers(1, spec.cols - 1))
            gap_width = int(rng.integers(1, spec.cols - gap_start))
            keep = np.ones(spec.cols, dtype=bool)
            keep[gap_start:gap_start + gap_width] = False
            mask[trace[keep], np.nonzero(keep)[0]] = 1
            broken += 2
        else:
            mask[trace, offsets.astype(np.int64)] = 1
            continuous += 1
        band_top = band_bottom + 2

    return mask, ConnectivityReport(continuous=continuous, broken=broken, total=continuous + broken)
