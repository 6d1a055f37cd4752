"""Connectivity scoring of a single annotation mask.

Counts how many picked layers are continuous versus broken. A layer is
continuous when its column extent covers the full trace range of the mask;
``min_span_fraction`` relaxes that to a fractional coverage, and
``min_layer_pixels`` optionally drops tiny components before counting.
Good annotations maximize continuous layers and minimize broken ones.
"""

from __future__ import annotations

from dataclasses import dataclass

from .mask import as_mask, extract_layers


@dataclass(frozen=True)
class ConnectivityReport:
    """Counts of continuous, broken, and total picked layers for one mask."""

    continuous: int
    broken: int
    total: int

    def __post_init__(self):
        if self.continuous < 0 or self.broken < 0 or self.total < 0:
            raise ValueError("connectivity counts must be non-negative")
        if self.total != self.continuous + self.broken:
            raise ValueError(
                f"inconsistent connectivity counts: {self.continuous} + {self.broken} "
                f"!= {self.total}"
            )

    def as_dict(self) -> dict[str, int]:
        """Column-keyed view used by report tables."""
        return {"cl": self.continuous, "dl": self.broken, "tl": self.total}


def connectivity_report(
    mask,
    *,
    min_span_fraction: float = 1.0,
    min_layer_pixels: int = 1,
) -> ConnectivityReport:
    """Count continuous and broken layers in a mask.

    With the defaults, a layer counts as continuous only when it spans every
    column. An empty mask reports (0, 0, 0).
    """
    if not 0.0 < min_span_fraction <= 1.0:
        raise ValueError(f"min_span_fraction must be in (0, 1], got {min_span_fraction}")
    if min_layer_pixels < 1:
        raise ValueError(f"min_layer_pixels must be >= 1, got {min_layer_pixels}")
    m = as_mask(mask)
    cols = m.shape[1]
    layers = [layer for layer in extract_layers(m) if layer.size >= min_layer_pixels]
    continuous = sum(1 for layer in layers if layer.span() >= min_span_fraction * cols)
    return ConnectivityReport(
        continuous=continuous,
        broken=len(layers) - continuous,
        total=len(layers),
    )
