"""Binary annotation masks and layer extraction.

A mask is a 2D numpy array of 0/1 values: rows are depth (fast-time)
samples, columns are along-track traces. A "layer" is one 8-connected
component of positive pixels; dipping layers advance diagonally between
adjacent traces, so 4-connectivity would fragment them.

All functions treat masks as immutable and are safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

_EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


def as_mask(values) -> np.ndarray:
    """Validate *values* as a binary mask and return it as a 2D uint8 array.

    Accepts any array-like. Raises ValueError for non-2D input, empty
    dimensions, or cells outside {0, 1}.
    """
    arr = np.asarray(values)
    if arr.ndim != 2:
        raise ValueError(f"mask must be 2D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"mask dimensions must be >= 1, got {arr.shape}")
    if arr.dtype == bool:
        return arr.astype(np.uint8)
    out = arr.astype(np.uint8, copy=True) if arr.dtype != np.uint8 else np.array(arr, copy=True)
    if not np.array_equal(out, arr) or not np.isin(out, (0, 1)).all():
        raise ValueError("mask cells must all be 0 or 1")
    return out


@dataclass(frozen=True)
class Layer:
    """One 8-connected component of positive pixels.

    ``pixels`` holds (row, col) coordinates; ``col_min``/``col_max`` are the
    inclusive column extent. Because each step of an 8-connected path moves
    at most one column, a layer occupies every column in that extent.
    """

    id: int
    pixels: frozenset[tuple[int, int]]
    col_min: int
    col_max: int

    def __post_init__(self):
        if not self.pixels:
            raise ValueError("a layer must contain at least one pixel")

    @classmethod
    def from_pixels(cls, id: int, pixels) -> "Layer":
        pix = frozenset((int(r), int(c)) for r, c in pixels)
        if not pix:
            raise ValueError("a layer must contain at least one pixel")
        cs = [c for _, c in pix]
        return cls(id=id, pixels=pix, col_min=min(cs), col_max=max(cs))

    @property
    def size(self) -> int:
        return len(self.pixels)

    def span(self) -> int:
        """Number of columns covered, inclusive of both ends."""
        return self.col_max - self.col_min + 1


def extract_layers(mask) -> list[Layer]:
    """Split a mask into its 8-connected components.

    Every positive pixel belongs to exactly one returned layer, and the
    layers are ordered by (min row, min col) of their pixel sets. An empty
    mask yields an empty list.
    """
    m = as_mask(mask)
    labeled, count = ndimage.label(m, structure=_EIGHT_CONNECTED)
    if count == 0:
        return []
    rr, cc = np.nonzero(labeled)
    labels = labeled[rr, cc]
    order = np.argsort(labels, kind="stable")
    rs, cs, ls = rr[order], cc[order], labels[order]
    bounds = np.searchsorted(ls, np.arange(1, count + 2))

    components = []
    for k in range(count):
        seg_r = rs[bounds[k]:bounds[k + 1]]
        seg_c = cs[bounds[k]:bounds[k + 1]]
        # np.nonzero scans row-major, so seg_r[0] is the component's min row;
        # the min column must be taken over the whole component.
        key = (int(seg_r[0]), int(seg_c.min()))
        components.append((key, seg_r, seg_c))
    components.sort(key=lambda item: item[0])

    layers = []
    for idx, (_, seg_r, seg_c) in enumerate(components):
        pixels = frozenset(zip(seg_r.tolist(), seg_c.tolist()))
        layers.append(
            Layer(
                id=idx,
                pixels=pixels,
                col_min=int(seg_c.min()),
                col_max=int(seg_c.max()),
            )
        )
    return layers


def rasterize_layers(layers: list[Layer], shape: tuple[int, int]) -> np.ndarray:
    """Paint layers back onto a zero grid of the given (rows, cols) shape."""
    out = np.zeros(shape, dtype=np.uint8)
    for layer in layers:
        for r, c in layer.pixels:
            out[r, c] = 1
    return out
