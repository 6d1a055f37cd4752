"""Exception types shared across the package."""

from __future__ import annotations


class LayerEvalError(Exception):
    """Base class for all layereval-specific errors."""


class MaskFormatError(LayerEvalError):
    """A mask file is malformed: bad header, bad values, or a payload whose
    size disagrees with the declared dimensions."""


class ShapeMismatchError(LayerEvalError):
    """Two masks that must share dimensions do not."""


class UndefinedMetricError(LayerEvalError):
    """A metric has no defined value for the given inputs.

    ``reason`` is a short machine-readable code (e.g. ``"zero-variance"``)
    that reports propagate into their ``n/a(reason)`` cells.
    """

    def __init__(self, reason: str, message: str | None = None):
        super().__init__(message or reason)
        self.reason = reason


class UndefinedCorrelationError(UndefinedMetricError):
    """Pearson correlation is undefined (an input has zero variance)."""


class UndefinedRecallError(UndefinedMetricError):
    """A recall-style metric is undefined (empty ground truth, or no
    overlapping layer pair to select)."""


class UnplaceableLayersError(LayerEvalError):
    """A synthetic-mask request asks for more layers than the grid can hold
    without vertical overlap."""


class ReportConsistencyError(LayerEvalError):
    """A report row violates an internal consistency rule (continuous +
    broken must equal total)."""


class ConfigError(LayerEvalError):
    """Invalid CLI configuration: bad parameters, no inputs, or unpaired
    input files."""
