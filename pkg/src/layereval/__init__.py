"""Quantitative evaluation of binary layer-annotation masks.

Compares predicted radar ice-layer annotations against ground truth with a
connectivity triple (continuous/broken/total layers) and five pairwise
vision metrics (dip correlation, SSIM, pixel accuracy, recall IoU, and
layer-by-layer recall IoU), and aggregates results into mean ± std tables.
"""

from .connectivity import ConnectivityReport, connectivity_report
from .errors import (
    ConfigError,
    LayerEvalError,
    MaskFormatError,
    ReportConsistencyError,
    ShapeMismatchError,
    UndefinedCorrelationError,
    UndefinedMetricError,
    UndefinedRecallError,
    UnplaceableLayersError,
)
from .io import load_mask, save_mask
from .mask import Layer, as_mask, extract_layers, rasterize_layers
from .metrics import (
    DipField,
    IouScores,
    MetricParams,
    VisionReport,
    dip_correlation,
    dip_field,
    layer_iou_matrix,
    layer_recall_iou,
    pearson,
    pixel_accuracy,
    recall_iou,
    ssim,
    vision_report,
)
from .report import (
    AggregateReport,
    MeanStd,
    ReportRow,
    aggregate,
    build_report,
    render_table,
    validate_count_consistency,
)
from .synth import SynthSpec, synth_mask

__version__ = "0.1.0"

__all__ = [
    "AggregateReport",
    "ConfigError",
    "ConnectivityReport",
    "DipField",
    "IouScores",
    "Layer",
    "LayerEvalError",
    "MaskFormatError",
    "MeanStd",
    "MetricParams",
    "ReportConsistencyError",
    "ReportRow",
    "ShapeMismatchError",
    "SynthSpec",
    "UndefinedCorrelationError",
    "UndefinedMetricError",
    "UndefinedRecallError",
    "UnplaceableLayersError",
    "VisionReport",
    "aggregate",
    "as_mask",
    "build_report",
    "connectivity_report",
    "dip_correlation",
    "dip_field",
    "extract_layers",
    "layer_iou_matrix",
    "layer_recall_iou",
    "load_mask",
    "pearson",
    "pixel_accuracy",
    "rasterize_layers",
    "recall_iou",
    "render_table",
    "save_mask",
    "ssim",
    "synth_mask",
    "validate_count_consistency",
    "vision_report",
    "__version__",
]
