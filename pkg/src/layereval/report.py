"""Aggregation of per-input metric rows into mean ± std report tables.

A report holds one row per evaluated input plus one :class:`MeanStd` per
metric, aggregated over the inputs where that metric was defined. Absent
values are excluded from aggregation (never imputed as 0) and render as
``n/a(reason)``. Renderers emit CSV, Markdown, or JSON with byte-stable
output for identical input.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field

from .errors import ReportConsistencyError

# Canonical column order; reports use whichever subset applies.
COLUMN_ORDER = ("cl", "dl", "tl", "rho", "ssim", "acc", "iou_r", "iou_rl")
COUNT_COLUMNS = frozenset({"cl", "dl", "tl"})
CONNECTIVITY_TOLERANCE = 0.01

FORMATS = ("csv", "md", "json")


@dataclass(frozen=True)
class MeanStd:
    """Mean and standard deviation of n sampled values (std is 0 for n = 1)."""

    mean: float
    std: float
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"sample count must be >= 1, got {self.n}")
        if self.std < 0:
            raise ValueError(f"standard deviation must be >= 0, got {self.std}")
        if self.n == 1 and self.std != 0:
            raise ValueError("standard deviation of a single sample must be 0")


def aggregate(values, std_mode: str = "sample") -> MeanStd:
    """Mean and standard deviation of a non-empty value sequence.

    ``std_mode="sample"`` uses the n-1 divisor (0 when n = 1);
    ``"population"`` uses the n divisor. Exact summation makes the result
    independent of input order.
    """
    vals = [float(v) for v in values]
    if not vals:
        raise ValueError("cannot aggregate an empty sequence")
    if std_mode not in ("sample", "population"):
        raise ValueError(f"std_mode must be 'sample' or 'population', got {std_mode!r}")
    # The true mean always lies within [min, max]; clamp away the final
    # rounding of the exact-sum division so the invariant holds exactly.
    mean = min(max(statistics.fmean(vals), min(vals)), max(vals))
    if len(vals) == 1:
        std = 0.0
    elif std_mode == "sample":
        std = statistics.stdev(vals)
    else:
        std = statistics.pstdev(vals)
    return MeanStd(mean=mean, std=float(std), n=len(vals))


@dataclass(frozen=True)
class ReportRow:
    """Raw metric values (and absence reasons) for one evaluated input."""

    input_id: str
    values: dict[str, float] = field(default_factory=dict)
    reasons: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class AggregateReport:
    """Per-input rows plus per-metric aggregates for one method."""

    method: str
    columns: tuple[str, ...]
    rows: tuple[ReportRow, ...]
    aggregates: dict[str, MeanStd]


def build_report(
    method: str,
    rows,
    columns=None,
    std_mode: str = "sample",
) -> AggregateReport:
    """Assemble an :class:`AggregateReport` from per-input rows.

    ``columns`` defaults to every metric present in any row, in canonical
    order (unknown metrics follow, in first-seen order). Each aggregate
    covers exactly the rows where its metric is defined; metrics absent
    everywhere get no aggregate.
    """
    rows = tuple(rows)
    if columns is None:
        seen: list[str] = []
        for row in rows:
            for name in list(row.values) + list(row.reasons):
                if name not in seen:
                    seen.append(name)
        columns = tuple(c for c in COLUMN_ORDER if c in seen) + tuple(
            c for c in seen if c not in COLUMN_ORDER
        )
    else:
        columns = tuple(columns)

    aggregates: dict[str, MeanStd] = {}
    for name in columns:
        present = [row.values[name] for row in rows if name in row.values]
        if present:
            aggregates[name] = aggregate(present, std_mode=std_mode)
    return AggregateReport(method=method, columns=columns, rows=rows, aggregates=aggregates)


def validate_count_consistency(
    cl: float, dl: float, tl: float, tol: float = CONNECTIVITY_TOLERANCE
) -> None:
    """Check cl + dl == tl within *tol*, raising on violation."""
    if abs((cl + dl) - tl) > tol:
        raise ReportConsistencyError(
            f"continuous + broken != total: {cl} + {dl} != {tl} (tolerance {tol})"
        )


def _check_rows(report: AggregateReport) -> None:
    if COUNT_COLUMNS <= set(report.columns):
        for row in report.rows:
            if COUNT_COLUMNS <= set(row.values):
                validate_count_consistency(
                    row.values["cl"], row.values["dl"], row.values["tl"]
                )


def _format_value(name: str, value: float) -> str:
    if name in COUNT_COLUMNS and float(value).is_integer():
        return str(int(value))
    digits = 2 if name in COUNT_COLUMNS else 3
    return f"{value:.{digits}f}"


def _format_mean_std(name: str, agg: MeanStd) -> str:
    digits = 2 if name in COUNT_COLUMNS else 3
    return f"{agg.mean:.{digits}f}±{agg.std:.{digits}f}"


def _cell(row: ReportRow, name: str) -> str:
    if name in row.values:
        return _format_value(name, row.values[name])
    reason = row.reasons.get(name, "missing")
    return f"n/a({reason})"


def render_table(report: AggregateReport, fmt: str) -> str:
    """Render a report as ``csv``, ``md``, or ``json`` text.

    Output bytes are identical for identical reports. Rows carrying all
    three connectivity counts are checked for cl + dl == tl first.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown report format {fmt!r} (expected one of {FORMATS})")
    _check_rows(report)
    if fmt == "csv":
        return _render_csv(report)
    if fmt == "md":
        return _render_md(report)
    return _render_json(report)


def _render_csv(report: AggregateReport) -> str:
    lines = [",".join(("input_id",) + report.columns)]
    for row in report.rows:
        lines.append(",".join([row.input_id] + [_cell(row, c) for c in report.columns]))

    def agg_row(label: str, pick) -> str:
        cells = [label]
        for c in report.columns:
            agg = report.aggregates.get(c)
            cells.append("n/a(no-data)" if agg is None else pick(c, agg))
        return ",".join(cells)

    def fmt(name: str, value: float) -> str:
        return f"{value:.2f}" if name in COUNT_COLUMNS else f"{value:.3f}"

    lines.append(agg_row("mean", lambda c, a: fmt(c, a.mean)))
    lines.append(agg_row("std", lambda c, a: fmt(c, a.std)))
    lines.append(agg_row("n", lambda c, a: str(a.n)))
    return "\n".join(lines) + "\n"


def _render_md(report: AggregateReport) -> str:
    header = ["input_id"] + list(report.columns)
    lines = [
        "| " + " | ".join(header) + " |",
        "| " + " | ".join("---" for _ in header) + " |",
    ]
    for row in report.rows:
        cells = [row.input_id] + [_cell(row, c) for c in report.columns]
        lines.append("| " + " | ".join(cells) + " |")
    agg_cells = ["mean±std"]
    for c in report.columns:
        agg = report.aggregates.get(c)
        agg_cells.append("n/a(no-data)" if agg is None else _format_mean_std(c, agg))
    lines.append("| " + " | ".join(agg_cells) + " |")
    return "\n".join(lines) + "\n"


def _render_json(report: AggregateReport) -> str:
    payload = {
        "method": report.method,
        "columns": list(report.columns),
        "rows": [
            {"input_id": row.input_id, "values": row.values, "reasons": row.reasons}
            for row in report.rows
        ],
        "aggregates": {
            name: {"mean": agg.mean, "std": agg.std, "n": agg.n}
            for name, agg in report.aggregates.items()
        },
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
