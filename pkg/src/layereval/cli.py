"""Command-line front end.

Three subcommands:

* ``evaluate`` — score predicted masks against ground-truth masks (five
  pairwise metrics) and emit a per-pair table with mean ± std aggregates.
* ``connectivity`` — count continuous/broken/total layers per mask.
* ``synth`` — generate deterministic synthetic masks plus a JSON sidecar
  with each mask's exact connectivity triple.

Directory inputs are paired by identical filename. Results are computed in
parallel (``--jobs``) but always collected in sorted input order, so output
bytes depend only on the inputs and the configuration. A pair that fails to
load or score is reported as a row of ``n/a(reason)`` cells instead of
aborting the batch.

Exit codes: 0 success, 2 configuration error, 3 I/O error. The default
output format is ``md`` unless overridden by the LAYEREVAL_FORMAT
environment variable or the ``--format`` flag.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .connectivity import connectivity_report
from .errors import ConfigError, LayerEvalError, MaskFormatError, UnplaceableLayersError
from .io import SUPPORTED_SUFFIXES, load_mask, save_mask
from .metrics import MetricParams, vision_report
from .report import FORMATS, ReportRow, build_report, render_table
from .synth import SynthSpec, synth_mask

FORMAT_ENV_VAR = "LAYEREVAL_FORMAT"
VISION_COLUMNS = ("rho", "ssim", "acc", "iou_r", "iou_rl")
CONNECTIVITY_COLUMNS = ("cl", "dl", "tl")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def _default_format() -> str:
    fmt = os.environ.get(FORMAT_ENV_VAR, "md")
    return fmt if fmt in FORMATS else "md"


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="layereval",
        description="Evaluate binary layer-annotation masks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=_default_format(),
                        help="report format (default: %(default)s, or $" + FORMAT_ENV_VAR + ")")
    common.add_argument("--out", type=Path, default=None,
                        help="write the report here instead of stdout")
    common.add_argument("--std-mode", choices=("sample", "population"), default="sample",
                        help="standard-deviation divisor for aggregates")
    common.add_argument("--jobs", type=_positive_int, default=os.cpu_count() or 1,
                        help="parallel workers (default: all cores)")
    common.add_argument("--label", default=None, help="method label for the report")

    p_eval = sub.add_parser("evaluate", parents=[common],
                            help="compare predicted masks against ground truth")
    p_eval.add_argument("--pred", type=Path, required=True, help="predicted mask file or directory")
    p_eval.add_argument("--gt", type=Path, required=True, help="ground-truth mask file or directory")
    p_eval.add_argument("--ssim-window", type=_positive_int, default=11)
    p_eval.add_argument("--dip-window", type=_positive_int, default=5)
    p_eval.add_argument("--c1", type=float, default=1e-4)
    p_eval.add_argument("--c2", type=float, default=9e-4)
    p_eval.add_argument("--iou-threshold-mode", choices=("positive", "all"), default="positive",
                        help="average positive IoU scores only, or the whole grid")
    p_eval.set_defaults(func=cmd_evaluate)

    p_conn = sub.add_parser("connectivity", parents=[common],
                            help="count continuous/broken layers per mask")
    p_conn.add_argument("--mask", type=Path, required=True, help="mask file or directory")
    p_conn.add_argument("--min-span-fraction", type=float, default=1.0,
                        help="fraction of columns a continuous layer must span")
    p_conn.add_argument("--min-layer-pixels", type=_positive_int, default=1,
                        help="drop components smaller than this before counting")
    p_conn.set_defaults(func=cmd_connectivity)

    p_synth = sub.add_parser("synth",
                             help="generate synthetic masks with a connectivity oracle sidecar")
    p_synth.add_argument("--out-dir", type=Path, required=True)
    p_synth.add_argument("--count", type=_positive_int, default=1, help="number of masks")
    p_synth.add_argument("--rows", type=_positive_int, required=True)
    p_synth.add_argument("--cols", type=_positive_int, required=True)
    p_synth.add_argument("--layers", type=int, required=True, help="layers per mask")
    p_synth.add_argument("--base-slope", type=float, default=0.0, help="pixels per trace")
    p_synth.add_argument("--break-prob", type=float, default=0.0)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--mask-format", choices=("p2", "p5", "csv"), default="p5")
    p_synth.set_defaults(func=cmd_synth)

    return parser


def _collect_inputs(path: Path) -> dict[str, Path]:
    if path.is_dir():
        files = {
            p.name: p
            for p in path.iterdir()
            if p.is_file() and p.suffix.lower() in SUPPORTED_SUFFIXES
        }
        if not files:
            raise ConfigError(f"no inputs: no mask files under {path}")
        return files
    if path.is_file():
        return {path.name: path}
    raise FileNotFoundError(f"no such file or directory: {path}")


def _pair_inputs(pred: Path, gt: Path) -> list[tuple[str, Path, Path]]:
    pred_files = _collect_inputs(pred)
    gt_files = _collect_inputs(gt)
    if pred.is_file() and gt.is_file():
        # Single-file mode pairs the two files regardless of their names.
        name = next(iter(pred_files))
        return [(name, pred_files[name], next(iter(gt_files.values())))]
    if pred.is_file() != gt.is_file():
        raise ConfigError("--pred and --gt must both be files or both be directories")
    unpaired = sorted(set(pred_files) ^ set(gt_files))
    if unpaired:
        raise ConfigError("unpaired inputs (present on one side only): " + ", ".join(unpaired))
    return [(name, pred_files[name], gt_files[name]) for name in sorted(pred_files)]


def _evaluate_pair(item: tuple[str, Path, Path, MetricParams]) -> ReportRow:
    name, pred_path, gt_path, params = item
    try:
        pred = load_mask(pred_path)
        gt = load_mask(gt_path)
        result = vision_report(pred, gt, params)
    except (LayerEvalError, OSError, ValueError) as err:
        reason = f"error: {err}".replace(",", ";").replace("\n", " ")
        return ReportRow(input_id=name, values={}, reasons={c: reason for c in VISION_COLUMNS})
    reasons = dict(result.reasons)
    return ReportRow(input_id=name, values=result.as_dict(), reasons=reasons)


def _connectivity_one(item: tuple[str, Path, float, int]) -> ReportRow:
    name, path, min_span_fraction, min_layer_pixels = item
    try:
        mask = load_mask(path)
        counts = connectivity_report(
            mask,
            min_span_fraction=min_span_fraction,
            min_layer_pixels=min_layer_pixels,
        )
    except (LayerEvalError, OSError, ValueError) as err:
        reason = f"error: {err}".replace(",", ";").replace("\n", " ")
        return ReportRow(input_id=name, values={}, reasons={c: reason for c in CONNECTIVITY_COLUMNS})
    return ReportRow(input_id=name, values={k: float(v) for k, v in counts.as_dict().items()})


def _run_jobs(worker, items: list, jobs: int) -> list[ReportRow]:
    if jobs <= 1 or len(items) <= 1:
        return [worker(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(worker, items))


def _emit(report_text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(report_text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(report_text, encoding="utf-8")


def cmd_evaluate(args: argparse.Namespace) -> int:
    if args.dip_window < 3 or args.dip_window % 2 == 0:
        raise ConfigError(f"--dip-window must be odd and >= 3, got {args.dip_window}")
    if args.c1 <= 0 or args.c2 <= 0:
        raise ConfigError("--c1 and --c2 must be > 0")
    params = MetricParams(
        ssim_window=args.ssim_window,
        dip_window=args.dip_window,
        c1=args.c1,
        c2=args.c2,
        iou_threshold_mode=args.iou_threshold_mode,
    )
    pairs = _pair_inputs(args.pred, args.gt)
    items = [(name, pred, gt, params) for name, pred, gt in pairs]
    rows = _run_jobs(_evaluate_pair, items, args.jobs)
    rows.sort(key=lambda row: row.input_id)
    label = args.label or args.pred.name
    report = build_report(label, rows, columns=VISION_COLUMNS, std_mode=args.std_mode)
    _emit(render_table(report, args.format), args.out)
    return EXIT_OK


def cmd_connectivity(args: argparse.Namespace) -> int:
    if not 0.0 < args.min_span_fraction <= 1.0:
        raise ConfigError(f"--min-span-fraction must be in (0, 1], got {args.min_span_fraction}")
    inputs = _collect_inputs(args.mask)
    items = [
        (name, path, args.min_span_fraction, args.min_layer_pixels)
        for name, path in sorted(inputs.items())
    ]
    rows = _run_jobs(_connectivity_one, items, args.jobs)
    rows.sort(key=lambda row: row.input_id)
    label = args.label or args.mask.name
    report = build_report(label, rows, columns=CONNECTIVITY_COLUMNS, std_mode=args.std_mode)
    _emit(render_table(report, args.format), args.out)
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    if not 0.0 <= args.break_prob <= 1.0:
        raise ConfigError(f"--break-prob must be in [0, 1], got {args.break_prob}")
    if args.layers < 0:
        raise ConfigError(f"--layers must be >= 0, got {args.layers}")
    args.out_dir.mkdir(parents=True, exist_ok=True)
    suffix = ".csv" if args.mask_format == "csv" else ".pgm"
    oracle: dict[str, dict[str, int]] = {}
    for index in range(args.count):
        spec = SynthSpec(
            rows=args.rows,
            cols=args.cols,
            n_layers=args.layers,
            base_slope=args.base_slope,
            break_prob=args.break_prob,
            seed=args.seed + index,
        )
        try:
            mask, counts = synth_mask(spec)
        except UnplaceableLayersError as err:
            raise ConfigError(str(err)) from err
        name = f"mask_{index:03d}{suffix}"
        save_mask(mask, args.out_dir / name, fmt=args.mask_format)
        oracle[name] = counts.as_dict()
    sidecar = args.out_dir / "oracle.json"
    sidecar.write_text(json.dumps(oracle, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    sys.stdout.write(f"wrote {args.count} mask(s) and {sidecar}\n")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except MaskFormatError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_IO
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_IO


def entry() -> None:
    sys.exit(main())
