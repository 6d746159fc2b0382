"""Command-line entry points: serve, simulate, import-voc, synth, report.

Configuration comes from flags and IADET_-prefixed environment variables;
flags win.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .detectors import DETECTOR_KINDS, SyntheticDetectorConfig
from .cost_model import CostModelConfig
from .errors import IadetError, MissingGroundTruthError
from .jsonio import atomic_write_text
from .reporting import (
    DEFAULT_BOX_FILTER_WINDOW,
    ab_table,
    append_mean,
    format_ab_csv,
    format_ab_markdown,
    format_curve_csv,
    format_summary_csv,
    format_summary_markdown,
    summary_row_from_values,
)
from .selection import STRATEGIES
from .simulator import (
    SimulationConfig,
    advantage_curve,
    report_from_payload,
    simulate,
    unassisted_schedule,
)
from .store import (
    AnnotationStore,
    list_voc_classes,
    load_dataset_file,
    parse_voc_directory,
    save_dataset_file,
)
from .synth import make_synthetic_records

ENV_PREFIX = "IADET_"


def _env(name: str, default=None):
    return os.environ.get(ENV_PREFIX + name.upper(), default)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iadet", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the robot-annotator evaluation")
    p.add_argument("--dataset", required=True, help="dataset JSON with gt boxes")
    p.add_argument("--rate", type=float, default=None, help="annotator interactions per second")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--detector", choices=DETECTOR_KINDS, default=None)
    p.add_argument("--training-speed", type=float, default=None, help="trainer images per second")
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--cadence", choices=("wall_clock", "per_annotation"), default=None)
    p.add_argument("--strategy", choices=STRATEGIES, default=None)
    p.add_argument("--iou-threshold", type=float, default=None)
    p.add_argument("--no-navigation-baseline", action="store_true",
                   help="count unassisted cost as 2 boxes' clicks only")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("import-voc", help="ingest VOC XML ground truth for one class")
    p.add_argument("--annotations-dir", required=True, help="directory of VOC XML files")
    p.add_argument("--class-name", required=True)
    p.add_argument("--out", required=True, help="dataset JSON to write")
    p.set_defaults(func=cmd_import_voc)

    p = sub.add_parser("synth", help="generate a synthetic gt dataset")
    p.add_argument("--images", type=int, default=420)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--boxes-min", type=int, default=1)
    p.add_argument("--boxes-max", type=int, default=4)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("report", help="emit summary / A-N-B tables from report files")
    p.add_argument("--reports", nargs="*", default=[], help="RunReport JSON files")
    p.add_argument("--names", nargs="*", default=None, help="row names (default: file stems)")
    p.add_argument("--ab", help="CSV of name,A,N,B rows for the final-AP table")
    p.add_argument("--format", choices=("md", "csv"), default="md")
    p.add_argument("--advantage-out", help="write the advantage-curve CSV here")
    p.add_argument("--box-filter-window", type=int, default=DEFAULT_BOX_FILTER_WINDOW)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="run the annotation HTTP service")
    p.add_argument("--images-dir", default=_env("images_dir"))
    p.add_argument("--dataset", default=_env("dataset"), help="dataset JSON (enables demo detectors)")
    p.add_argument("--annotations", default=_env("annotations"), help="annotation file to persist to")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--strategy", choices=STRATEGIES, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--detector", choices=("none",) + DETECTOR_KINDS, default=None)
    p.add_argument("--worker-url", default=None, help="external trainer worker base URL")
    p.set_defaults(func=cmd_serve)

    return parser


def _pick(flag_value, env_name: str, default, cast=None):
    if flag_value is not None:
        return flag_value
    raw = _env(env_name)
    if raw is None:
        return default
    return cast(raw) if cast else raw


def cmd_simulate(args) -> int:
    records = load_dataset_file(args.dataset)
    cost = CostModelConfig(
        include_navigation_in_unassisted=not args.no_navigation_baseline
    )
    config = SimulationConfig(
        rate=_pick(args.rate, "rate", 1.0, float),
        training_speed=_pick(args.training_speed, "training_speed", 0.1, float),
        batch_size=_pick(args.batch_size, "batch_size", 8, int),
        cadence=_pick(args.cadence, "cadence", "wall_clock"),
        detector=_pick(args.detector, "detector", "learning"),
        detector_config=SyntheticDetectorConfig(),
        cost=cost,
        strategy=_pick(args.strategy, "strategy", "random"),
        seed=_pick(args.seed, "seed", 0, int),
        iou_threshold=_pick(args.iou_threshold, "iou_threshold", 0.5, float),
    )
    try:
        report = simulate(records, config)
    except MissingGroundTruthError as exc:
        print(
            f"error: {exc}\nimport ground truth first, e.g. "
            "`iadet import-voc --annotations-dir ... --class-name ... --out dataset.json`",
            file=sys.stderr,
        )
        return 2

    out = Path(args.out_dir)
    atomic_write_text(out / "report.json", report.to_json())
    atomic_write_text(out / "timeline.csv", report.to_csv())
    events_jsonl = "".join(json.dumps(e, ensure_ascii=False) + "\n" for e in report.events)
    atomic_write_text(out / "events.jsonl", events_jsonl)
    baseline = unassisted_schedule(records, [r.image_id for r in report.rows], config)
    curve = advantage_curve(report, baseline)
    atomic_write_text(out / "advantage.csv", format_curve_csv(curve))
    print(
        f"t_A={report.t_assisted:.1f}s t_N={report.t_unassisted:.1f}s "
        f"ratio={report.ratio:.3f} improvement={report.improvement_percent:.1f}%"
    )
    print(f"wrote report.json, timeline.csv, events.jsonl, advantage.csv in {out}")
    return 0


def cmd_import_voc(args) -> int:
    ann_dir = Path(args.annotations_dir)
    if not ann_dir.is_dir():
        print(f"error: not a directory: {ann_dir}", file=sys.stderr)
        return 2
    records, errors = parse_voc_directory(ann_dir, args.class_name)
    for path, err in errors:
        print(f"warning: skipped {path}: {err}", file=sys.stderr)
    if not records:
        classes = list_voc_classes(ann_dir)
        if classes and args.class_name not in classes:
            print(
                f"error: no objects of class {args.class_name!r}; "
                f"available classes: {', '.join(classes)}",
                file=sys.stderr,
            )
            return 2
        print(f"warning: 0 images with class {args.class_name!r}", file=sys.stderr)
    save_dataset_file(args.out, records)
    total_boxes = sum(len(r.gt_boxes or ()) for r in records)
    print(f"class {args.class_name}: {len(records)} images, {total_boxes} boxes -> {args.out}")
    return 0


def cmd_synth(args) -> int:
    records = make_synthetic_records(
        args.images, seed=args.seed, boxes_min=args.boxes_min, boxes_max=args.boxes_max
    )
    save_dataset_file(args.out, records)
    total_boxes = sum(len(r.gt_boxes or ()) for r in records)
    print(f"synthetic dataset: {len(records)} images, {total_boxes} boxes -> {args.out}")
    return 0


def cmd_report(args) -> int:
    emitted = False
    if args.reports:
        rows = []
        names = args.names or [Path(p).stem for p in args.reports]
        if len(names) != len(args.reports):
            print("error: --names must match --reports", file=sys.stderr)
            return 2
        reports = []
        for name, path in zip(names, args.reports):
            try:
                payload = json.loads(Path(path).read_text(encoding="utf-8"))
                report = report_from_payload(payload)
            except (OSError, ValueError, KeyError, TypeError) as exc:
                print(f"error: unreadable report {path}: {exc}", file=sys.stderr)
                continue
            reports.append(report)
            rows.append(
                summary_row_from_values(
                    name, len(report.rows), report.t_assisted, report.t_unassisted
                )
            )
        if not rows:
            print("error: no readable reports", file=sys.stderr)
            return 2
        table = append_mean(rows)
        print(format_summary_markdown(table) if args.format == "md" else format_summary_csv(table))
        emitted = True

        if args.advantage_out:
            from .reporting import box_filter_mean
            from .simulator import baseline_schedule_from_report

            curves = []
            for report in reports:
                curve = advantage_curve(report, baseline_schedule_from_report(report))
                curves.append([v for _, v in curve])
            # normalized grid: every curve samples 201 points over its own run
            grid = [i / (len(curves[0]) - 1) for i in range(len(curves[0]))]
            mean_curve = box_filter_mean(curves, args.box_filter_window)
            atomic_write_text(
                Path(args.advantage_out), format_curve_csv(list(zip(grid, mean_curve)))
            )
            print(f"wrote {args.advantage_out} (box filter window {args.box_filter_window})")

    if args.ab:
        entries = []
        for line in Path(args.ab).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line or line.startswith("name"):
                continue
            name, a, n, b = line.split(",")
            entries.append((name, float(a), float(n), float(b)))
        rows = ab_table(entries)
        print(format_ab_markdown(rows) if args.format == "md" else format_ab_csv(rows))
        emitted = True

    if not emitted:
        print("error: nothing to report; pass --reports and/or --ab", file=sys.stderr)
        return 2
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import build_service, create_app

    service = build_service(
        images_dir=args.images_dir,
        dataset_file=args.dataset,
        annotations_path=args.annotations,
        strategy=_pick(args.strategy, "strategy", "sequential"),
        seed=_pick(args.seed, "seed", 0, int),
        detector=_pick(args.detector, "detector", "none"),
        worker_url=_pick(args.worker_url, "worker_url", None),
    )
    app = create_app(service)
    host = _pick(args.host, "host", "127.0.0.1")
    port = _pick(args.port, "port", 8000, int)
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return 0


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except IadetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
