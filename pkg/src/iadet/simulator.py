"""Robot-annotator simulation: a simulated user annotates from ground truth
at R interactions per second while the background model trains, producing
assisted/unassisted time totals and advantage timelines.

Virtual-clock runs are fully deterministic: the same config and seed give
byte-identical serialized reports.
"""
from __future__ import annotations

import bisect
import io
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

from .cost_model import (
    AnnotatorRate,
    CostModelConfig,
    assisted_interactions,
    unassisted_interactions,
)
from .detectors import ModelVersion, SyntheticDetectorConfig, make_detector
from .errors import MissingGroundTruthError
from .geometry import match_detections
from .jsonio import canonical_dumps
from .metrics import EvalSample, average_precision
from .orchestrator import Orchestrator, RealClock, TrainerConfig, VirtualClock
from .selection import SelectionState
from .store import AnnotationStore, ImageRecord


@dataclass(frozen=True)
class SimulationConfig:
    """Everything a run depends on: R, v, b, detector, strategy, seed."""

    rate: float = 1.0  # annotator speed R, interactions/s
    training_speed: float = 0.1  # trainer throughput v, images/s
    batch_size: int = 8  # trainer batch size b
    cadence: str = "wall_clock"  # trainer cadence; see TrainerConfig
    detector: str = "learning"
    detector_config: SyntheticDetectorConfig = field(default_factory=SyntheticDetectorConfig)
    cost: CostModelConfig = field(default_factory=CostModelConfig)
    strategy: str = "random"
    seed: int = 0
    iou_threshold: float = 0.5
    clock: str = "virtual"  # "virtual" | "real"

    def __post_init__(self) -> None:
        if self.rate <= 0:
            raise ValueError("rate must be positive")
        if not (0.0 < self.iou_threshold <= 1.0):
            raise ValueError("iou_threshold must be in (0, 1]")
        if self.clock not in ("virtual", "real"):
            raise ValueError(f"unknown clock mode {self.clock!r}")

    def effective_detector_config(self) -> SyntheticDetectorConfig:
        # one seed rules the whole run: selection and detector streams
        return replace(self.detector_config, seed=self.seed)


@dataclass(frozen=True)
class ImageRow:
    image_id: str
    t_open: float
    tp: int
    fp: int
    fn: int
    interactions: int
    model_version: int


@dataclass(frozen=True)
class RunReport:
    """Outcome of one simulated annotation run plus its audit trail."""

    run_label: str
    config: dict
    rows: tuple[ImageRow, ...]
    total_interactions: int
    unassisted_total_interactions: int
    t_assisted: float
    t_unassisted: float
    ratio: float
    improvement_percent: float
    timeline: tuple[tuple[float, int], ...]  # (completion time, images done)
    versions: tuple[ModelVersion, ...]
    events: tuple[dict, ...]

    def to_payload(self) -> dict:
        return {
            "run_label": self.run_label,
            "config": self.config,
            "totals": {
                "total_interactions": self.total_interactions,
                "unassisted_total_interactions": self.unassisted_total_interactions,
                "t_assisted": self.t_assisted,
                "t_unassisted": self.t_unassisted,
                "ratio": self.ratio,
                "improvement_percent": self.improvement_percent,
            },
            "rows": [asdict(r) for r in self.rows],
            "timeline": [[t, k] for t, k in self.timeline],
            "versions": [asdict(v) for v in self.versions],
            "events": list(self.events),
        }

    def to_json(self) -> str:
        return canonical_dumps(self.to_payload())

    def to_csv(self) -> str:
        """Flat timeline: one row per annotated image, chronological."""
        out = io.StringIO()
        out.write("t,image_id,tp,fp,fn,I_i,model_version,k_A\n")
        cum = 0
        rate = self.config["rate"]
        for k, row in enumerate(self.rows, start=1):
            cum += row.interactions
            out.write(
                f"{cum / rate},{row.image_id},{row.tp},{row.fp},{row.fn},"
                f"{row.interactions},{row.model_version},{k}\n"
            )
        return out.getvalue()


def report_from_payload(payload: dict) -> RunReport:
    rows = tuple(ImageRow(**r) for r in payload["rows"])
    versions = tuple(ModelVersion(**v) for v in payload["versions"])
    totals = payload["totals"]
    return RunReport(
        run_label=payload["run_label"],
        config=payload["config"],
        rows=rows,
        total_interactions=totals["total_interactions"],
        unassisted_total_interactions=totals["unassisted_total_interactions"],
        t_assisted=totals["t_assisted"],
        t_unassisted=totals["t_unassisted"],
        ratio=totals["ratio"],
        improvement_percent=totals["improvement_percent"],
        timeline=tuple((t, k) for t, k in payload["timeline"]),
        versions=versions,
        events=tuple(payload["events"]),
    )


def _config_echo(config: SimulationConfig) -> dict:
    echo = asdict(config)
    echo["detector_config"] = asdict(config.effective_detector_config())
    return echo


def simulate(records: Sequence[ImageRecord], config: SimulationConfig) -> RunReport:
    """Run the full assisted-annotation loop with a robot annotator.

    Per image: select, fetch a prediction from the latest model version,
    match it against gt at the configured IoU threshold, pay the assisted
    interaction cost, commit the gt verbatim (the robot annotates
    perfectly), and let the trainer advance on its cadence.
    """
    missing = [r.id for r in records if r.gt_boxes is None]
    if missing:
        raise MissingGroundTruthError(
            f"{len(missing)} image(s) lack gt boxes, e.g. {missing[0]}"
        )

    store = AnnotationStore()
    store.add_records(list(records))
    selection = SelectionState(store.ids(), strategy=config.strategy, seed=config.seed)
    detector = make_detector(config.detector, config.effective_detector_config())
    trainer = TrainerConfig(
        images_per_second=config.training_speed,
        batch_size=config.batch_size,
        cadence=config.cadence,
    )
    clock = VirtualClock() if config.clock == "virtual" else RealClock()
    orch = Orchestrator(store, selection, detector, trainer, clock)

    rows: list[ImageRow] = []

    def robot(record: ImageRecord, prediction) -> tuple[tuple, int]:
        result = match_detections(
            prediction.kept_boxes, record.gt_boxes, config.iou_threshold
        )
        cost = assisted_interactions(result.tp, result.fp, result.fn, config.cost)
        rows.append(
            ImageRow(
                image_id=record.id,
                t_open=orch.clock.now(),
                tp=result.tp,
                fp=result.fp,
                fn=result.fn,
                interactions=cost,
                model_version=prediction.model_version,
            )
        )
        return record.gt_boxes, cost

    orch.run_loop(robot, rate_per_second=config.rate)

    total = sum(r.interactions for r in rows)
    unassisted_total = sum(
        unassisted_interactions(len(r.gt_boxes), config.cost) for r in records
    )
    t_assisted = total / config.rate
    t_unassisted = unassisted_total / config.rate
    ratio = total / unassisted_total if unassisted_total else float("inf")

    timeline = []
    cum = 0
    for k, row in enumerate(rows, start=1):
        cum += row.interactions
        timeline.append((cum / config.rate, k))

    return RunReport(
        run_label="A",
        config=_config_echo(config),
        rows=tuple(rows),
        total_interactions=total,
        unassisted_total_interactions=unassisted_total,
        t_assisted=t_assisted,
        t_unassisted=t_unassisted,
        ratio=ratio,
        improvement_percent=(1.0 - ratio) * 100.0,
        timeline=tuple(timeline),
        versions=tuple(orch.registry.history),
        events=tuple(orch.log.events),
    )


def unassisted_baseline(records: Sequence[ImageRecord], config: SimulationConfig) -> float:
    """Total unassisted annotation time t_N = I / R."""
    missing = [r.id for r in records if r.gt_boxes is None]
    if missing:
        raise MissingGroundTruthError(f"{len(missing)} image(s) lack gt boxes")
    total = sum(unassisted_interactions(len(r.gt_boxes), config.cost) for r in records)
    return total / config.rate


def unassisted_schedule(
    records: Sequence[ImageRecord], order: Sequence[str], config: SimulationConfig
) -> list[float]:
    """Completion time of each image under the unassisted robot, in visit order."""
    by_id = {r.id: r for r in records}
    times = []
    cum = 0
    for image_id in order:
        cum += unassisted_interactions(len(by_id[image_id].gt_boxes), config.cost)
        times.append(cum / config.rate)
    return times


def baseline_schedule_from_report(report: RunReport) -> list[float]:
    """Rebuild the unassisted schedule from a report's own rows.

    Each row's gt count is tp + fn; the echoed cost config supplies the
    interaction constants, so no dataset file is needed.
    """
    cost = CostModelConfig(**report.config["cost"])
    rate = report.config["rate"]
    times = []
    cum = 0
    for row in report.rows:
        cum += unassisted_interactions(row.tp + row.fn, cost)
        times.append(cum / rate)
    return times


def advantage_curve(
    report: RunReport, baseline_times: Sequence[float], grid_points: int = 201
) -> list[tuple[float, float]]:
    """Ratio of images annotated by time t with vs without assistance.

    Sampled on a uniform grid over [0, max(t_A, t_N)]. Before either robot
    finishes its first image the ratio is defined as 1; while only the
    baseline is at zero the assisted count is compared against 1.
    """
    done_assisted = [t for t, _ in report.timeline]
    done_baseline = list(baseline_times)
    t_max = max(
        done_assisted[-1] if done_assisted else 0.0,
        done_baseline[-1] if done_baseline else 0.0,
    )
    curve = []
    for i in range(grid_points):
        t = t_max * i / (grid_points - 1) if grid_points > 1 else 0.0
        ka = bisect.bisect_right(done_assisted, t)
        kn = bisect.bisect_right(done_baseline, t)
        if ka == 0 and kn == 0:
            ratio = 1.0
        else:
            ratio = ka / max(kn, 1)
        curve.append((t, ratio))
    return curve


def advantage_at(report: RunReport, baseline_times: Sequence[float], t: float) -> float:
    """Point evaluation of the advantage ratio at time t."""
    done_assisted = [tt for tt, _ in report.timeline]
    ka = bisect.bisect_right(done_assisted, t)
    kn = bisect.bisect_right(list(baseline_times), t)
    if ka == 0 and kn == 0:
        return 1.0
    return ka / max(kn, 1)


def ap_over_time(
    report: RunReport,
    eval_records: Sequence[ImageRecord],
    checkpoints: Sequence[float],
    config: SimulationConfig,
) -> list[tuple[float, float]]:
    """Evaluate the model version current at each checkpoint on a held-out split."""
    if not eval_records:
        raise ValueError("evaluation split is empty")
    train_ids = {row.image_id for row in report.rows}
    overlap = train_ids & {r.id for r in eval_records}
    if overlap:
        raise ValueError(f"evaluation split overlaps training images: {sorted(overlap)[:3]}")
    missing = [r.id for r in eval_records if r.gt_boxes is None]
    if missing:
        raise MissingGroundTruthError(f"evaluation images lack gt boxes: {missing[:3]}")

    detector = make_detector(config.detector, config.effective_detector_config())
    versions = sorted(report.versions, key=lambda v: (v.created_at, v.version))
    series = []
    for t in checkpoints:
        current = versions[0]
        for v in versions:
            if v.created_at <= t:
                current = v
            else:
                break
        samples = [
            EvalSample(
                image_id=r.id,
                predictions=detector.predict(r, current).kept_boxes,
                ground_truths=r.gt_boxes,
            )
            for r in eval_records
        ]
        series.append((t, average_precision(samples, config.iou_threshold)))
    return series
