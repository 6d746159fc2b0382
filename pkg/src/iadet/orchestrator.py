"""The annotate-while-training loop: selection, prediction fetch, commit,
trainer scheduling, and model-version publication.

One control loop owns selection and store mutation. Trainer progress is
communicated through immutable snapshots and an atomic latest-version
pointer, so readers see either the old or the new version, never a mix.
"""
from __future__ import annotations

import bisect
import enum
import json
import logging
import math
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .detectors import INITIAL_VERSION, ModelVersion, Prediction
from .errors import StaleVersionError
from .jsonio import atomic_write_text
from .selection import SelectionState
from .store import AnnotationSnapshot, AnnotationStore

logger = logging.getLogger(__name__)


class RunLabel(str, enum.Enum):
    """Training schedule variants compared in evaluation runs."""

    DURING_ANNOTATION = "A"
    AFTER_UNASSISTED = "N"
    AFTER_ASSISTED = "M"
    AFTER_ASSISTED_BOOTSTRAPPED = "B"


class VirtualClock:
    """Discrete-event clock: time moves only when the loop advances it."""

    def __init__(self) -> None:
        self._now = 0.0

    def now(self) -> float:
        return self._now

    def advance(self, dt: float) -> float:
        if dt < 0:
            raise ValueError("cannot advance a clock backwards")
        self._now += dt
        return self._now


class RealClock:
    """Wall-clock time since construction; advance() actually waits."""

    def __init__(self) -> None:
        self._start = time.monotonic()

    def now(self) -> float:
        return time.monotonic() - self._start

    def advance(self, dt: float) -> float:
        time.sleep(dt)
        return self.now()


class EventLog:
    """Append-only, totally ordered record of annotate/tick/publish events."""

    def __init__(self) -> None:
        self.events: list[dict] = []

    def append(self, t: float, kind: str, **extra) -> None:
        event = {"t": t, "kind": kind}
        event.update({k: v for k, v in extra.items() if v is not None})
        self.events.append(event)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e, ensure_ascii=False) + "\n" for e in self.events)

    def write(self, path: str | Path) -> None:
        atomic_write_text(Path(path), self.to_jsonl())


class VersionRegistry:
    """Holds the published model versions; the latest pointer swaps atomically."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._versions: list[ModelVersion] = [INITIAL_VERSION]

    @property
    def current(self) -> ModelVersion:
        with self._lock:
            return self._versions[-1]

    @property
    def history(self) -> list[ModelVersion]:
        with self._lock:
            return list(self._versions)

    def publish(self, version: ModelVersion) -> ModelVersion:
        with self._lock:
            if version.version <= self._versions[-1].version:
                raise StaleVersionError(
                    f"version {version.version} is not newer than "
                    f"{self._versions[-1].version}"
                )
            self._versions.append(version)
            return version

    def version_at(self, t: float) -> ModelVersion:
        """Latest version published at or before time t."""
        with self._lock:
            chosen = self._versions[0]
            for v in self._versions:
                if v.created_at <= t:
                    chosen = v
                else:
                    break
            return chosen


@dataclass(frozen=True)
class TrainerConfig:
    """Cadence of the background trainer.

    wall_clock: epochs take max(min_epoch_seconds, ceil(k / batch) * batch
    / images_per_second) simulated seconds over k labeled images, and a new
    version appears when the epoch ends. per_annotation: a new version is
    published immediately after every commit (quality then depends only on
    labeled count, never on the clock).
    """

    images_per_second: float = 1.0
    batch_size: int = 8
    cadence: str = "wall_clock"  # or "per_annotation"
    min_epoch_seconds: float = 1.0

    def __post_init__(self) -> None:
        if self.images_per_second <= 0 or self.batch_size <= 0:
            raise ValueError("training speed and batch size must be positive")
        if self.cadence not in ("wall_clock", "per_annotation"):
            raise ValueError(f"unknown cadence {self.cadence!r}")

    def epoch_duration(self, labeled_count: int) -> float:
        steps = math.ceil(labeled_count / self.batch_size)
        return max(self.min_epoch_seconds, steps * self.batch_size / self.images_per_second)


class Orchestrator:
    """Wires store, selection, detector, trainer cadence, and the event log."""

    def __init__(
        self,
        store: AnnotationStore,
        selection: SelectionState,
        detector,
        trainer: TrainerConfig | None = None,
        clock=None,
        run_label: RunLabel = RunLabel.DURING_ANNOTATION,
    ):
        self.store = store
        self.selection = selection
        self.detector = detector
        self.trainer = trainer or TrainerConfig()
        self.clock = clock or VirtualClock()
        self.run_label = run_label
        self.registry = VersionRegistry()
        self.log = EventLog()
        # commit history lets the wall-clock trainer reconstruct how many
        # images were labeled at any past instant
        self._commit_times: list[float] = []
        self._commit_versions: list[int] = []
        # wall-clock epoch pipeline state
        self._epoch_end: float | None = None
        self._epoch_labeled = 0
        self._epoch_snapshot_version = 0

    # -- trainer ------------------------------------------------------------

    def labeled_count_at(self, t: float) -> int:
        return bisect.bisect_right(self._commit_times, t)

    def snapshot_version_at(self, t: float) -> int:
        k = self.labeled_count_at(t)
        return self._commit_versions[k - 1] if k else 0

    def trainer_tick(self, snapshot: AnnotationSnapshot) -> ModelVersion:
        """Publish a new built-in version trained on the given snapshot."""
        if not snapshot.records:
            raise ValueError("cannot train on an empty snapshot")
        now = self.clock.now()
        version = ModelVersion(
            version=self.registry.current.version + 1,
            created_at=now,
            source="builtin",
            labeled_count=len(snapshot.records),
            snapshot_version=snapshot.snapshot_version,
        )
        self.log.append(now, "tick", model_version=version.version)
        return self.publish_model(version)

    def publish_model(self, version: ModelVersion) -> ModelVersion:
        published = self.registry.publish(version)
        self.log.append(version.created_at, "publish", model_version=version.version)
        return published

    def _start_epoch(self, t: float) -> None:
        k = self.labeled_count_at(t)
        if k < 1:
            self._epoch_end = None
            return
        self._epoch_labeled = k
        self._epoch_snapshot_version = self.snapshot_version_at(t)
        self._epoch_end = t + self.trainer.epoch_duration(k)
        self.log.append(t, "tick", model_version=self.registry.current.version + 1)

    def advance_trainer(self, now: float) -> None:
        """Publish every wall-clock epoch that has finished by `now`."""
        if self.trainer.cadence != "wall_clock":
            return
        while self._epoch_end is not None and self._epoch_end <= now:
            t_pub = self._epoch_end
            version = ModelVersion(
                version=self.registry.current.version + 1,
                created_at=t_pub,
                source="builtin",
                labeled_count=self._epoch_labeled,
                snapshot_version=self._epoch_snapshot_version,
            )
            self.publish_model(version)
            self._start_epoch(t_pub)

    def notify_commit(self) -> None:
        """Called after each annotation commit to keep the trainer fed."""
        now = self.clock.now()
        if self.trainer.cadence == "per_annotation":
            self.trainer_tick(self.store.snapshot())
        elif self._epoch_end is None:
            # trainer was idle (nothing labeled yet); start the first epoch
            self._start_epoch(now)

    # -- the loop -----------------------------------------------------------

    def predict(self, record, version: ModelVersion) -> Prediction:
        """Fetch a prediction, degrading to no assistance on detector failure."""
        try:
            return self.detector.predict(record, version)
        except Exception as exc:  # detector failure must not stop annotation
            logger.warning("detector failed on %s: %s", record.id, exc)
            return Prediction(
                image_id=record.id,
                model_version=version.version,
                raw_boxes=(),
                kept_boxes=(),
                degraded=True,
            )

    def commit(self, image_id: str, boxes, interactions: int, model_version: int) -> None:
        now = self.clock.now()
        snapshot_version = self.store.put_annotations(image_id, boxes, timestamp=now)
        self.selection.mark_labeled(image_id)
        self._commit_times.append(now)
        self._commit_versions.append(snapshot_version)
        self.log.append(
            now,
            "annotate",
            image_id=image_id,
            model_version=model_version,
            interactions=interactions,
        )
        self.notify_commit()

    def run_loop(
        self,
        annotate: Callable,
        rate_per_second: float,
        stop: Callable[[], bool] | None = None,
        max_images: int | None = None,
    ) -> None:
        """Drive annotation until the pool is empty or `stop` fires.

        `annotate(record, prediction)` returns (boxes, interactions); the
        clock advances by interactions / rate as one atomic block per image,
        matching a tool where predictions load once when an image opens.
        """
        done = 0
        while not self.selection.complete:
            if stop is not None and stop():
                self.log.append(self.clock.now(), "stop")
                return
            if max_images is not None and done >= max_images:
                return
            self.advance_trainer(self.clock.now())
            image_id = self.selection.next_image()
            record = self.store.get(image_id)
            version = self.registry.current
            prediction = self.predict(record, version)
            boxes, interactions = annotate(record, prediction)
            self.clock.advance(interactions / rate_per_second)
            # epochs that finished while the image was being annotated are
            # published now; the prediction above keeps its older version
            self.advance_trainer(self.clock.now())
            self.commit(image_id, boxes, interactions, prediction.model_version)
            done += 1
