"""HTTP service exposing the annotation loop to the UI and trainer workers.

Mutations funnel through the store's single-writer contract; handlers are
otherwise stateless. Model updates are polled (GET /status), matching the
tool's load-latest-weights behavior. Ground-truth boxes are simulation-only
and never appear in any response.
"""
from __future__ import annotations

import threading
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse
from pydantic import BaseModel, Field

from .detectors import ExternalDetectorClient, ModelVersion, Prediction, make_detector
from .errors import AnnotationCompleteError, StaleVersionError, UnknownImageError
from .geometry import Box
from .orchestrator import RealClock, VersionRegistry
from .selection import SelectionState
from .store import AnnotationStore


class BoxesPayload(BaseModel):
    boxes: list[list[float]] = Field(default_factory=list)


class PublishPayload(BaseModel):
    version: int
    epochs: int | None = None
    last_loss: float | None = None
    source: Literal["external", "builtin"] = "external"


def _box_entry(box: Box, score: float | None) -> dict:
    return {
        "x_min": box.x_min,
        "y_min": box.y_min,
        "x_max": box.x_max,
        "y_max": box.y_max,
        "score": score,
    }


class AnnotationService:
    """Wires the store, selection, registry, and a prediction source."""

    def __init__(
        self,
        store: AnnotationStore,
        selection: SelectionState,
        detector=None,
        images_root: str | Path | None = None,
        train_on_put: bool = True,
    ):
        self.store = store
        self.selection = selection
        self.detector = detector
        self.images_root = Path(images_root) if images_root else None
        self.train_on_put = train_on_put
        self.registry = VersionRegistry()
        self.clock = RealClock()
        self._tick_lock = threading.Lock()
        # resuming a session: selection must skip already-labeled images
        for record in store.records():
            if record.labeled:
                self.selection.mark_labeled(record.id)

    def predict(self, record) -> Prediction:
        version = self.registry.current
        if self.detector is None:
            return Prediction(
                image_id=record.id,
                model_version=version.version,
                raw_boxes=(),
                kept_boxes=(),
                degraded=True,
            )
        try:
            return self.detector.predict(record, version)
        except Exception:
            return Prediction(
                image_id=record.id,
                model_version=version.version,
                raw_boxes=(),
                kept_boxes=(),
                degraded=True,
            )

    def tick_builtin_trainer(self) -> None:
        """Publish a fresh built-in version covering the latest snapshot."""
        if self.detector is None or isinstance(self.detector, ExternalDetectorClient):
            return
        with self._tick_lock:
            snap = self.store.snapshot()
            if not snap.records:
                return
            current = self.registry.current
            self.registry.publish(
                ModelVersion(
                    version=current.version + 1,
                    created_at=self.clock.now(),
                    source="builtin",
                    labeled_count=len(snap.records),
                    snapshot_version=snap.snapshot_version,
                )
            )


def create_app(service: AnnotationService) -> FastAPI:
    app = FastAPI(title="iadet", version="0.1.0")
    # the browser frontend may be served from another origin (dev setup)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = service.store

    def _get_record(image_id: str):
        try:
            return store.get(image_id)
        except UnknownImageError:
            raise HTTPException(404, detail={"error": "not_found", "image_id": image_id})

    @app.get("/images")
    def list_images():
        return [
            {
                "id": r.id,
                "path": r.path,
                "width": r.width,
                "height": r.height,
                "labeled": r.labeled,
                "labeled_at": r.labeled_at,
            }
            for r in store.records()
        ]

    @app.get("/images/{image_id:path}/file")
    def image_file(image_id: str):
        record = _get_record(image_id)
        if service.images_root is None:
            raise HTTPException(404, detail={"error": "no_image_root"})
        path = service.images_root / record.path
        if not path.is_file():
            raise HTTPException(404, detail={"error": "file_missing", "path": record.path})
        return FileResponse(path)

    @app.get("/images/{image_id:path}/predictions")
    def predictions(image_id: str):
        record = _get_record(image_id)
        if record.labeled:
            # the user's own annotations always take precedence over the model
            return {
                "image_id": record.id,
                "precedence": "user",
                "model_version": service.registry.current.version,
                "degraded": False,
                "boxes": [_box_entry(b, None) for b in record.user_boxes],
            }
        pred = service.predict(record)
        return {
            "image_id": record.id,
            "precedence": "prediction",
            "model_version": pred.model_version,
            "degraded": pred.degraded,
            "boxes": [_box_entry(sb.box, sb.score) for sb in pred.kept_boxes],
        }

    @app.get("/images/{image_id:path}/annotations")
    def get_annotations(image_id: str):
        record = _get_record(image_id)
        return {
            "image_id": record.id,
            "labeled": record.labeled,
            "labeled_at": record.labeled_at,
            "boxes": [b.as_list() for b in record.user_boxes],
        }

    @app.put("/images/{image_id:path}/annotations")
    def put_annotations(image_id: str, payload: BoxesPayload):
        record = _get_record(image_id)
        try:
            boxes = tuple(Box.from_sequence(b) for b in payload.boxes)
        except ValueError as exc:
            raise HTTPException(400, detail={"error": "invalid_box", "message": str(exc)})
        version = store.put_annotations(image_id, boxes, timestamp=service.clock.now())
        if not record.labeled:
            service.selection.mark_labeled(image_id)
        if service.train_on_put:
            service.tick_builtin_trainer()
        return {"image_id": image_id, "snapshot_version": version}

    @app.get("/status")
    def status():
        current = service.registry.current
        return {
            "model_version": current.version,
            "source": current.source,
            "epochs": current.epochs,
            "last_loss": current.last_loss,
            "labeled": store.labeled_count,
            "total": store.total_count,
            "strategy": service.selection.strategy,
            "elapsed_seconds": service.clock.now(),
        }

    @app.get("/snapshot")
    def snapshot():
        return store.snapshot().to_payload()

    @app.post("/model-versions")
    def publish(payload: PublishPayload):
        version = ModelVersion(
            version=payload.version,
            created_at=service.clock.now(),
            source=payload.source,
            labeled_count=store.labeled_count,
            epochs=payload.epochs,
            last_loss=payload.last_loss,
        )
        try:
            service.registry.publish(version)
        except StaleVersionError as exc:
            raise HTTPException(409, detail={"error": "stale_version", "message": str(exc)})
        return {"accepted": True, "latest": version.version}

    @app.get("/next")
    def next_image():
        try:
            return {"image_id": service.selection.next_image()}
        except AnnotationCompleteError:
            raise HTTPException(409, detail={"error": "annotation_complete"})

    return app


def build_service(
    images_dir: str | Path | None = None,
    dataset_file: str | Path | None = None,
    annotations_path: str | Path | None = None,
    strategy: str = "sequential",
    seed: int = 0,
    detector: str = "none",
    worker_url: str | None = None,
) -> AnnotationService:
    """Assemble a service from CLI-level configuration."""
    from .store import load_dataset_file, scan_dataset

    store = AnnotationStore(annotations_path)
    known = set(store.ids())
    records = []
    if dataset_file:
        records = load_dataset_file(dataset_file)
    elif images_dir:
        records = scan_dataset(images_dir)
    store.add_records([r for r in records if r.id not in known])
    if dataset_file:
        # resumed sessions reload without gt; re-attach it for demo detectors
        store.attach_ground_truth(
            {r.id: r.gt_boxes for r in records if r.gt_boxes is not None and r.id in known}
        )

    selection = SelectionState(store.ids(), strategy=strategy, seed=seed)

    detector_impl = None
    if worker_url:
        detector_impl = ExternalDetectorClient(worker_url)
    elif detector != "none":
        detector_impl = make_detector(detector)

    return AnnotationService(
        store,
        selection,
        detector=detector_impl,
        images_root=Path(images_dir) if images_dir else None,
    )
