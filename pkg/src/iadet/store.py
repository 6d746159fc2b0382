"""Persistent annotation state shared by the annotator, trainer, and reporter.

The store owns one mutation stream (UI or robot) and hands out immutable
snapshots to any number of readers. The on-disk annotation file is a single
JSON document: a top-level version plus, per image, path, dimensions, the
user's boxes as length-4 vectors, and labeling state. Ground-truth boxes
(simulation only) never enter that file and never leave through snapshots.
"""
from __future__ import annotations

import json
import logging
import threading
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field, replace
from pathlib import Path

from PIL import Image, UnidentifiedImageError

from .errors import UnknownImageError
from .geometry import Box
from .jsonio import atomic_write_text, canonical_dumps

logger = logging.getLogger(__name__)

IMAGE_EXTENSIONS = {".png", ".jpg", ".jpeg", ".bmp", ".gif", ".tif", ".tiff", ".webp"}

ANNOTATION_FILE_VERSION = 1
DATASET_FILE_VERSION = 1


@dataclass
class ImageRecord:
    """One dataset image: identity, size, user boxes, and labeling state."""

    id: str
    path: str
    width: int
    height: int
    user_boxes: tuple[Box, ...] = ()
    gt_boxes: tuple[Box, ...] | None = None
    labeled: bool = False
    labeled_at: float | None = None


def _clamped(boxes, width: float, height: float) -> tuple[Box, ...]:
    return tuple(b.clamp(width, height) for b in boxes)


@dataclass(frozen=True)
class AnnotationSnapshot:
    """Point-in-time view of all labeled records; immutable once issued."""

    snapshot_version: int
    records: tuple[ImageRecord, ...]
    created_at: float

    def to_payload(self) -> dict:
        """Annotation-file JSON (the trainer contract). Never includes gt."""
        return {
            "version": self.snapshot_version,
            "images": [
                {
                    "path": r.path,
                    "width": r.width,
                    "height": r.height,
                    "boxes": [b.as_list() for b in r.user_boxes],
                    "labeled": r.labeled,
                    "labeled_at": r.labeled_at,
                }
                for r in self.records
            ],
        }


class AnnotationStore:
    """Single-writer, multi-reader store of per-image annotation state.

    When constructed with a path, every completed mutation is persisted
    there atomically before the call returns, so a reload after any put
    reproduces the same snapshot.
    """

    def __init__(self, annotation_path: str | Path | None = None):
        self._lock = threading.RLock()
        self._records: dict[str, ImageRecord] = {}
        self._version = 0
        self._path = Path(annotation_path) if annotation_path else None
        if self._path and self._path.exists():
            self._load()

    # -- dataset ingestion ------------------------------------------------

    def add_records(self, records: list[ImageRecord]) -> None:
        with self._lock:
            for r in records:
                if r.id in self._records:
                    raise ValueError(f"duplicate image id: {r.id}")
                boxes = _clamped(r.user_boxes, r.width, r.height)
                gt = _clamped(r.gt_boxes, r.width, r.height) if r.gt_boxes is not None else None
                self._records[r.id] = replace(r, user_boxes=boxes, gt_boxes=gt)

    # -- core operations ---------------------------------------------------

    def ids(self) -> list[str]:
        with self._lock:
            return sorted(self._records)

    def get(self, image_id: str) -> ImageRecord:
        with self._lock:
            try:
                r = self._records[image_id]
            except KeyError:
                raise UnknownImageError(image_id) from None
            return replace(r)

    def records(self) -> list[ImageRecord]:
        with self._lock:
            return [replace(self._records[i]) for i in sorted(self._records)]

    @property
    def labeled_count(self) -> int:
        with self._lock:
            return sum(1 for r in self._records.values() if r.labeled)

    @property
    def total_count(self) -> int:
        with self._lock:
            return len(self._records)

    @property
    def version(self) -> int:
        with self._lock:
            return self._version

    def put_annotations(self, image_id: str, boxes, timestamp: float) -> int:
        """Replace an image's boxes, mark it labeled, persist, return the new version."""
        with self._lock:
            if image_id not in self._records:
                raise UnknownImageError(image_id)
            r = self._records[image_id]
            updated = replace(
                r,
                user_boxes=_clamped(boxes, r.width, r.height),
                labeled=True,
                labeled_at=timestamp,
            )
            self._records[image_id] = updated
            self._version += 1
            self._persist()
            return self._version

    def snapshot(self) -> AnnotationSnapshot:
        with self._lock:
            labeled = tuple(
                replace(self._records[i], gt_boxes=None)
                for i in sorted(self._records)
                if self._records[i].labeled
            )
            created = max((r.labeled_at or 0.0 for r in labeled), default=0.0)
            return AnnotationSnapshot(
                snapshot_version=self._version, records=labeled, created_at=created
            )

    # -- persistence -------------------------------------------------------

    def _annotation_payload(self) -> dict:
        return {
            "version": self._version,
            "images": [
                {
                    "path": r.path,
                    "width": r.width,
                    "height": r.height,
                    "boxes": [b.as_list() for b in r.user_boxes],
                    "labeled": r.labeled,
                    "labeled_at": r.labeled_at,
                }
                for r in (self._records[i] for i in sorted(self._records))
            ],
        }

    def _persist(self) -> None:
        if self._path is None:
            return
        atomic_write_text(self._path, canonical_dumps(self._annotation_payload()))

    def _load(self) -> None:
        payload = json.loads(self._path.read_text(encoding="utf-8"))
        self._version = int(payload["version"])
        for entry in payload["images"]:
            boxes = tuple(Box.from_sequence(b) for b in entry["boxes"])
            rec = ImageRecord(
                id=entry["path"],
                path=entry["path"],
                width=int(entry["width"]),
                height=int(entry["height"]),
                user_boxes=boxes,
                labeled=bool(entry["labeled"]),
                labeled_at=entry["labeled_at"],
            )
            self._records[rec.id] = rec

    def attach_ground_truth(self, gt_by_id: dict[str, tuple[Box, ...]]) -> None:
        """Attach simulation-only gt boxes to existing records."""
        with self._lock:
            for image_id, boxes in gt_by_id.items():
                if image_id not in self._records:
                    raise UnknownImageError(image_id)
                r = self._records[image_id]
                self._records[image_id] = replace(
                    r, gt_boxes=_clamped(boxes, r.width, r.height)
                )

    def import_voc_ground_truth(self, annotation_dir: str | Path, class_name: str) -> int:
        """Ingest VOC XML ground truth for one class; returns images kept."""
        records, errors = parse_voc_directory(annotation_dir, class_name)
        for path, err in errors:
            logger.warning("skipping malformed VOC file %s: %s", path, err)
        self.add_records(records)
        return len(records)


# -- filesystem scan -------------------------------------------------------


def scan_dataset(directory: str | Path) -> list[ImageRecord]:
    """One record per readable image under `directory`, lexicographic order."""
    root = Path(directory)
    if not root.is_dir():
        raise IOError(f"not a readable directory: {directory}")
    records = []
    paths = sorted(
        p for p in root.rglob("*") if p.is_file() and p.suffix.lower() in IMAGE_EXTENSIONS
    )
    for p in paths:
        rel = p.relative_to(root).as_posix()
        try:
            with Image.open(p) as img:
                width, height = img.size
        except (UnidentifiedImageError, OSError) as exc:
            logger.warning("skipping unreadable image %s: %s", rel, exc)
            continue
        records.append(ImageRecord(id=rel, path=rel, width=width, height=height))
    return records


# -- VOC ground truth -------------------------------------------------------


def parse_voc_file(path: Path, class_name: str) -> tuple[str, int, int, list[Box]]:
    """Extract (filename, width, height, boxes-of-class) from one VOC XML."""
    root = ET.parse(path).getroot()
    filename = root.findtext("filename") or path.stem
    size = root.find("size")
    width = int(float(size.findtext("width")))
    height = int(float(size.findtext("height")))
    boxes = []
    for obj in root.iter("object"):
        if (obj.findtext("name") or "").strip() != class_name:
            continue
        bnd = obj.find("bndbox")
        boxes.append(
            Box(
                float(bnd.findtext("xmin")),
                float(bnd.findtext("ymin")),
                float(bnd.findtext("xmax")),
                float(bnd.findtext("ymax")),
            )
        )
    return filename, width, height, boxes


def parse_voc_directory(
    annotation_dir: str | Path, class_name: str
) -> tuple[list[ImageRecord], list[tuple[str, str]]]:
    """Parse every XML in a VOC annotation directory, filtered to one class.

    Images with zero instances of the class are excluded. Malformed files
    are collected as (path, error) and parsing continues.
    """
    ann_dir = Path(annotation_dir)
    records: list[ImageRecord] = []
    errors: list[tuple[str, str]] = []
    seen_ids: set[str] = set()
    for xml_path in sorted(ann_dir.rglob("*.xml")):
        try:
            filename, width, height, boxes = parse_voc_file(xml_path, class_name)
        except (ET.ParseError, AttributeError, TypeError, ValueError) as exc:
            errors.append((str(xml_path), str(exc)))
            continue
        if not boxes:
            continue
        # ids equal the image filename; VOC 2007/2012 filenames never collide,
        # but fall back to the xml's relative path if a duplicate shows up
        image_id = filename
        if image_id in seen_ids:
            image_id = xml_path.relative_to(ann_dir).as_posix()
        seen_ids.add(image_id)
        records.append(
            ImageRecord(
                id=image_id,
                path=filename,
                width=width,
                height=height,
                gt_boxes=tuple(b.clamp(width, height) for b in boxes),
            )
        )
    return records, errors


def list_voc_classes(annotation_dir: str | Path) -> list[str]:
    """All object class names appearing in a VOC annotation directory."""
    names: set[str] = set()
    for xml_path in Path(annotation_dir).rglob("*.xml"):
        try:
            root = ET.parse(xml_path).getroot()
        except ET.ParseError:
            continue
        for obj in root.iter("object"):
            name = (obj.findtext("name") or "").strip()
            if name:
                names.add(name)
    return sorted(names)


# -- dataset files (ground truth for simulation) ----------------------------


def save_dataset_file(path: str | Path, records: list[ImageRecord]) -> None:
    payload = {
        "version": DATASET_FILE_VERSION,
        "images": [
            {
                "id": r.id,
                "path": r.path,
                "width": r.width,
                "height": r.height,
                "gt_boxes": [b.as_list() for b in (r.gt_boxes or ())],
            }
            for r in sorted(records, key=lambda r: r.id)
        ],
    }
    atomic_write_text(Path(path), canonical_dumps(payload))


def load_dataset_file(path: str | Path) -> list[ImageRecord]:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    records = []
    for entry in payload["images"]:
        records.append(
            ImageRecord(
                id=entry["id"],
                path=entry["path"],
                width=int(entry["width"]),
                height=int(entry["height"]),
                gt_boxes=tuple(Box.from_sequence(b) for b in entry["gt_boxes"]),
            )
        )
    return records
