"""Synthetic ground-truth datasets for desk-scale simulation runs."""
from __future__ import annotations

import numpy as np

from .geometry import Box
from .store import ImageRecord


def make_synthetic_records(
    n_images: int,
    seed: int = 0,
    width: int = 640,
    height: int = 480,
    boxes_min: int = 1,
    boxes_max: int = 4,
    size_min: float = 0.08,
    size_max: float = 0.35,
    prefix: str = "synth",
) -> list[ImageRecord]:
    """Generate images with random gt boxes.

    Box sides span size_min..size_max of the image dimensions, so no box
    covers more than ~12% of the frame (keeps the full-frame spurious
    detector unmatched at any sane IoU threshold). Deterministic for a
    given seed; ids are zero-padded so lexicographic order is stable.
    """
    if boxes_min < 0 or boxes_max < boxes_min:
        raise ValueError("need 0 <= boxes_min <= boxes_max")
    rng = np.random.default_rng(seed)
    digits = max(4, len(str(max(n_images - 1, 0))))
    records = []
    for i in range(n_images):
        n_boxes = int(rng.integers(boxes_min, boxes_max + 1))
        boxes = []
        for _ in range(n_boxes):
            w = float(rng.uniform(size_min, size_max) * width)
            h = float(rng.uniform(size_min, size_max) * height)
            x = float(rng.uniform(0, width - w))
            y = float(rng.uniform(0, height - h))
            boxes.append(Box(x, y, x + w, y + h))
        image_id = f"{prefix}-{i:0{digits}d}.png"
        records.append(
            ImageRecord(
                id=image_id,
                path=image_id,
                width=width,
                height=height,
                gt_boxes=tuple(boxes),
            )
        )
    return records


def make_uniform_records(
    n_images: int, boxes_per_image: int, width: int = 640, height: int = 480
) -> list[ImageRecord]:
    """Fixed-count, fixed-layout gt boxes; handy for closed-form checks."""
    records = []
    digits = max(4, len(str(max(n_images - 1, 0))))
    for i in range(n_images):
        boxes = []
        for j in range(boxes_per_image):
            x = 10.0 + j * 60.0
            y = 10.0 + (j % 3) * 40.0
            boxes.append(Box(x, y, x + 50.0, y + 30.0))
        image_id = f"img-{i:0{digits}d}.png"
        records.append(
            ImageRecord(
                id=image_id,
                path=image_id,
                width=width,
                height=height,
                gt_boxes=tuple(boxes),
            )
        )
    return records
