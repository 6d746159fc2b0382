"""Axis-aligned boxes, IoU, and greedy detection-to-ground-truth matching."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels


@dataclass(frozen=True)
class Box:
    """Rectangle in continuous pixel coordinates, corners (x_min, y_min, x_max, y_max).

    Must have strictly positive area; degenerate rectangles are rejected at
    construction so UI bugs surface immediately instead of yielding IoU 0.
    """

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self) -> None:
        for name in ("x_min", "y_min", "x_max", "y_max"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"box coordinates must be finite, got {v} for {name}")
            object.__setattr__(self, name, v)
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ValueError(f"box must have positive area, got {self!r}")

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    def translate(self, dx: float, dy: float) -> "Box":
        return Box(self.x_min + dx, self.y_min + dy, self.x_max + dx, self.y_max + dy)

    def clamp(self, width: float, height: float) -> "Box":
        """Clamp into [0, width] x [0, height], preserving a sliver of area."""
        x1 = min(max(self.x_min, 0.0), width)
        y1 = min(max(self.y_min, 0.0), height)
        x2 = min(max(self.x_max, 0.0), width)
        y2 = min(max(self.y_max, 0.0), height)
        if x2 <= x1:
            x1, x2 = max(0.0, x2 - 1e-6), min(width, x1 + 1e-6)
        if y2 <= y1:
            y1, y2 = max(0.0, y2 - 1e-6), min(height, y1 + 1e-6)
        return Box(x1, y1, x2, y2)

    def as_list(self) -> list[float]:
        return [self.x_min, self.y_min, self.x_max, self.y_max]

    @classmethod
    def from_sequence(cls, seq: Sequence[float]) -> "Box":
        if len(seq) != 4:
            raise ValueError(f"expected 4 coordinates, got {len(seq)}")
        return cls(float(seq[0]), float(seq[1]), float(seq[2]), float(seq[3]))


@dataclass(frozen=True)
class ScoredBox:
    box: Box
    score: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.score <= 1.0):
            raise ValueError(f"score must be in [0, 1], got {self.score}")


@dataclass(frozen=True)
class MatchResult:
    """TP/FP/FN counts plus the matched (prediction, ground truth, iou) pairs."""

    tp: int
    fp: int
    fn: int
    pairs: tuple[tuple[int, int, float], ...]


def boxes_to_array(boxes: Iterable[Box]) -> np.ndarray:
    rows = [(b.x_min, b.y_min, b.x_max, b.y_max) for b in boxes]
    if not rows:
        return np.zeros((0, 4), dtype=np.float64)
    return np.asarray(rows, dtype=np.float64)


def iou(a: Box, b: Box) -> float:
    """Intersection over union of two boxes; 0 when disjoint, symmetric."""
    m = _kernels.iou_matrix(
        np.asarray([a.as_list()], dtype=np.float64),
        np.asarray([b.as_list()], dtype=np.float64),
    )
    return float(m[0, 0])


def match_detections(
    predictions: Sequence[ScoredBox],
    ground_truths: Sequence[Box],
    iou_threshold: float = 0.5,
) -> MatchResult:
    """Greedily match predictions to ground truths at an IoU threshold.

    Predictions are processed in descending score order (ties broken by
    lower input index); each takes the unmatched ground truth with the
    highest IoU when that IoU reaches the threshold. Deterministic for
    fixed inputs.
    """
    if not (0.0 < iou_threshold <= 1.0):
        raise ValueError(f"iou_threshold must be in (0, 1], got {iou_threshold}")
    n_pred = len(predictions)
    n_gt = len(ground_truths)
    if n_pred == 0 or n_gt == 0:
        return MatchResult(tp=0, fp=n_pred, fn=n_gt, pairs=())

    order = sorted(range(n_pred), key=lambda i: (-predictions[i].score, i))
    ious = _kernels.iou_matrix(
        boxes_to_array(p.box for p in predictions), boxes_to_array(ground_truths)
    )
    matched = _kernels.greedy_match(
        np.asarray(order, dtype=np.int64), ious, float(iou_threshold)
    )

    pairs = tuple(
        (pi, int(matched[pi]), float(ious[pi, matched[pi]]))
        for pi in order
        if matched[pi] >= 0
    )
    tp = len(pairs)
    return MatchResult(tp=tp, fp=n_pred - tp, fn=n_gt - tp, pairs=pairs)
