"""Average precision at a fixed IoU threshold and relative-performance ratios.

Single-class AP: predictions from all images are pooled into one ranked
list (descending score, stable across images), marked TP/FP by greedy
per-image matching, and the area under the precision envelope is returned
(all-points interpolation).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NoPositivesError, UndefinedRatioError
from .geometry import Box, ScoredBox, match_detections


@dataclass(frozen=True)
class EvalSample:
    """Predictions and ground truth for one image."""

    image_id: str
    predictions: tuple[ScoredBox, ...]
    ground_truths: tuple[Box, ...]


@dataclass(frozen=True)
class PrCurve:
    """Operating points (recall, precision) with the score at each point.

    Recall is non-decreasing along the list.
    """

    points: tuple[tuple[float, float], ...]
    scores: tuple[float, ...]


def _ranked_tp_flags(
    samples: Sequence[EvalSample], iou_threshold: float
) -> tuple[np.ndarray, np.ndarray, int]:
    """Pool predictions into rank order and mark each TP or FP.

    Rank order: descending score, ties broken by sample position then by
    prediction input index. Returns (scores, tp_flags, total_gt).
    """
    seen: set[str] = set()
    entries: list[tuple[float, int, int, bool]] = []
    total_gt = 0
    for si, sample in enumerate(samples):
        if sample.image_id in seen:
            raise ValueError(f"duplicate image id in evaluation set: {sample.image_id}")
        seen.add(sample.image_id)
        total_gt += len(sample.ground_truths)
        result = match_detections(sample.predictions, sample.ground_truths, iou_threshold)
        matched = {pi for pi, _, _ in result.pairs}
        for pi, pred in enumerate(sample.predictions):
            entries.append((pred.score, si, pi, pi in matched))
    entries.sort(key=lambda e: (-e[0], e[1], e[2]))
    scores = np.asarray([e[0] for e in entries], dtype=np.float64)
    flags = np.asarray([e[3] for e in entries], dtype=bool)
    return scores, flags, total_gt


def pr_curve(samples: Sequence[EvalSample], iou_threshold: float = 0.5) -> PrCurve:
    """Precision/recall after each prediction of the pooled ranked list."""
    scores, flags, total_gt = _ranked_tp_flags(samples, iou_threshold)
    if total_gt == 0:
        raise NoPositivesError("evaluation set has no ground-truth boxes")
    if len(flags) == 0:
        return PrCurve(points=(), scores=())
    tp_cum = np.cumsum(flags)
    ranks = np.arange(1, len(flags) + 1)
    recall = tp_cum / total_gt
    precision = tp_cum / ranks
    points = tuple((float(r), float(p)) for r, p in zip(recall, precision))
    return PrCurve(points=points, scores=tuple(float(s) for s in scores))


def average_precision(samples: Sequence[EvalSample], iou_threshold: float = 0.5) -> float:
    """Area under the precision envelope of the pooled ranked predictions."""
    scores, flags, total_gt = _ranked_tp_flags(samples, iou_threshold)
    if total_gt == 0:
        raise NoPositivesError("evaluation set has no ground-truth boxes")
    if len(flags) == 0:
        return 0.0
    tp_cum = np.cumsum(flags)
    precision = tp_cum / np.arange(1, len(flags) + 1)
    # precision envelope: best precision achievable at this recall or beyond
    envelope = np.maximum.accumulate(precision[::-1])[::-1]
    # each TP advances recall by 1/total_gt
    return float(envelope[flags].sum() / total_gt)


def performance_ratio(ap_during: float, ap_reference: float) -> float:
    """Quality of the background model relative to a fully-supervised reference."""
    if ap_reference == 0:
        raise UndefinedRatioError("reference AP is zero; ratio undefined")
    return ap_during / ap_reference
