"""Pure-Python reference backend for the matching kernels.

Keep the arithmetic here in lockstep with _core.pyx: same operations in
the same order, no shortcuts, so the two backends agree bit-for-bit.
"""
from __future__ import annotations

import numpy as np


def iou_matrix(preds: np.ndarray, gts: np.ndarray) -> np.ndarray:
    """Pairwise IoU between two (N, 4) arrays of [x_min, y_min, x_max, y_max].

    Returns a (len(preds), len(gts)) float64 matrix. Degenerate boxes with
    non-positive union yield 0.
    """
    preds = np.ascontiguousarray(preds, dtype=np.float64)
    gts = np.ascontiguousarray(gts, dtype=np.float64)
    out = np.zeros((preds.shape[0], gts.shape[0]), dtype=np.float64)
    for i in range(preds.shape[0]):
        ax1, ay1, ax2, ay2 = preds[i]
        area_a = (ax2 - ax1) * (ay2 - ay1)
        for j in range(gts.shape[0]):
            bx1, by1, bx2, by2 = gts[j]
            iw = min(ax2, bx2) - max(ax1, bx1)
            if iw <= 0.0:
                continue
            ih = min(ay2, by2) - max(ay1, by1)
            if ih <= 0.0:
                continue
            inter = iw * ih
            union = area_a + (bx2 - bx1) * (by2 - by1) - inter
            if union > 0.0:
                out[i, j] = inter / union
    return out


def greedy_match(order: np.ndarray, ious: np.ndarray, threshold: float) -> np.ndarray:
    """Greedy one-to-one assignment of predictions to ground truths.

    `order` gives prediction indices in processing order (highest score
    first). Each prediction takes the still-unmatched ground truth with the
    highest IoU, ties broken by the lower ground-truth index, provided that
    IoU >= threshold. Returns, per prediction (original indexing), the
    matched ground-truth index or -1.
    """
    order = np.ascontiguousarray(order, dtype=np.int64)
    ious = np.ascontiguousarray(ious, dtype=np.float64)
    n_pred, n_gt = ious.shape
    matched = np.full(n_pred, -1, dtype=np.int64)
    gt_taken = np.zeros(n_gt, dtype=bool)
    for pi in order:
        best_j = -1
        best_iou = 0.0
        for j in range(n_gt):
            if gt_taken[j]:
                continue
            v = ious[pi, j]
            if v > best_iou:
                best_iou = v
                best_j = j
        if best_j >= 0 and best_iou >= threshold:
            matched[pi] = best_j
            gt_taken[best_j] = True
    return matched
