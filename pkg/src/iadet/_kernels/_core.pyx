# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of iadet._kernels.pure — keep the arithmetic identical."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def iou_matrix(preds, gts):
    """Pairwise IoU between two (N, 4) float64 arrays of corner boxes."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] p = np.ascontiguousarray(preds, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] g = np.ascontiguousarray(gts, dtype=np.float64)
    cdef Py_ssize_t n_pred = p.shape[0]
    cdef Py_ssize_t n_gt = g.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((n_pred, n_gt), dtype=np.float64)
    cdef Py_ssize_t i, j
    cdef double ax1, ay1, ax2, ay2, bx1, by1, bx2, by2
    cdef double area_a, iw, ih, inter, union
    for i in range(n_pred):
        ax1 = p[i, 0]
        ay1 = p[i, 1]
        ax2 = p[i, 2]
        ay2 = p[i, 3]
        area_a = (ax2 - ax1) * (ay2 - ay1)
        for j in range(n_gt):
            bx1 = g[j, 0]
            by1 = g[j, 1]
            bx2 = g[j, 2]
            by2 = g[j, 3]
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


def greedy_match(order, ious, double threshold):
    """Greedy one-to-one matching; see the pure backend for semantics."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] o = np.ascontiguousarray(order, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] m = np.ascontiguousarray(ious, dtype=np.float64)
    cdef Py_ssize_t n_pred = m.shape[0]
    cdef Py_ssize_t n_gt = m.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] matched = np.full(n_pred, -1, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] gt_taken = np.zeros(n_gt, dtype=np.uint8)
    cdef Py_ssize_t k, j, pi, best_j
    cdef double best_iou, v
    for k in range(o.shape[0]):
        pi = o[k]
        best_j = -1
        best_iou = 0.0
        for j in range(n_gt):
            if gt_taken[j]:
                continue
            v = m[pi, j]
            if v > best_iou:
                best_iou = v
                best_j = j
        if best_j >= 0 and best_iou >= threshold:
            matched[pi] = best_j
            gt_taken[best_j] = 1
    return matched
