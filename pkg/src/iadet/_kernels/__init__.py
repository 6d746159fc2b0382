"""Numeric kernels for box overlap and greedy matching.

Two interchangeable backends: a Cython extension (built at install time)
and a pure-Python/numpy fallback. Both implement the same arithmetic in
the same operation order, so results are bit-identical. Selection happens
once at import; set IADET_PURE_KERNELS=1 to force the fallback.
"""
from __future__ import annotations

import os

if os.environ.get("IADET_PURE_KERNELS") == "1":
    from . import pure as _impl

    BACKEND = "pure"
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        from . import pure as _impl  # type: ignore[no-redef]

        BACKEND = "pure"

iou_matrix = _impl.iou_matrix
greedy_match = _impl.greedy_match

__all__ = ["BACKEND", "iou_matrix", "greedy_match"]
