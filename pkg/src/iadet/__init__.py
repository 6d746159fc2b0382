"""iadet: assisted single-class box annotation with background training.

Core pieces: box geometry and matching, an interaction-cost model, a
persistent annotation store, pluggable detectors, active selection, the
annotate/train orchestration loop, a deterministic robot-annotator
simulator, report emitters, and an HTTP service for UI and trainer workers.
"""
from ._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
