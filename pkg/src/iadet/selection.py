"""Active-selection strategies ordering the unlabeled pool.

Two built-ins: "random" (seed-fixed permutation, the usual active-learning
baseline) and "sequential" (lexicographic dataset order, mirroring manual
prev/next browsing). The interface accepts the latest predictions so
uncertainty-style strategies can plug in later; the built-ins ignore them.
"""
from __future__ import annotations

import numpy as np

from .errors import AnnotationCompleteError

STRATEGIES = ("random", "sequential")


class SelectionState:
    """Tracks labeled/unlabeled ids and serves the next image to annotate.

    The visit order is a fixed permutation determined entirely by
    (strategy, seed, sorted dataset ids); marking images out of order
    (e.g. a user jumping around) does not disturb it.
    """

    def __init__(self, image_ids, strategy: str = "random", seed: int = 0):
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}, expected one of {STRATEGIES}")
        ids = sorted(image_ids)
        if len(set(ids)) != len(ids):
            raise ValueError("image ids must be unique")
        self.strategy = strategy
        self.seed = seed
        if strategy == "random":
            rng = np.random.default_rng(seed)
            self._order: tuple[str, ...] = tuple(rng.permutation(ids).tolist())
        else:
            self._order = tuple(ids)
        self._labeled: set[str] = set()

    @property
    def order(self) -> tuple[str, ...]:
        return self._order

    @property
    def labeled_ids(self) -> list[str]:
        return [i for i in self._order if i in self._labeled]

    @property
    def unlabeled_ids(self) -> list[str]:
        return [i for i in self._order if i not in self._labeled]

    @property
    def complete(self) -> bool:
        return len(self._labeled) == len(self._order)

    def next_image(self, latest_predictions=None) -> str:
        for image_id in self._order:
            if image_id not in self._labeled:
                return image_id
        raise AnnotationCompleteError("all images are labeled")

    def mark_labeled(self, image_id: str) -> "SelectionState":
        if image_id not in set(self._order):
            raise ValueError(f"unknown image id: {image_id}")
        if image_id in self._labeled:
            raise ValueError(f"image already labeled: {image_id}")
        self._labeled.add(image_id)
        return self
