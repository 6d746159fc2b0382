"""Interaction-count model of annotation cost and the time conversion t = I / R.

One interaction is one atomic user action (a click or a keypress). Creating
a box costs two clicks, removing one costs one click, navigating to an image
and clearing every box each cost one keypress. The assisted cost of an image
lets the annotator pick the cheaper of two strategies: correct the proposal
(remove false positives, draw missed boxes) or clear everything and draw
from scratch.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class CostModelConfig:
    """Interaction constants. The defaults give I = 1 + min(1 + 2(TP+FN), FP + 2FN)."""

    clicks_per_box_create: int = 2
    clicks_per_box_remove: int = 1
    keypress_navigate: int = 1
    keypress_clear_all: int = 1
    include_navigation_in_unassisted: bool = True

    def __post_init__(self) -> None:
        for name in (
            "clicks_per_box_create",
            "clicks_per_box_remove",
            "keypress_navigate",
            "keypress_clear_all",
        ):
            v = getattr(self, name)
            if not isinstance(v, int) or v <= 0:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")


@dataclass(frozen=True)
class AnnotatorRate:
    """Annotator speed in interactions per second."""

    per_second: float

    def __post_init__(self) -> None:
        if not self.per_second > 0:
            raise ValueError(f"rate must be positive, got {self.per_second}")


DEFAULT_COST = CostModelConfig()


def assisted_interactions(
    tp: int, fp: int, fn: int, config: CostModelConfig = DEFAULT_COST
) -> int:
    """Interactions to finish one image starting from a model proposal.

    Navigation plus the cheaper of correcting the proposal or clearing it
    and drawing every box. With default constants this is
    1 + min(1 + 2 * (tp + fn), fp + 2 * fn).
    """
    if tp < 0 or fp < 0 or fn < 0:
        raise ValueError("tp, fp, fn must be non-negative")
    correct = fp * config.clicks_per_box_remove + fn * config.clicks_per_box_create
    clear = config.keypress_clear_all + (tp + fn) * config.clicks_per_box_create
    return config.keypress_navigate + min(clear, correct)


def unassisted_interactions(gt_count: int, config: CostModelConfig = DEFAULT_COST) -> int:
    """Interactions to annotate one image with no proposal shown."""
    if gt_count < 0:
        raise ValueError("gt_count must be non-negative")
    total = gt_count * config.clicks_per_box_create
    if config.include_navigation_in_unassisted:
        total += config.keypress_navigate
    return total


def interactions_to_time(interactions: int, rate: AnnotatorRate) -> float:
    """Seconds spent performing `interactions` actions at the given rate."""
    return interactions / rate.per_second


def strictly_worse_when_cleared(
    gt_count: int, config: CostModelConfig = DEFAULT_COST
) -> bool:
    """Check that a useless proposal costs more than annotating unassisted.

    Uses the weakest adversary (a single false positive, nothing found):
    clearing it still pays the extra interaction, so assisted cost strictly
    exceeds the unassisted cost.
    """
    assisted = assisted_interactions(0, 1, gt_count, config)
    return assisted > unassisted_interactions(gt_count, config)
