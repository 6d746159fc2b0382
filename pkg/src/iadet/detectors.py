"""Prediction sources: score post-processing, built-in synthetic detectors,
and the HTTP client for external trainer workers.

The synthetic detectors stand in for a real network so the annotation loop
can be evaluated without GPU training. Their randomness is a fixed-algorithm
pseudo-random stream keyed by (seed, model version, image id), which makes
every prediction bit-reproducible across runs and platforms.
"""
from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass

import httpx
import numpy as np

from .errors import MissingGroundTruthError
from .geometry import Box, ScoredBox
from .store import ImageRecord

logger = logging.getLogger(__name__)

# proposals are kept down to min(0.7, highest score), so a non-empty
# prediction always keeps at least one box
SCORE_KEEP_CAP = 0.7

DETECTOR_KINDS = ("learning", "perfect", "spurious")


@dataclass(frozen=True)
class ModelVersion:
    """A published detector state. Versions only ever increase."""

    version: int
    created_at: float
    source: str = "builtin"  # "builtin" | "external"
    labeled_count: int = 0
    snapshot_version: int | None = None
    epochs: int | None = None
    last_loss: float | None = None


INITIAL_VERSION = ModelVersion(version=0, created_at=0.0, source="builtin", labeled_count=0)


@dataclass(frozen=True)
class Prediction:
    image_id: str
    model_version: int
    raw_boxes: tuple[ScoredBox, ...]
    kept_boxes: tuple[ScoredBox, ...]
    degraded: bool = False


@dataclass(frozen=True)
class SyntheticDetectorConfig:
    """Learning-curve detector: recall saturates with labeled-image count.

    Per-box recall is p_max * (1 - exp(-labeled/tau)); spurious boxes are
    Poisson at fp_rate decayed by the same curve, scored lower than real
    hits by score_gap on average.
    """

    p_max: float = 0.95
    tau: float = 40.0
    jitter_sigma: float = 0.15
    fp_rate: float = 1.0
    score_gap: float = 0.35
    seed: int = 0

    def __post_init__(self) -> None:
        if not (0.0 <= self.p_max <= 1.0):
            raise ValueError("p_max must be in [0, 1]")
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.jitter_sigma < 0 or self.fp_rate < 0:
            raise ValueError("jitter_sigma and fp_rate must be non-negative")


def postprocess(raw_boxes) -> tuple[ScoredBox, ...]:
    """Keep boxes scoring at least min(0.7, highest score).

    Empty stays empty; otherwise at least the top-scoring box survives.
    """
    raw = tuple(raw_boxes)
    if not raw:
        return ()
    threshold = min(SCORE_KEEP_CAP, max(b.score for b in raw))
    return tuple(b for b in raw if b.score >= threshold)


def _stream_key(seed: int, model_version: int, image_id: str) -> tuple[int, int, int]:
    digest = hashlib.blake2b(image_id.encode("utf-8"), digest_size=8).digest()
    return (seed, model_version, int.from_bytes(digest, "big"))


def recall_at(labeled_count: int, config: SyntheticDetectorConfig) -> float:
    return config.p_max * (1.0 - math.exp(-labeled_count / config.tau))


def synthetic_predict(
    record: ImageRecord,
    labeled_count: int,
    config: SyntheticDetectorConfig,
    model_version: int,
) -> Prediction:
    """Emit jittered copies of gt boxes plus decaying spurious boxes.

    Deterministic given (config.seed, model_version, record.id).
    """
    if record.gt_boxes is None:
        raise MissingGroundTruthError(
            f"synthetic detector needs gt boxes for image {record.id}"
        )
    rng = np.random.default_rng(_stream_key(config.seed, model_version, record.id))
    p = recall_at(labeled_count, config)
    decay = math.exp(-labeled_count / config.tau)

    raw: list[ScoredBox] = []
    for gt in record.gt_boxes:
        if rng.uniform() >= p:
            continue
        w, h = gt.width, gt.height
        dx1, dx2 = rng.normal(0.0, config.jitter_sigma, 2) * w
        dy1, dy2 = rng.normal(0.0, config.jitter_sigma, 2) * h
        box = _valid_box(
            gt.x_min + dx1, gt.y_min + dy1, gt.x_max + dx2, gt.y_max + dy2,
            record.width, record.height,
        )
        # true hits never fall below the keep cap, so a found box is shown
        score = float(np.clip(0.85 + rng.normal(0.0, 0.08), SCORE_KEEP_CAP, 1.0))
        raw.append(ScoredBox(box, score))

    n_spurious = int(rng.poisson(config.fp_rate * decay))
    for _ in range(n_spurious):
        w = rng.uniform(0.05, 0.3) * record.width
        h = rng.uniform(0.05, 0.3) * record.height
        x = rng.uniform(0, record.width - w)
        y = rng.uniform(0, record.height - h)
        score = float(np.clip(0.85 - config.score_gap + rng.normal(0.0, 0.08), 0.01, 1.0))
        raw.append(ScoredBox(_valid_box(x, y, x + w, y + h, record.width, record.height), score))

    raw_t = tuple(raw)
    return Prediction(
        image_id=record.id,
        model_version=model_version,
        raw_boxes=raw_t,
        kept_boxes=postprocess(raw_t),
    )


def _valid_box(x1: float, y1: float, x2: float, y2: float, width: int, height: int) -> Box:
    if x2 < x1:
        x1, x2 = x2, x1
    if y2 < y1:
        y1, y2 = y2, y1
    x2 = max(x2, x1 + 1e-3)
    y2 = max(y2, y1 + 1e-3)
    return Box(x1, y1, x2, y2).clamp(width, height)


class PerfectDetector:
    """Predicts the ground truth exactly, from the very first version."""

    name = "perfect"

    def predict(self, record: ImageRecord, version: ModelVersion) -> Prediction:
        if record.gt_boxes is None:
            raise MissingGroundTruthError(record.id)
        raw = tuple(ScoredBox(b, 1.0) for b in record.gt_boxes)
        return Prediction(record.id, version.version, raw, postprocess(raw))


class OneSpuriousDetector:
    """Always predicts exactly one wrong box: the full image frame.

    The frame cannot reach 0.5 IoU against any gt covering less than half
    the image, so every prediction costs the annotator a cleanup.
    """

    name = "spurious"

    def predict(self, record: ImageRecord, version: ModelVersion) -> Prediction:
        raw = (ScoredBox(Box(0.0, 0.0, float(record.width), float(record.height)), 1.0),)
        return Prediction(record.id, version.version, raw, postprocess(raw))


class LearningDetector:
    """Synthetic detector whose quality follows the labeled-count curve."""

    name = "learning"

    def __init__(self, config: SyntheticDetectorConfig | None = None):
        self.config = config or SyntheticDetectorConfig()

    def predict(self, record: ImageRecord, version: ModelVersion) -> Prediction:
        return synthetic_predict(record, version.labeled_count, self.config, version.version)


def make_detector(kind: str, config: SyntheticDetectorConfig | None = None):
    if kind == "perfect":
        return PerfectDetector()
    if kind == "spurious":
        return OneSpuriousDetector()
    if kind == "learning":
        return LearningDetector(config)
    raise ValueError(f"unknown detector kind {kind!r}, expected one of {DETECTOR_KINDS}")


# -- external trainer-worker protocol ----------------------------------------
#
# POST {worker}/predict   {"image_id": ..., "image_path": ...}
#   -> {"model_version": int, "boxes": [{"x_min","y_min","x_max","y_max","score"}, ...]}
# GET  {worker}/status    -> {"model_version": int, "epochs": int, "last_loss": float}
# The worker pulls annotations from the core service: GET {core}/snapshot.


def encode_predict_request(image_id: str, image_path: str) -> bytes:
    body = {"image_id": image_id, "image_path": image_path}
    return json.dumps(body, ensure_ascii=False).encode("utf-8")


def encode_predict_response(model_version: int, boxes) -> bytes:
    body = {
        "model_version": model_version,
        "boxes": [
            {
                "x_min": b.box.x_min,
                "y_min": b.box.y_min,
                "x_max": b.box.x_max,
                "y_max": b.box.y_max,
                "score": b.score,
            }
            for b in boxes
        ],
    }
    return json.dumps(body, ensure_ascii=False).encode("utf-8")


def decode_predict_response(payload: bytes | str | dict) -> tuple[int, tuple[ScoredBox, ...]]:
    if isinstance(payload, (bytes, str)):
        payload = json.loads(payload)
    boxes = tuple(
        ScoredBox(
            Box(float(e["x_min"]), float(e["y_min"]), float(e["x_max"]), float(e["y_max"])),
            float(e["score"]),
        )
        for e in payload["boxes"]
    )
    return int(payload["model_version"]), boxes


class ExternalDetectorClient:
    """Fetches predictions from a trainer worker over HTTP.

    Failures degrade to an empty, flagged prediction within the timeout;
    the annotator is never blocked indefinitely.
    """

    name = "external"

    def __init__(self, worker_url: str, timeout: float = 2.0, client: httpx.Client | None = None):
        self.worker_url = worker_url.rstrip("/")
        self.timeout = timeout
        self._client = client or httpx.Client(timeout=timeout)

    def predict(self, record: ImageRecord, version: ModelVersion) -> Prediction:
        return self.external_predict(record.id, record.path, fallback_version=version.version)

    def external_predict(
        self, image_id: str, image_path: str, fallback_version: int = 0
    ) -> Prediction:
        try:
            resp = self._client.post(
                f"{self.worker_url}/predict",
                content=encode_predict_request(image_id, image_path),
                headers={"content-type": "application/json"},
                timeout=self.timeout,
            )
            resp.raise_for_status()
            worker_version, raw = decode_predict_response(resp.json())
        except (httpx.HTTPError, KeyError, ValueError, TypeError) as exc:
            logger.warning("worker prediction failed for %s: %s", image_id, exc)
            return Prediction(
                image_id=image_id,
                model_version=fallback_version,
                raw_boxes=(),
                kept_boxes=(),
                degraded=True,
            )
        return Prediction(
            image_id=image_id,
            model_version=worker_version,
            raw_boxes=raw,
            kept_boxes=postprocess(raw),
        )

    def status(self) -> dict | None:
        try:
            resp = self._client.get(f"{self.worker_url}/status", timeout=self.timeout)
            resp.raise_for_status()
            return resp.json()
        except httpx.HTTPError as exc:
            logger.warning("worker status failed: %s", exc)
            return None
