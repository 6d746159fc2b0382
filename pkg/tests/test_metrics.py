import numpy as np
import pytest

from iadet.errors import NoPositivesError, UndefinedRatioError
from iadet.geometry import Box, ScoredBox
from iadet.metrics import EvalSample, average_precision, performance_ratio, pr_curve
from oracles import oracle_average_precision


def _box(x1, y1, x2, y2):
    return Box(float(x1), float(y1), float(x2), float(y2))


def _sample(image_id, preds, gts):
    return EvalSample(
        image_id=image_id,
        predictions=tuple(ScoredBox(_box(*b), s) for s, b in preds),
        ground_truths=tuple(_box(*b) for b in gts),
    )


def _random_eval_set(rng, n_images=3, max_preds=10, max_gt=5):
    samples = []
    raw = []
    for i in range(n_images):
        gts = []
        for _ in range(int(rng.integers(0, max_gt + 1))):
            x, y = rng.uniform(0, 80, 2)
            w, h = rng.uniform(5, 40, 2)
            gts.append((x, y, x + w, y + h))
        preds = []
        for _ in range(int(rng.integers(0, max_preds + 1))):
            if gts and rng.uniform() < 0.5:
                # jittered copy of a gt box, sometimes matching
                gx1, gy1, gx2, gy2 = gts[int(rng.integers(0, len(gts)))]
                d = rng.uniform(-10, 10, 4)
                b = (gx1 + d[0], gy1 + d[1], max(gx2 + d[2], gx1 + d[0] + 1), max(gy2 + d[3], gy1 + d[1] + 1))
            else:
                x, y = rng.uniform(0, 80, 2)
                w, h = rng.uniform(5, 40, 2)
                b = (x, y, x + w, y + h)
            preds.append((float(rng.uniform(0, 1)), b))
        samples.append(_sample(f"img{i}", preds, gts))
        raw.append((preds, gts))
    return samples, raw


def test_exact_predictions_give_ap_one():
    gts = [(0, 0, 10, 10), (20, 20, 40, 45), (50, 5, 60, 30)]
    preds = [(0.3, gts[0]), (0.9, gts[1]), (0.5, gts[2])]
    assert average_precision([_sample("a", preds, gts)]) == 1.0


def test_no_predictions_gives_zero():
    assert average_precision([_sample("a", [], [(0, 0, 10, 10)])]) == 0.0


def test_no_ground_truth_is_an_error():
    with pytest.raises(NoPositivesError):
        average_precision([_sample("a", [(0.5, (0, 0, 10, 10))], [])])


def test_duplicate_image_ids_rejected():
    s = _sample("a", [], [(0, 0, 10, 10)])
    with pytest.raises(ValueError):
        average_precision([s, s])


def test_matches_cutoff_enumeration_oracle():
    rng = np.random.default_rng(42)
    checked = 0
    for _ in range(200):
        samples, raw = _random_eval_set(rng)
        total_gt = sum(len(g) for _, g in raw)
        if total_gt == 0:
            continue
        got = average_precision(samples, 0.5)
        expected = oracle_average_precision(raw, 0.5)
        assert got == pytest.approx(expected, abs=1e-9)
        checked += 1
    assert checked > 150


def test_monotone_score_remap_invariance():
    rng = np.random.default_rng(7)
    samples, raw = _random_eval_set(rng, n_images=4)
    base = average_precision(samples, 0.5)
    remaps = [lambda x: x**3, lambda x: x / 2, lambda x: 0.1 + 0.8 * x, lambda x: x**0.25]
    for remap in remaps:
        remapped = [
            EvalSample(
                image_id=s.image_id,
                predictions=tuple(ScoredBox(p.box, remap(p.score)) for p in s.predictions),
                ground_truths=s.ground_truths,
            )
            for s in samples
        ]
        assert average_precision(remapped, 0.5) == pytest.approx(base, abs=1e-12)


def test_low_score_false_positive_never_raises_ap():
    rng = np.random.default_rng(11)
    for _ in range(50):
        samples, raw = _random_eval_set(rng, n_images=2)
        if sum(len(g) for _, g in raw) == 0:
            continue
        base = average_precision(samples, 0.5)
        min_score = min(
            (p.score for s in samples for p in s.predictions), default=1.0
        )
        worse = [
            EvalSample(
                image_id=samples[0].image_id,
                predictions=samples[0].predictions
                + (ScoredBox(_box(900, 900, 901, 901), min_score * 0.5),),
                ground_truths=samples[0].ground_truths,
            )
        ] + list(samples[1:])
        assert average_precision(worse, 0.5) <= base + 1e-12


def test_pr_curve_shape():
    gts = [(0, 0, 10, 10), (30, 30, 40, 40)]
    preds = [(0.9, gts[0]), (0.8, (60, 60, 70, 70)), (0.7, gts[1])]
    curve = pr_curve([_sample("a", preds, gts)])
    recalls = [r for r, _ in curve.points]
    assert recalls == sorted(recalls)
    assert all(0 <= r <= 1 and 0 <= p <= 1 for r, p in curve.points)
    assert curve.scores == (0.9, 0.8, 0.7)


def test_performance_ratio_paper_rows():
    assert performance_ratio(0.868, 0.915) == pytest.approx(0.9486, abs=5e-5)
    assert performance_ratio(0.917, 0.936) == pytest.approx(0.9797, abs=5e-5)
    assert performance_ratio(0.42, 0.42) == 1.0


def test_performance_ratio_zero_reference():
    with pytest.raises(UndefinedRatioError):
        performance_ratio(0.5, 0.0)
