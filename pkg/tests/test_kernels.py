"""Parity between the compiled kernel extension and the pure fallback."""
import numpy as np
import pytest

from iadet import _kernels
from iadet._kernels import pure

compiled = pytest.importorskip(
    "iadet._kernels._core", reason="compiled kernels not built"
)


def _random_boxes(rng, n):
    xy = rng.uniform(0, 100, size=(n, 2))
    wh = rng.uniform(0.5, 60, size=(n, 2))
    return np.hstack([xy, xy + wh])


def test_backend_reports_itself():
    assert _kernels.BACKEND in ("compiled", "pure")


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_iou_matrix_bit_identical(seed):
    rng = np.random.default_rng(seed)
    p = _random_boxes(rng, 40)
    g = _random_boxes(rng, 25)
    a = compiled.iou_matrix(p, g)
    b = pure.iou_matrix(p, g)
    assert a.dtype == b.dtype == np.float64
    assert np.array_equal(a, b)  # bitwise, no tolerance


@pytest.mark.parametrize("seed", [10, 11, 12])
def test_greedy_match_identical(seed):
    rng = np.random.default_rng(seed)
    p = _random_boxes(rng, 30)
    g = _random_boxes(rng, 30)
    scores = rng.uniform(0, 1, 30)
    order = np.asarray(
        sorted(range(30), key=lambda i: (-scores[i], i)), dtype=np.int64
    )
    ious = pure.iou_matrix(p, g)
    a = compiled.greedy_match(order, ious, 0.3)
    b = pure.greedy_match(order, ious, 0.3)
    assert np.array_equal(a, b)


def test_empty_shapes():
    empty = np.zeros((0, 4))
    one = np.array([[0.0, 0.0, 1.0, 1.0]])
    for impl in (compiled, pure):
        assert impl.iou_matrix(empty, one).shape == (0, 1)
        assert impl.iou_matrix(one, empty).shape == (1, 0)
        out = impl.greedy_match(np.zeros(0, dtype=np.int64), np.zeros((0, 3)), 0.5)
        assert out.shape == (0,)
