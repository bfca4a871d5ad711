import numpy as np
import pytest

from uwb_vptl import _kernels_py, kernels
from uwb_vptl.geometry import CLAMP_REL, AnchorLayout, Infeasible, RangePair, triangulate


def compiled():
    try:
        from uwb_vptl import _kernels
    except ImportError:
        pytest.skip("compiled extension not built")
    return _kernels


def random_ranges(rng, n):
    pts = np.c_[rng.uniform(-40, 40, n), rng.uniform(0.01, 60, n)]
    x = 0.925
    r1 = np.hypot(pts[:, 0] + x, pts[:, 1]) + rng.normal(0, 0.05, n)
    r2 = np.hypot(pts[:, 0] - x, pts[:, 1]) + rng.normal(0, 0.05, n)
    return np.abs(r1), np.abs(r2)


def test_triangulate_batch_matches_scalar(backend, rng):
    layout = AnchorLayout()
    r1, r2 = random_ranges(rng, 2000)
    xs, ys, ok = backend.triangulate_batch(r1, r2, layout.half_baseline, CLAMP_REL)
    assert ok.dtype == np.bool_
    for a, b, x, y, good in zip(r1, r2, xs, ys, ok):
        try:
            pos = triangulate(layout, RangePair(a, b))
        except Infeasible:
            assert not good
            assert np.isnan(y)
        else:
            assert good
            assert (pos.x_k, pos.y_k) == (x, y)


def test_backends_bitwise_identical(rng):
    ext = compiled()
    r1, r2 = random_ranges(rng, 5000)
    a = _kernels_py.triangulate_batch(r1, r2, 0.925, CLAMP_REL)
    b = ext.triangulate_batch(r1, r2, 0.925, CLAMP_REL)
    for u, v in zip(a, b):
        np.testing.assert_array_equal(u, v)
    v = rng.normal(size=777)
    for w in (1, 2, 5, 9, 10, 800):
        np.testing.assert_array_equal(_kernels_py.moving_average(v, w), ext.moving_average(v, w))
    for w in (2, 3, 10, 777):
        for u, t in zip(_kernels_py.rolling_mean_std(v, w), ext.rolling_mean_std(v, w)):
            np.testing.assert_array_equal(u, t)


def test_moving_average_edges(backend):
    v = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    np.testing.assert_allclose(backend.moving_average(v, 3), [1.5, 2.0, 3.0, 4.0, 4.5])
    # even windows lean forward: [i-1, i+1] for window 3, [i-1, i+2] for 4
    np.testing.assert_allclose(backend.moving_average(v, 4), [2.0, 2.5, 3.5, 4.0, 4.5])
    np.testing.assert_array_equal(backend.moving_average(v, 1), v)
    assert backend.moving_average(np.empty(0), 3).shape == (0,)
    with pytest.raises(ValueError):
        backend.moving_average(v, 0)


def test_rolling_mean_std(backend, rng):
    v = rng.normal(3.0, 2.0, 50)
    mean, std = backend.rolling_mean_std(v, 7)
    assert mean.shape == std.shape == (44,)
    for i in (0, 13, 43):
        assert mean[i] == pytest.approx(v[i:i + 7].mean(), rel=1e-13)
        assert std[i] == pytest.approx(v[i:i + 7].std(ddof=1), rel=1e-12)
    assert backend.rolling_mean_std(v[:3], 7)[0].shape == (0,)
    with pytest.raises(ValueError):
        backend.rolling_mean_std(v, 1)


def test_clamp_boundary(backend):
    # collinear beyond the right anchor: y**2 is exactly zero
    xs, ys, ok = backend.triangulate_batch(np.array([3.85, 1.85]), np.array([2.0, 0.0]), 0.925, CLAMP_REL)
    assert ok.all()
    assert ys[1] == pytest.approx(0.0, abs=1e-7)
    # slightly inside: clamped; far inside: rejected
    xs, ys, ok = backend.triangulate_batch(np.array([1.0, 0.5]), np.array([1.0, 0.5]), 0.5 + 1e-7, CLAMP_REL)
    assert list(ok) == [True, True]
    xs, ys, ok = backend.triangulate_batch(np.array([0.4]), np.array([0.4]), 0.925, CLAMP_REL)
    assert not ok[0]


def test_length_mismatch(backend):
    with pytest.raises(ValueError):
        backend.triangulate_batch(np.ones(3), np.ones(2), 1.0, CLAMP_REL)


def test_env_forces_fallback(monkeypatch):
    import importlib

    monkeypatch.setenv("UWB_VPTL_PURE", "1")
    mod = importlib.reload(kernels)
    try:
        assert mod.BACKEND == "python"
        assert mod.triangulate_batch is _kernels_py.triangulate_batch
    finally:
        monkeypatch.delenv("UWB_VPTL_PURE")
        importlib.reload(kernels)
