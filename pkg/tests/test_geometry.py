import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uwb_vptl.geometry import (
    AnchorLayout, Ambiguous, CoverageStatus, DegenerateLayout, Infeasible, PerturbMode,
    RangePair, Singular, TagPosition, bearing_deg, coverage, perturb, perturbed_triangulate,
    resolve_side, sensitivity, sensitivity_frontal, triangulate, true_ranges,
)

# Independent high-precision values (mpmath, 40 digits) for the default
# 0.925 m half-baseline.
Y_FRONT_10 = 9.95712684462741993         # sqrt(100 - 0.925**2)
X_WORST_10 = 1.0810810810810811          # (10.1**2 - 9.9**2) / 3.7
DX_DE_10 = 10.810810810810811            # 10 / 0.925
DY_DE_10 = 1.004305775756559             # 1 / sqrt(1 - 0.925**2 / 100)
DX_DE_50 = 54.054054054054054


def fd(fn, h):
    return (fn(h) - fn(-h)) / (2 * h)


def test_layout_validation():
    lay = AnchorLayout.from_baseline(1.85)
    assert lay.half_baseline == 0.925
    assert lay.baseline == 1.85
    assert lay.left_anchor == (-0.925, 0.0)
    assert lay.right_anchor == (0.925, 0.0)
    for bad in (0.0, -1.0, float("nan")):
        with pytest.raises(DegenerateLayout):
            AnchorLayout(half_baseline=bad)


def test_range_pair_rejects_negative():
    with pytest.raises(ValueError):
        RangePair(-0.1, 1.0)


def test_triangulate_frontal():
    pos = triangulate(AnchorLayout(), RangePair(10.0, 10.0))
    assert pos.x_k == 0.0
    assert pos.y_k == pytest.approx(Y_FRONT_10, rel=1e-15)


def test_triangulate_tangent_and_infeasible():
    lay = AnchorLayout()
    assert triangulate(lay, RangePair(0.925, 0.925)).as_tuple() == (0.0, 0.0)
    with pytest.raises(Infeasible):
        triangulate(lay, RangePair(0.1, 0.1))
    with pytest.raises(Infeasible):
        triangulate(lay, RangePair(10.0, 5.0))


def test_worst_case_x_example():
    pos = perturbed_triangulate(AnchorLayout(), RangePair(10.0, 10.0), 0.1, PerturbMode.WORST_CASE_X)
    assert pos.x_k == pytest.approx(X_WORST_10, rel=1e-14)


def test_perturb_negative_range():
    with pytest.raises(Infeasible):
        perturb(RangePair(0.05, 1.0), -0.1, PerturbMode.WORST_CASE_Y)
    assert perturb(RangePair(1.0, 2.0), 0.5, PerturbMode.WORST_CASE_X) == RangePair(1.5, 1.5)


def test_sensitivity_examples():
    lay = AnchorLayout()
    s = sensitivity_frontal(lay, 10.0)
    assert s.dx_de == pytest.approx(DX_DE_10, rel=1e-15)
    assert s.dy_de == pytest.approx(DY_DE_10, rel=1e-14)
    assert sensitivity_frontal(lay, 50.0).dx_de == pytest.approx(DX_DE_50, rel=1e-15)
    full = sensitivity(lay, RangePair(10.0, 10.0))
    assert full.dx_de == pytest.approx(s.dx_de, rel=1e-12)
    assert full.dy_de == pytest.approx(s.dy_de, rel=1e-12)
    with pytest.raises(Singular):
        sensitivity_frontal(lay, 0.925)
    with pytest.raises(Singular):
        sensitivity(lay, RangePair(0.925, 0.925))


def test_sensitivity_matches_finite_differences():
    rng = np.random.default_rng(7)
    for _ in range(100):
        x = rng.uniform(0.3, 2.0)
        lay = AnchorLayout(half_baseline=x)
        pt = (rng.uniform(-10, 10), rng.uniform(3 * x + 1, 60))
        rp = true_ranges(lay, pt)
        h = 1e-5 * max(rp.r1, rp.r2)
        s = sensitivity(lay, rp)
        for mode, got, attr in ((PerturbMode.WORST_CASE_X, s.dx_de, "x_k"),
                                (PerturbMode.WORST_CASE_Y, s.dy_de, "y_k")):
            num = fd(lambda e: getattr(perturbed_triangulate(lay, rp, e, mode), attr), h)
            assert got == pytest.approx(num, rel=1e-6)


@settings(max_examples=200, deadline=None)
@given(x=st.floats(0.2, 3.0), k=st.floats(2.01, 60.0))
def test_frontal_is_full_sensitivity_at_equal_ranges(x, k):
    lay = AnchorLayout(half_baseline=x)
    r = k * x
    a, b = sensitivity_frontal(lay, r), sensitivity(lay, RangePair(r, r))
    assert a.dx_de == pytest.approx(b.dx_de, rel=1e-12)
    assert a.dy_de == pytest.approx(b.dy_de, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(x=st.floats(0.2, 3.0), r1=st.floats(2.1, 100.0), r2=st.floats(2.1, 100.0))
def test_frontal_monotone(x, r1, r2):
    lay = AnchorLayout(half_baseline=x)
    lo, hi = sorted((r1 * x, r2 * x))
    assert sensitivity_frontal(lay, lo).dx_de <= sensitivity_frontal(lay, hi).dx_de
    assert sensitivity_frontal(lay, lo).dy_de >= sensitivity_frontal(lay, hi).dy_de
    assert sensitivity_frontal(lay, hi).dy_de >= 1.0


@settings(max_examples=300, deadline=None)
@given(px=st.floats(-50, 50), py=st.floats(0.05, 60), x=st.floats(0.2, 3.0))
def test_round_trip(px, py, x):
    lay = AnchorLayout(half_baseline=x)
    rp = true_ranges(lay, (px, py))
    pos = triangulate(lay, rp)
    back = true_ranges(lay, pos.as_tuple())
    scale = max(rp.r1, rp.r2)
    assert abs(back.r1 - rp.r1) <= 1e-9 * scale
    assert abs(back.r2 - rp.r2) <= 1e-9 * scale


@settings(max_examples=200, deadline=None)
@given(r1=st.floats(1.0, 80.0), r2=st.floats(1.0, 80.0))
def test_mirror_symmetry(r1, r2):
    lay = AnchorLayout()
    try:
        a = triangulate(lay, RangePair(r1, r2))
    except Infeasible:
        with pytest.raises(Infeasible):
            triangulate(lay, RangePair(r2, r1))
        return
    b = triangulate(lay, RangePair(r2, r1))
    assert b.x_k == -a.x_k
    assert b.y_k == a.y_k


def test_resolve_side():
    cand = TagPosition(1.0, 5.0)
    aux = (0.0, 2.0)
    rear_range = math.hypot(1.0, -5.0 - 2.0)
    front_range = math.hypot(1.0, 5.0 - 2.0)
    assert resolve_side(cand, rear_range, aux) == TagPosition(1.0, -5.0)
    assert resolve_side(cand, front_range, aux) == TagPosition(1.0, 5.0)
    with pytest.raises(Ambiguous):
        resolve_side(cand, 3.0, (0.0, 0.0))
    # a range halfway between both mirror distances fits neither better
    with pytest.raises(Ambiguous):
        resolve_side(cand, (rear_range + front_range) / 2, aux)
    assert resolve_side(TagPosition(2.0, 0.0), 1.0, aux) == TagPosition(2.0, 0.0)


def test_bearing():
    assert bearing_deg((0, 10)) == 0.0
    assert bearing_deg((10, 0)) == 90.0
    assert bearing_deg((-10, 0)) == 90.0
    assert bearing_deg((0, -10)) == 180.0


@pytest.mark.parametrize("point, status", [
    ((0.0, 10.0), CoverageStatus.BOTH_ANCHORS),
    ((0.0, 49.9), CoverageStatus.BOTH_ANCHORS),
    ((0.0, 50.1), CoverageStatus.NONE),
    ((20.0, 5.0), CoverageStatus.ONE_ANCHOR),     # ~76 deg off axis
    ((-20.0, 5.0), CoverageStatus.ONE_ANCHOR),
    ((0.0, -20.0), CoverageStatus.NONE),          # behind the mirrors
    ((3.0, -3.0), CoverageStatus.BOTH_ANCHORS),   # close side band
    ((30.0, 1.0), CoverageStatus.ONE_ANCHOR),
    ((20.0, -5.0), CoverageStatus.NONE),
])
def test_coverage_examples(point, status):
    assert coverage(AnchorLayout(), point) is status


@settings(max_examples=200, deadline=None)
@given(px=st.floats(-70, 70), py=st.floats(-70, 70))
def test_coverage_left_right_symmetric(px, py):
    lay = AnchorLayout()
    assert coverage(lay, (px, py)) is coverage(lay, (-px, py))
