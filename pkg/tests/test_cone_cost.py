import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fdivmetric import Matusita, MarginalPerspective, PowerLike, Tabulated
from fdivmetric import cone_cost as cc
from fdivmetric.metric_check import check_costless_triangle

GRID = [0.1, 0.5, 1.0, 2.0, 7.0]


# ---------------------------------------------------------------- metric spaces


def test_metric_space_validation():
    with pytest.raises(cc.MetricSpaceError):
        cc.FiniteMetricSpace([[0, 1], [2, 0]])  # not symmetric
    with pytest.raises(cc.MetricSpaceError):
        cc.FiniteMetricSpace([[1, 1], [1, 0]])  # nonzero diagonal
    with pytest.raises(cc.MetricSpaceError):
        cc.FiniteMetricSpace([[0, 0], [0, 0]])  # distinct points at distance 0
    with pytest.raises(cc.MetricSpaceError):
        cc.FiniteMetricSpace([[0, 1, 5], [1, 0, 1], [5, 1, 0]])  # triangle
    with pytest.raises(cc.MetricSpaceError):
        cc.FiniteMetricSpace([[0, 1, 1]])
    X = cc.FiniteMetricSpace.path(3)
    assert X.n == 3 and float(X.d[0, 2]) == 2.0
    with pytest.raises(ValueError):
        X.d[0, 1] = 5.0


def test_metric_space_constructors(tmp_path):
    X = cc.FiniteMetricSpace.euclidean([[0, 0], [3, 4]])
    assert float(X.d[0, 1]) == 5.0
    assert cc.FiniteMetricSpace.single().n == 1
    assert float(X.scaled(2.0).d[1, 0]) == 10.0
    f = tmp_path / "d.csv"
    f.write_text("# distances\n0,2\n2,0\n")
    np.testing.assert_array_equal(cc.FiniteMetricSpace.load_csv(f).d, [[0, 2], [2, 0]])
    f.write_text("0,2\n3,0\n")
    with pytest.raises(cc.MetricSpaceError):
        cc.FiniteMetricSpace.load_csv(f)


def test_cone_point_apex_identification():
    assert cc.ConePoint(0, 0.0) == cc.ConePoint(3, 0.0)
    assert cc.ConePoint(0, 1.0) != cc.ConePoint(3, 1.0)
    assert len({cc.ConePoint(0, 0.0), cc.ConePoint(5, 0.0), cc.ConePoint(1, 2.0)}) == 2


# ---------------------------------------------------------------- H_c


def test_primal_examples():
    for p in (0.0, 1.0, 2.0):
        assert cc.h_cost_primal(PowerLike(p), 0.0, 2.5, 2.5) == pytest.approx(0.0, abs=1e-12)
    assert cc.h_cost_primal(PowerLike(1.0), 2.0, 1.0, 1.0) == pytest.approx(2 * (1 - math.exp(-1)), rel=1e-10)
    assert cc.h_cost_primal(PowerLike(1.0), math.inf, 2.0, 3.0) == 5.0
    assert cc.h_cost_primal(Matusita(0.5), math.inf, 2.0, 3.0) == 5.0


def test_dual_examples():
    assert cc.h_cost_dual(PowerLike(1.0), 3.0, 0.0, 0.0) == 0.0
    assert cc.h_cost_dual(PowerLike(1.0), 0.0, 1.0, 4.0) == pytest.approx(1.0, rel=1e-7)
    assert cc.h_cost_dual(PowerLike(2.0), 1.0, 1.0, 1.0) == pytest.approx(
        cc.h_cost_primal(PowerLike(2.0), 1.0, 1.0, 1.0), rel=1e-7)


@pytest.mark.parametrize("p", [0.0, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("c", [0.0, 0.5, 1.0, 4.0])
def test_primal_equals_dual(p, c):
    F = PowerLike(p)
    for r1, r2 in itertools.product(GRID, GRID):
        a = cc.h_cost_primal(F, c, r1, r2)
        b = cc.h_cost_dual(F, c, r1, r2)
        assert abs(a - b) <= cc.TOL_DUAL * (1 + abs(a))


@pytest.mark.parametrize("p", [-1.0, 0.0, 0.5, 1.0, 2.0, 3.0])
@pytest.mark.parametrize("d", [0.0, 0.3, 1.0, 2.0, 10.0])
def test_closed_form_equals_oracle(p, d):
    F = PowerLike(p)
    for r, t in itertools.product(GRID, GRID):
        closed = cc.h_p_cone(p, d, r, t)
        num = cc.h_cost_primal(F, d * d, r, t)
        assert closed == pytest.approx(num, rel=1e-7, abs=1e-12)


def test_closed_form_reduces_to_costless():
    for p in (-1.0, 0.0, 0.5, 1.0, 2.0):
        H = MarginalPerspective(PowerLike(p))
        for r, t in itertools.product(GRID, GRID):
            assert cc.h_p_cone(p, 0.0, r, t) == pytest.approx(H(r, t), rel=1e-10, abs=1e-14)


def test_h_p_cone_examples():
    assert cc.h_p_cone(1.0, 0.0, 1.0, 4.0) == pytest.approx(1.0)
    assert cc.h_p_cone(0.0, 1.0, 0.0, 1.0) == pytest.approx(math.log(3.0))
    r, t = 0.7, 2.9
    assert cc.h_p_cone(2.0, 0.0, r, t) == pytest.approx((r - t) ** 2 / (2 * (r + t)))
    # p > 1 and a large distance: the clamped factor vanishes, leaving (2/p) M_1(r, t)
    assert cc.h_p_cone(2.0, 10.0, r, t) == pytest.approx(0.5 * (r + t))
    assert cc.h_p_cone(3.0, 10.0, r, t) == pytest.approx((2 / 3) * 0.5 * (r + t))


def test_h_cost_array_matches_scalar():
    r = np.array([0.5, 1.0, 3.0])
    t = np.array([2.0, 1.0, 0.0])
    c = np.array([0.0, 1.0, np.inf])
    got = cc.h_cost_array(PowerLike(1.0), c, r, t)
    want = [cc.h_cost_primal(PowerLike(1.0), ci, ri, ti) for ci, ri, ti in zip(c, r, t)]
    np.testing.assert_allclose(got, want, rtol=1e-9)
    got = cc.h_cost_array(Matusita(0.5), c, r, t)
    want = [cc.h_cost_primal(Matusita(0.5), ci, ri, ti) for ci, ri, ti in zip(c, r, t)]
    np.testing.assert_allclose(got, want, rtol=1e-9)


def test_degenerate_entropy_gives_zero():
    F = Tabulated((0.0, 1.0, 2.0), (0.0, 0.0, 1.0))
    for r, t in itertools.product(GRID, GRID):
        assert cc.h_cost_primal(F, 0.0, r, t) == pytest.approx(0.0, abs=1e-12)


def test_identity_of_indiscernibles():
    # strict-minimum entropy: zero only when radii and points coincide (or both radii vanish)
    for p in (0.0, 1.0, 2.0):
        for d, r, t in itertools.product([0.0, 0.5, 2.0], [0.0, 1.0, 3.0], [0.0, 1.0, 3.0]):
            val = cc.h_p_cone(p, d, r, t)
            same = (r == 0 and t == 0) or (r == t and d == 0)
            assert (val <= 1e-14) == same


@pytest.mark.parametrize("p", [0.0, 1.0, 2.0])
def test_monotone_and_concave_in_cost(p):
    c = np.linspace(0.0, 6.0, 61)
    v = np.array([cc.h_cost_primal(PowerLike(p), ci, 1.0, 3.0) for ci in c])
    assert np.all(np.diff(v) >= -1e-12)
    assert np.all(np.diff(v, 2) <= 1e-10)


# ---------------------------------------------------------------- transforms


def test_cone_metric_examples():
    assert cc.cone_metric(1.3, 0.0, 0.0) == 0.0
    assert cc.cone_metric(0.0, 1.0, 3.0) == pytest.approx(2.0)
    assert cc.cone_metric(math.pi, 1.0, 1.0) == pytest.approx(2.0)
    assert cc.cone_metric(10.0, 1.0, 1.0) == pytest.approx(2.0)


def test_h_bar_examples():
    assert cc.h_bar_p(1.0, math.pi, 1.0, 3.0) == pytest.approx(2.0)
    assert cc.h_bar_p(2.0, 0.0, 3.0, 3.0) == pytest.approx(0.0, abs=1e-15)
    for ang, r, t in itertools.product([0.1, 1.0, math.pi / 2, 3.0], GRID, GRID):
        want = 0.5 * cc.cone_metric(min(ang, math.pi / 2), math.sqrt(r), math.sqrt(t)) ** 2
        assert cc.h_bar_p(1.0, ang, r, t) == pytest.approx(want, rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0])
def test_h_bar_relation(p):
    d = np.linspace(0.0, 3.0, 31)
    for r, t in itertools.product(GRID, GRID):
        lhs = 0.5 * p * cc.h_p_cone(p, d, r, t)
        rhs = cc.h_bar_p(p, cc.f_p(p, d), r, t)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-10, atol=1e-13)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_sqrt_h_bar_nondecreasing_in_distance(p):
    d = np.linspace(0.0, 5.0, 501)
    for r, t in itertools.product(GRID, GRID):
        assert np.all(np.diff(np.sqrt(cc.h_bar_p(p, cc.f_p(p, d), r, t))) >= -1e-14)


def test_theta_p():
    assert cc.theta_p(2.0, 3.0, 3.0) == pytest.approx(1.0)
    assert cc.theta_p(2.0, 1.0, 4.0) == pytest.approx(0.8)
    u = np.linspace(0.01, 0.99, 99)
    for p in (1.5, 2.0, 3.0):
        assert np.all(np.diff(cc.theta_p(p, u, np.ones_like(u))) > 0)


# ---------------------------------------------------------------- triangle audits


def test_cone_triangle_planar_hellinger():
    pts = np.random.default_rng(0x5EED).uniform(size=(5, 2))
    rep = cc.check_cone_triangle(1.0, cc.FiniteMetricSpace.euclidean(pts), samples=10_000)
    assert rep.passed and rep.tested_count > 60_000


def test_cone_triangle_single_point_reduces_to_costless():
    rep = cc.check_cone_triangle(2.0, cc.FiniteMetricSpace.single(), samples=2000)
    assert rep.passed
    assert check_costless_triangle(MarginalPerspective(PowerLike(2.0)), 0.5).passed


def test_cone_triangle_path_stress():
    rep = cc.check_cone_triangle(3.0, cc.FiniteMetricSpace.path(3), samples=2000)
    assert rep.passed


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 5.0])
def test_cone_triangle_bundled_space(p):
    from fdivmetric.cli import bundled

    X = cc.FiniteMetricSpace.load_csv(bundled("planar5.csv"))
    assert cc.check_cone_triangle(p, X, samples=3000).passed


def test_cone_triangle_rejects_small_p():
    with pytest.raises(ValueError):
        cc.check_cone_triangle(0.5, cc.FiniteMetricSpace.single())


@pytest.mark.parametrize(
    "p,margin",
    [(-1.0, 0.7678771281645327), (0.0, 0.21559246281050737), (0.25, 0.16161305448528884),
     (0.5, 0.09544511501033215), (0.75, 0.05461738092626889)],
)
def test_counterexamples(p, margin):
    cx = cc.counterexample_p_below_one(p)
    assert cx["schema"] == 1
    assert cx["margin"] == pytest.approx(margin, rel=1e-9)
    lhs, rhs, m = cc._triangle_margin(p, cx["r"], cx["s"], cx["t"], cx["d12"], cx["d23"], cx["d13"])
    assert m == pytest.approx(cx["margin"]) and m > 0
    assert cx["d13"] <= cx["d12"] + cx["d23"] + 1e-15


def test_counterexample_p_zero_closed_margin():
    assert cc.counterexample_p_below_one(0.0)["margin"] == pytest.approx(math.sqrt(math.log(3)) - math.sqrt(math.log(2)))
    with pytest.raises(ValueError):
        cc.counterexample_p_below_one(1.0)


@pytest.mark.parametrize("p", [1.2, 1.5, 2.0, 3.0, 4.0])
def test_final_inequality(p):
    ok, info = cc.final_inequality_check(p)
    assert ok
    assert info["sup_lhs"] <= info["reference_sup"] * (1 + 1e-9)
    assert info["sup_lhs"] == pytest.approx(info["reference_sup"], rel=1e-3)


def test_final_inequality_large_p_reference_exceeded():
    # the inequality holds, but the supremum of the left side is above 4/(p-1) for large p
    ok, info = cc.final_inequality_check(5.0)
    assert ok
    assert info["sup_lhs"] == pytest.approx(1.181123675599412, rel=1e-9)
    with pytest.raises(ValueError):
        cc.final_inequality_check(1.0)


@given(
    p=st.sampled_from([1.0, 1.5, 2.0, 3.0]),
    d=st.lists(st.floats(min_value=0.0, max_value=4.0), min_size=2, max_size=2),
    r=st.lists(st.floats(min_value=0.0, max_value=100.0), min_size=3, max_size=3),
)
def test_cone_triangle_property(p, d, r):
    d12, d23 = d
    d13 = d12 + d23
    lhs = math.sqrt(cc.h_p_cone(p, d13, r[0], r[2]))
    rhs = math.sqrt(cc.h_p_cone(p, d12, r[0], r[1])) + math.sqrt(cc.h_p_cone(p, d23, r[1], r[2]))
    assert lhs <= rhs + 1e-9 * (1 + rhs)


@given(
    p=st.sampled_from([-1.0, 0.0, 0.5, 1.0, 2.0]),
    lam=st.floats(min_value=1e-3, max_value=1e3),
    d=st.floats(min_value=0.0, max_value=5.0),
    r=st.floats(min_value=0.0, max_value=10.0),
    t=st.floats(min_value=0.0, max_value=10.0),
)
def test_h_p_cone_symmetric_and_homogeneous(p, lam, d, r, t):
    a = cc.h_p_cone(p, d, r, t)
    assert cc.h_p_cone(p, d, t, r) == pytest.approx(a, rel=1e-12, abs=1e-12)
    assert cc.h_p_cone(p, d, lam * r, lam * t) == pytest.approx(lam * a, rel=1e-9, abs=1e-12 * lam * (1 + r + t))
