import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fdivmetric.power_means import power_mean


def test_examples():
    assert power_mean(1.0, 1.0, 3.0) == 2.0
    assert power_mean(0.0, 4.0, 9.0) == pytest.approx(6.0, rel=1e-15)
    assert power_mean(-1.0, 0.0, 5.0) == 0.0
    assert power_mean(-3.0, 2.0, 2.0) == pytest.approx(2.0, rel=1e-15)
    assert power_mean(-1.0, 1.0, 4.0) == pytest.approx(1.6, rel=1e-15)
    assert power_mean(-math.inf, 2.0, 7.0) == 2.0
    assert power_mean(math.inf, 2.0, 7.0) == 7.0


def test_continuity_at_zero():
    r, t = 0.7, 5.3
    g = math.sqrt(r * t)
    for p in (1e-5, -1e-5, 1e-7, -1e-7):
        assert power_mean(p, r, t) == pytest.approx(g, rel=1e-4)


def test_positive_order_with_zero():
    assert power_mean(2.0, 0.0, 2.0) == pytest.approx(math.sqrt(2.0))
    assert power_mean(0.0, 0.0, 2.0) == 0.0


def test_vectorised():
    r = np.array([1.0, 4.0, 0.0])
    t = np.array([3.0, 9.0, 5.0])
    np.testing.assert_allclose(power_mean(0.0, r, t), [math.sqrt(3.0), 6.0, 0.0])


val = st.floats(min_value=0.0, max_value=1e3, allow_nan=False)
order = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False)


@given(p=order, r=val, t=val)
def test_symmetric_and_between(p, r, t):
    m = power_mean(p, r, t)
    assert m == pytest.approx(power_mean(p, t, r), rel=1e-12, abs=1e-300)
    assert min(r, t) * (1 - 1e-12) <= m <= max(r, t) * (1 + 1e-12)


@given(p=order, r=val, t=val, lam=st.floats(min_value=1e-3, max_value=1e3))
def test_homogeneous(p, r, t, lam):
    assert power_mean(p, lam * r, lam * t) == pytest.approx(lam * power_mean(p, r, t), rel=1e-9, abs=1e-300)


@given(p=order, q=order, r=st.floats(min_value=1e-3, max_value=1e3), t=st.floats(min_value=1e-3, max_value=1e3))
def test_monotone_in_order(p, q, r, t):
    lo, hi = sorted((p, q))
    assert power_mean(lo, r, t) <= power_mean(hi, r, t) * (1 + 1e-12)
