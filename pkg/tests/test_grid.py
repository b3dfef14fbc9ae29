from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bgls.grid import Interval, sup_over_p, u_grid


def test_interval_rejects_bad_endpoints():
    with pytest.raises(ValueError):
        Interval(0.5, 2.0)
    with pytest.raises(ValueError):
        Interval(3.0, 2.0)
    with pytest.raises(ValueError):
        Interval(math.inf, math.inf)


@given(st.floats(1.0, 50.0), st.floats(0.01, 50.0), st.floats(1e-6, 1 - 1e-6))
def test_unit_parameter_round_trip(a, width, u):
    for iv in (Interval(a, a + width), Interval(a, math.inf)):
        p = iv.p_of_u(u)
        assert iv.contains(p)
        assert iv.u_of_p(p) == pytest.approx(u, rel=1e-9, abs=1e-12)


def test_u_grid_is_sorted_and_open():
    u = u_grid()
    assert np.all(np.diff(u) > 0.0)
    assert u[0] > 0.0 and u[-1] < 1.0
    # endpoint clusters reach the finest offset
    assert u[0] == pytest.approx(1e-8)


def test_interior_maximum_is_polished():
    iv = Interval(2.0, 4.0)
    res = sup_over_p(lambda p: -(p - math.pi) ** 2, iv)
    assert res.argmax_p == pytest.approx(math.pi, abs=1e-6)
    assert res.value == pytest.approx(1.0, abs=1e-12)


def test_endpoint_supremum_is_tagged_and_finite():
    # increasing towards b: the supremum is a limit, not attained
    res = sup_over_p(lambda p: np.log(p), Interval(2.0, 4.0))
    assert res.argmax_p == "b-"
    assert res.value == pytest.approx(4.0, rel=1e-6)


def test_power_blow_up_is_reported_infinite():
    iv = Interval(2.0, 4.0)
    res = sup_over_p(lambda p: -0.5 * np.log(p - 2.0), iv)
    assert res.value == math.inf and res.argmax_p == "a+"


def test_all_infinite_and_all_zero():
    iv = Interval(1.0, 3.0)
    assert sup_over_p(lambda p: np.full_like(p, math.inf), iv).value == math.inf
    assert sup_over_p(lambda p: np.full_like(p, -math.inf), iv).value == 0.0


@settings(max_examples=30, deadline=None)
@given(st.floats(-3.0, 3.0), st.floats(2.1, 3.9))
def test_shift_invariance(c, centre):
    iv = Interval(2.0, 4.0)
    base = sup_over_p(lambda p: -(p - centre) ** 2, iv)
    shifted = sup_over_p(lambda p: c - (p - centre) ** 2, iv)
    assert shifted.log_value == pytest.approx(base.log_value + c, abs=1e-12)
