from __future__ import annotations

import math

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from bgls.quadrature import IntegralDiverges, log_integral


@pytest.mark.parametrize("q", [1.0001, 1.01, 1.5, 2.0, 4.0, 10.0])
def test_power_tail_is_exact(q):
    # int_1^inf x**-q dx = 1 / (q - 1)
    res = log_integral(lambda x: x ** -q, 1.0, math.inf, rel_tol=1e-10)
    assert res.value == pytest.approx(1.0 / (q - 1.0), rel=1e-9)


@pytest.mark.parametrize("q", [-0.9999, -0.99, -0.5, 0.0, 3.0])
def test_power_head_is_exact(q):
    res = log_integral(lambda x: x ** q, 0.0, 1.0, rel_tol=1e-10)
    assert res.value == pytest.approx(1.0 / (q + 1.0), rel=1e-9)


def test_log_singularity_against_gamma():
    # int_0^1 log(1/x)**3 x**-0.4 dx = Gamma(4) / 0.6**4
    h = lambda x: math.log(1.0 / x) ** 3 * x ** -0.4
    want = float(mp.gamma(4) / mp.mpf("0.6") ** 4)
    assert log_integral(h, 0.0, 1.0, rel_tol=1e-10).value == pytest.approx(want, rel=1e-9)


def test_smooth_bump_on_half_line_against_mpmath():
    h = lambda x: x ** 2 * math.exp(-x) / (1.0 + x)
    want = float(mp.quad(lambda x: x ** 2 * mp.exp(-x) / (1 + x), [0, 1, mp.inf]))
    assert log_integral(h, 0.0, math.inf, rel_tol=1e-10).value == pytest.approx(want, rel=1e-8)


@pytest.mark.parametrize("lo, hi, h", [
    (0.0, 1.0, lambda x: x ** -1.2),
    (1.0, math.inf, lambda x: x ** -0.8),
])
def test_nonintegrable_endpoint_raises(lo, hi, h):
    with pytest.raises(IntegralDiverges):
        log_integral(h, lo, hi, rel_tol=1e-10)


def test_zero_integrand_gives_minus_infinity():
    assert log_integral(lambda x: 0.0, 0.5, 2.0).log_value == -math.inf


@settings(max_examples=25, deadline=None)
@given(st.floats(-0.95, 3.0), st.floats(0.1, 5.0), st.floats(0.1, 5.0))
def test_finite_power_integrals(q, lo, width):
    hi = lo + width
    want = (hi ** (q + 1.0) - lo ** (q + 1.0)) / (q + 1.0)
    got = log_integral(lambda x: x ** q, lo, hi, rel_tol=1e-11).value
    assert got == pytest.approx(want, rel=1e-9)
