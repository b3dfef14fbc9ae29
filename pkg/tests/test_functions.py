from __future__ import annotations

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bgls.corpus import canonical_representation, random_power_function
from bgls.domain import WeightedDomain
from bgls.functions import (PowerPiece, add_line_functions, indicator, line_function, log_lp_norms,
                            lp_norm, scale_arg, transplant, truncate)
from bgls.grid import Interval

mp.mp.dps = 30


def _mp_norm(pieces, p, theta=0.0):
    """``(int sum_j c_j x**e_j 1_(lo_j, hi_j) ^p x**theta dx)^(1/p)`` by mpmath, piece by piece."""
    edges = sorted({e for lo, hi, _, _ in pieces for e in (lo, hi)})
    total = mp.mpf(0)
    for a, b in zip(edges, edges[1:]):
        live = [(c, e) for lo, hi, c, e in pieces if lo <= a and b <= hi]
        if live:
            # x = e**t tames the power singularities at 0 and infinity
            g = lambda t: sum(c * mp.exp(e * t) for c, e in live) ** p * mp.exp((theta + 1) * t)
            total += mp.quad(g, [mp.log(a) if a > 0 else -mp.inf, mp.log(b) if b < math.inf else mp.inf])
    return float(total ** (mp.mpf(1) / p))


@pytest.mark.parametrize("p", [2.5, 3.0, 3.7])
def test_analytic_norm_against_mpmath(p):
    pieces = [(0.0, 1.0, 2.0, -0.2), (1.0, 3.0, 0.5, 1.5), (3.0, math.inf, 4.0, -1.0)]
    f = line_function(*pieces)
    assert lp_norm(f, p).value == pytest.approx(_mp_norm(pieces, p), rel=1e-12)


def test_weighted_line_norm_against_mpmath():
    pieces = [(0.0, 2.0, 1.0, 0.3), (2.0, math.inf, 3.0, -2.0)]
    f = line_function(*pieces, domain=WeightedDomain.power_line(1.0))
    assert lp_norm(f, 2.2).value == pytest.approx(_mp_norm(pieces, 2.2, theta=1.0), rel=1e-12)


@pytest.mark.parametrize("p", [2.1, 3.0, 3.9])
def test_sum_of_overlapping_pieces_against_mpmath(p):
    f_pieces = [(0.0, 2.0, 1.0, -0.1), (2.0, math.inf, 1.0, -0.9)]
    g_pieces = [(0.0, 0.5, 3.0, 0.4), (0.5, math.inf, 0.7, -0.6)]
    h = add_line_functions(line_function(*f_pieces), line_function(*g_pieces))
    got = lp_norm(h, p)
    assert got.method == "quadrature"
    assert got.value == pytest.approx(_mp_norm(f_pieces + g_pieces, p), rel=1e-9)


def test_divergent_norm_is_infinite():
    f = line_function((0.0, 1.0, 1.0, -0.5))
    assert lp_norm(f, 2.0).value == math.inf
    assert lp_norm(f, 1.5).value < math.inf


def test_log_head_moments_against_gamma():
    # canonical b = inf head: 0.05 log(1/x)**3 on (0, 1), tail x**-1/a on (1, inf)
    f = canonical_representation(Interval(2.0, math.inf))
    for p in (2.5, 7.0, 40.0, 1e3):
        head = mp.mpf("0.05") ** p * mp.gamma(3 * p + 1)
        tail = 1 / (mp.mpf(p) / 2 - 1)
        want = float(mp.log(head + tail) / p)
        assert lp_norm(f, p).log_value == pytest.approx(want, rel=1e-11)


def test_vectorised_norms_match_scalar():
    f = canonical_representation(Interval(1.0, 3.0))
    ps = np.array([1.2, 2.0, 2.9])
    vec = log_lp_norms(f, ps)
    for p, v in zip(ps, vec):
        assert v == pytest.approx(lp_norm(f, float(p)).log_value, rel=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(1e-3, 1e3), st.floats(0.0, 1.0))
def test_homogeneity(seed, c, u):
    iv = Interval(2.0, 4.0)
    f = random_power_function(np.random.default_rng(seed), iv)
    p = float(iv.p_of_u(0.05 + 0.9 * u))
    assert lp_norm(f.scaled_by(c), p).value == pytest.approx(c * lp_norm(f, p).value, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(1e-2, 1e2), st.floats(0.0, 1.0))
def test_dilation_scales_by_measure(seed, s, u):
    # |f(./s)|_p = s**(1/p) |f|_p on the line
    iv = Interval(1.0, 3.0)
    f = random_power_function(np.random.default_rng(seed), iv)
    p = float(iv.p_of_u(0.05 + 0.9 * u))
    got = lp_norm(scale_arg(f, [s]), p).log_value
    assert got == pytest.approx(lp_norm(f, p).log_value + math.log(s) / p, abs=1e-12)


def test_indicator_norm_is_measure_power():
    for dom in (WeightedDomain.lebesgue(1), WeightedDomain.power_line(1.0), WeightedDomain.lebesgue(1, 2)):
        f = indicator(dom, 0.3)
        assert lp_norm(f, 2.5).value == pytest.approx(0.3 ** (1 / 2.5), rel=1e-12)


def test_transplant_preserves_norms():
    f = canonical_representation(Interval(2.0, 4.0))
    g = transplant(f, WeightedDomain.lebesgue(3))
    for p in (2.3, 3.1, 3.8):
        assert lp_norm(g, p).value == pytest.approx(lp_norm(f, p).value, rel=1e-12)


def test_truncations_increase():
    f = canonical_representation(Interval(2.0, 4.0))
    vals = [lp_norm(truncate(f, n), 3.0).value for n in (1, 4, 16, 256)]
    assert all(x < y for x, y in zip(vals, vals[1:]))
    assert vals[-1] < lp_norm(f, 3.0).value


def test_piece_validation():
    with pytest.raises(ValueError):
        PowerPiece(1.0, 1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        PowerPiece(0.0, 1.0, -1.0, 0.0)
    with pytest.raises(ValueError):
        lp_norm(line_function((0.0, 1.0, 1.0, 0.0)), 0.5)
