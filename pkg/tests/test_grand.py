from __future__ import annotations

import math

import mpmath as mp
import numpy as np
import pytest

from bgls.corpus import canonical_psi, canonical_representation
from bgls.domain import WeightedDomain
from bgls.grand import (GrandSpace, bgls_norm, fatou_check, fundamental_function,
                        fundfn_asymptotic_slope, fundfn_vanishes_at_zero, in_G_o, indicator_norm)
from bgls.functions import line_function, truncate
from bgls.grid import Interval
from bgls.psi import constant_psi

LINE = WeightedDomain.lebesgue(1)
mp.mp.dps = 30


def _space(psi):
    return GrandSpace(LINE, psi)


def _mp_log_phi(a, b, log_delta):
    """``max_p (L/p - log psi(p))`` for the canonical ``psi`` on finite ``(a, b)``, by root finding."""
    a, b, L = mp.mpf(a), mp.mpf(b), mp.mpf(log_delta)
    g = lambda p: L / p - mp.log(b / (b - p) + a / (p - a)) / p
    ps = [a + (b - a) * mp.mpf(k) / 4000 for k in range(1, 4000)]
    k = max(range(len(ps)), key=lambda j: g(ps[j]))
    lo, hi = ps[max(k - 1, 0)], ps[min(k + 1, len(ps) - 1)]
    for _ in range(200):
        m1, m2 = lo + (hi - lo) / 3, hi - (hi - lo) / 3
        lo, hi = (lo, m2) if g(m1) > g(m2) else (m1, hi)
    return float(g((lo + hi) / 2))


@pytest.mark.parametrize("delta", [1e-6, 0.3, 1.0, 7.0, 1e6])
def test_phi_for_constant_psi(delta):
    iv = Interval(1.5, 4.0)
    want = max(delta ** (1 / 1.5), delta ** (1 / 4.0))
    got = fundamental_function(_space(constant_psi(iv)), delta)
    # the sup sits at an open endpoint, resolved to p within a few 1e-8 of it
    assert got.value == pytest.approx(want, rel=1e-7 * max(1.0, abs(math.log(delta))))
    assert got.value <= want


@pytest.mark.parametrize("log_delta", [-20.0, -2.0, 0.5, 3.0, 25.0])
def test_phi_canonical_against_mpmath(log_delta):
    got = fundamental_function(_space(canonical_psi(Interval(2.0, 4.0))), math.exp(log_delta))
    assert got.log_value == pytest.approx(_mp_log_phi(2.0, 4.0, log_delta), abs=1e-9)


def test_phi_is_indicator_norm():
    space = _space(canonical_psi(Interval(1.0, 3.0)))
    for delta in (1e-3, 2.0, 50.0):
        assert indicator_norm(space, delta).value == pytest.approx(
            fundamental_function(space, delta).value, rel=1e-8)


def test_representation_has_unit_norm():
    for ab in ((2.0, 4.0), (1.0, 3.0), (2.0, math.inf)):
        iv = Interval(*ab)
        space = _space(canonical_psi(iv))
        assert bgls_norm(space, canonical_representation(iv)).value == pytest.approx(1.0, rel=1e-8)


def test_fundfn_slopes():
    space = _space(canonical_psi(Interval(2.0, 4.0)))
    assert fundfn_asymptotic_slope(space, "to_infinity") == pytest.approx(0.5, rel=0.01)
    assert fundfn_asymptotic_slope(space, "to_zero") == pytest.approx(0.25, rel=0.01)
    assert fundfn_vanishes_at_zero(space)


def test_norm_is_monotone_and_homogeneous():
    space = _space(canonical_psi(Interval(2.0, 4.0)))
    f = line_function((0.0, 1.0, 1.0, -0.1), (1.0, math.inf, 2.0, -0.8))
    g = line_function((0.0, 1.0, 1.5, -0.1), (1.0, math.inf, 2.0, -0.8))
    nf, ng = bgls_norm(space, f).value, bgls_norm(space, g).value
    assert nf <= ng
    assert bgls_norm(space, f.scaled_by(3.0)).value == pytest.approx(3.0 * nf, rel=1e-10)


def test_G_o_membership():
    iv = Interval(2.0, 4.0)
    space = _space(canonical_psi(iv))
    assert not in_G_o(space, canonical_representation(iv))
    # bounded with bounded support sits in every L_p
    assert in_G_o(space, line_function((0.0, 2.0, 1.0, 0.0)))
    assert in_G_o(space, truncate(canonical_representation(iv), 8))


def test_fatou_truncations_increase_to_the_norm():
    iv = Interval(2.0, 4.0)
    rep = fatou_check(_space(canonical_psi(iv)), canonical_representation(iv), n_max=2 ** 20)
    assert rep.nondecreasing and rep.converged
    assert rep.norms[0] < rep.norms[-1] <= rep.full_norm * (1 + 1e-9)


def test_domain_mismatch_is_rejected():
    space = _space(canonical_psi(Interval(2.0, 4.0)))
    f = canonical_representation(Interval(2.0, 4.0), WeightedDomain.lebesgue(2))
    with pytest.raises(ValueError):
        bgls_norm(space, f)
    with pytest.raises(ValueError):
        fundamental_function(space, 0.0)
