from __future__ import annotations

import math

import mpmath as mp
import pytest

from bgls.corpus import canonical_psi
from bgls.criteria import (FOURIER, HILBERT, MAXIMAL, P_ALPHA, Q_BETA,
                           UNBOUNDED_CONSISTENT, HardyDivergence, WeightedDomainError, boundedness,
                           hardy_P, hardy_Q, hardy_norm_probe, probe_parameters, verdict_table)
from bgls.domain import WeightedDomain
from bgls.functions import line_function
from bgls.grand import GrandSpace
from bgls.grid import Interval

mp.mp.dps = 30
PIECES = [(0.0, 1.0, 2.0, -0.2), (1.0, 5.0, 1.0, 0.5), (5.0, math.inf, 3.0, -1.5)]


def _f(x):
    for lo, hi, c, e in PIECES:
        if lo < x < hi:
            return c * x ** e
    return mp.mpf(0)


def _mp_P(alpha, t):
    # t**-alpha int_0^t s**(alpha-1) f(s) ds with s = e**u
    cuts = [mp.log(x) for x in (1.0, 5.0) if x < t]
    g = lambda u: mp.exp(alpha * u) * _f(mp.exp(u))
    return float(t ** -mp.mpf(alpha) * mp.quad(g, [-mp.inf] + cuts + [mp.log(t)]))


def _mp_Q(beta, t):
    cuts = [mp.log(x) for x in (1.0, 5.0) if x > t]
    g = lambda u: mp.exp(beta * u) * _f(mp.exp(u))
    return float(t ** -mp.mpf(beta) * mp.quad(g, [mp.log(t)] + cuts + [mp.inf]))


@pytest.mark.parametrize("t", [0.01, 0.7, 3.0, 40.0])
def test_hardy_values_against_mpmath(t):
    f = line_function(*PIECES)
    assert hardy_P(f, 0.6, t) == pytest.approx(_mp_P(0.6, t), rel=1e-11)
    assert hardy_Q(f, 0.3, t) == pytest.approx(_mp_Q(0.3, t), rel=1e-11)


def test_hardy_divergence():
    f = line_function((0.0, 1.0, 1.0, -0.9))
    with pytest.raises(HardyDivergence):
        hardy_P(f, 0.5, 2.0)
    with pytest.raises(WeightedDomainError):
        hardy_P(line_function((0.0, 1.0, 1.0, 0.0), domain=WeightedDomain.power_line(1.0)), 0.5, 2.0)


def test_rules():
    iv = Interval(2.0, 4.0)
    assert boundedness(P_ALPHA, iv, {"alpha": 0.6}).bounded
    assert not boundedness(P_ALPHA, iv, {"alpha": 0.5}).bounded  # boundary counts as unbounded
    assert boundedness(Q_BETA, iv, {"beta": 0.2}).bounded
    assert not boundedness(Q_BETA, iv, {"beta": 0.25}).bounded
    assert boundedness(MAXIMAL, iv).bounded
    assert not boundedness(MAXIMAL, Interval(1.0, 4.0)).bounded
    assert boundedness(HILBERT, iv).bounded
    assert not boundedness(FOURIER, Interval(2.0, math.inf)).bounded
    assert not boundedness(Q_BETA, Interval(2.0, math.inf), {"beta": 0.1}).bounded
    assert len(verdict_table(iv, 0.6, 0.2)) == 5


def test_rule_argument_errors():
    iv = Interval(2.0, 4.0)
    with pytest.raises(ValueError):
        boundedness(P_ALPHA, iv, {"alpha": 1.5})
    with pytest.raises(ValueError):
        boundedness(P_ALPHA, iv)
    with pytest.raises(ValueError):
        boundedness(MAXIMAL, iv, {"alpha": 0.5})
    with pytest.raises(ValueError):
        boundedness("nope", iv)


def test_probe_parameters_straddle_the_rule():
    params = probe_parameters(Interval(2.0, 4.0))
    assert params[P_ALPHA] == (0.25, 0.75)
    assert params[Q_BETA] == (0.375, 0.125)


# the bounded side of the probe runs in the acceptance suite
@pytest.mark.parametrize("op, param, flag", [(P_ALPHA, 0.25, UNBOUNDED_CONSISTENT),
                                              (Q_BETA, 0.375, UNBOUNDED_CONSISTENT)])
def test_probe_flags_unbounded_side(op, param, flag):
    iv = Interval(2.0, 4.0)
    rep = hardy_norm_probe(op, GrandSpace(WeightedDomain.lebesgue(1), canonical_psi(iv)), param)
    assert rep.flag == flag
