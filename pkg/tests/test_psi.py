from __future__ import annotations

import math

import mpmath as mp
import numpy as np
import pytest

from bgls.corpus import PSI_CORPUS, canonical_psi
from bgls.grid import Interval
from bgls.psi import (PsiDomainError, IntervalMismatch, RepresentationDiverges, classify,
                      constant_psi, from_representation, multiply_psi, power_psi)
from bgls.functions import line_function


@pytest.mark.parametrize("p", [2.2, 3.0, 3.8])
def test_canonical_closed_form_against_mpmath(p):
    iv = Interval(2.0, 4.0)
    q = mp.mpf(p)
    # x = e**t on both halves of the representation
    want = mp.quad(lambda t: mp.exp(t * (q / 4 - 1)), [0, mp.inf]) + \
        mp.quad(lambda t: mp.exp(t * (1 - q / 2)), [0, mp.inf])
    assert canonical_psi(iv)(p) == pytest.approx(float(want ** (1 / mp.mpf(p))), rel=1e-12)


@pytest.mark.parametrize("ab", PSI_CORPUS)
def test_generated_matches_closed_form(ab):
    iv = Interval(*ab)
    ps = iv.p_of_u(np.linspace(0.05, 0.95, 7))
    closed = canonical_psi(iv).log(ps)
    generated = canonical_psi(iv, generated=True).log(ps)
    np.testing.assert_allclose(generated, closed, rtol=1e-10)


@pytest.mark.parametrize("ab", PSI_CORPUS)
def test_canonical_is_in_psi(ab):
    rep = classify(canonical_psi(Interval(*ab)))
    assert rep.in_EPsi and rep.in_Psi
    assert rep.psi_at_a_plus == math.inf and rep.psi_at_b_minus == math.inf
    assert rep.log_convex


def test_constant_is_not_in_epsi():
    rep = classify(constant_psi(Interval(1.0, 3.0), 2.0))
    assert not rep.in_EPsi and not rep.in_Psi
    assert rep.psi_at_b_minus == pytest.approx(2.0)


def test_power_psi_blows_up_only_where_asked():
    iv = Interval(2.0, 4.0)
    rep = classify(power_psi(iv, 1.0, 0.0, 0.5))
    assert rep.psi_at_b_minus == math.inf
    assert rep.psi_at_a_plus == pytest.approx(2.0 ** -0.5, rel=1e-6)


def test_product_and_domain_errors():
    a, b = Interval(2.0, 4.0), Interval(1.0, 3.0)
    with pytest.raises(IntervalMismatch):
        multiply_psi(canonical_psi(a), canonical_psi(b))
    with pytest.raises(PsiDomainError):
        canonical_psi(a)(4.0)
    prod = multiply_psi(canonical_psi(a), constant_psi(a, 3.0))
    assert prod(3.0) == pytest.approx(3.0 * canonical_psi(a)(3.0), rel=1e-14)


def test_representation_must_lie_in_every_lp():
    with pytest.raises(RepresentationDiverges):
        from_representation(line_function((0.0, 1.0, 1.0, -0.4)), Interval(2.0, 4.0))
