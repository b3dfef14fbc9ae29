from __future__ import annotations

import math

import numpy as np
import pytest

from bgls.corpus import canonical_psi
from bgls.dilation import (EQUALITY_EXPECTED, UPPER_BOUND_ONLY, DilationSpec, SingularMatrix,
                           dilation_norm_closed_form, dilation_norm_empirical, matrix_boyd_limits,
                           matrix_dilation_norm, scaled_orthogonal, truncation_ratios)
from bgls.domain import WeightedDomain
from bgls.grid import Interval
from bgls.psi import IntervalMismatch, constant_psi, power_psi

IV = Interval(2.0, 4.0)
LINE = WeightedDomain.lebesgue(1)


@pytest.mark.parametrize("s", [1e-3, 0.5, 1.0, 3.0, 1e4])
def test_closed_form_with_neutral_nu(s):
    # phi(G(1), s) = max(s**(1/a), s**(1/b)) up to the endpoint resolution
    got = dilation_norm_closed_form(canonical_psi(IV), constant_psi(IV), LINE, [s])
    assert got == pytest.approx(max(s ** 0.5, s ** 0.25), rel=1e-7 * max(1.0, abs(math.log(s))))


@pytest.mark.parametrize("s", [0.01, 0.7, 5.0, 300.0])
def test_representation_attains_the_closed_form(s):
    res = dilation_norm_empirical(canonical_psi(IV), constant_psi(IV), LINE, [s])
    assert res.relation == EQUALITY_EXPECTED
    assert res.rel_gap < 1e-3


def test_product_domain_uses_measure_scaling():
    dom = WeightedDomain.lebesgue(1, 2)
    nu = power_psi(IV, 1.0, 0.0, 0.3)
    closed = dilation_norm_closed_form(canonical_psi(IV), nu, dom, [2.0, 0.5])
    # s1 * s2**2 = 0.5
    assert closed == pytest.approx(dilation_norm_closed_form(canonical_psi(IV), nu, LINE, [0.5]), rel=1e-12)


def test_bank_gives_a_lower_bound_without_representation():
    psi = power_psi(IV, 1.0, 0.5, 0.5)
    res = dilation_norm_empirical(psi, constant_psi(IV), LINE, [4.0])
    assert res.relation == UPPER_BOUND_ONLY
    assert res.empirical_lower <= res.closed_form * (1 + 1e-3)


def test_truncations_approach_from_below():
    r = truncation_ratios(canonical_psi(IV), constant_psi(IV), LINE, [3.0], ns=(1, 4, 64))
    assert np.all(r <= dilation_norm_closed_form(canonical_psi(IV), constant_psi(IV), LINE, [3.0]) * (1 + 1e-6))


@pytest.mark.parametrize("A", [np.diag([2.0, 0.25]), 3.0 * np.array([[0.6, -0.8], [0.8, 0.6]])])
def test_matrix_equality_cases(A):
    res = matrix_dilation_norm(canonical_psi(IV), constant_psi(IV), A)
    assert res.relation == EQUALITY_EXPECTED
    want = max(abs(np.linalg.det(A)) ** 0.5, abs(np.linalg.det(A)) ** 0.25)
    assert res.closed_form == pytest.approx(want, rel=1e-6)
    assert res.rel_gap < 1e-3


def test_weighted_rotation_and_general_matrix():
    U = np.array([[0.0, -1.0], [1.0, 0.0]])
    res = matrix_dilation_norm(canonical_psi(IV), constant_psi(IV), 2.0 * U, sigma=1.0)
    # phi(G(1), s**(d + sigma)) = max(8**(1/2), 8**(1/4))
    assert res.closed_form == pytest.approx(math.sqrt(8.0), rel=1e-6)
    general = matrix_dilation_norm(canonical_psi(IV), constant_psi(IV), [[2.0, 1.0], [0.0, 1.0]], sigma=1.0)
    assert general.relation == UPPER_BOUND_ONLY
    assert general.empirical_lower <= general.closed_form * (1 + 1e-3)


def test_scaled_orthogonal():
    assert scaled_orthogonal(5.0 * np.eye(3)) == pytest.approx(5.0)
    assert scaled_orthogonal(np.diag([1.0, 2.0])) is None


def test_matrix_boyd_limits():
    up, down = matrix_boyd_limits(canonical_psi(IV), constant_psi(IV))
    assert up == pytest.approx(0.5, rel=0.01)
    assert down == pytest.approx(0.25, rel=0.01)


def test_errors():
    with pytest.raises(SingularMatrix):
        DilationSpec.from_matrix([[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(ValueError):
        DilationSpec.vector(1.0, -2.0)
    with pytest.raises(ValueError):
        DilationSpec.from_matrix([[1.0, 2.0, 3.0]])
    with pytest.raises(IntervalMismatch):
        dilation_norm_closed_form(canonical_psi(IV), constant_psi(Interval(1.0, 4.0)), LINE, [2.0])
