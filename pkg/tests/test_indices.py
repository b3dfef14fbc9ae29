from __future__ import annotations

import math

import pytest

from bgls.corpus import canonical_psi
from bgls.dilation import MissingRepresentation
from bgls.domain import BlockSpec, WeightedDomain
from bgls.grand import GrandSpace
from bgls.grid import Interval
from bgls.indices import (LOWER, UPPER, associate_boyd, boyd_closed_form, boyd_index, boyd_report,
                          sandwich_report, shimogaki_M, shimogaki_indices)
from bgls.psi import constant_psi, power_psi

LINE = WeightedDomain.lebesgue(1)


@pytest.mark.parametrize("ab", [(2.0, 4.0), (1.0, 3.0), (1.5, math.inf)])
def test_boyd_indices_on_the_line(ab):
    iv = Interval(*ab)
    psi = canonical_psi(iv)
    up, lo = boyd_closed_form(iv, LINE, 0)
    assert boyd_index(psi, constant_psi(iv), LINE, 0, UPPER) == pytest.approx(up, rel=0.01)
    assert boyd_index(psi, constant_psi(iv), LINE, 0, LOWER) == pytest.approx(lo, abs=0.01 * up)


def test_boyd_report_per_block():
    iv = Interval(2.0, 4.0)
    dom = WeightedDomain((BlockSpec(dim=1), BlockSpec(dim=1, theta=1.0, profile="power")))
    rep = boyd_report(canonical_psi(iv), constant_psi(iv), dom)
    assert rep.closed_form == (0.5, 0.25, 1.0, 0.5)
    assert rep.max_rel_error() < 0.01


def test_boyd_needs_a_representation():
    iv = Interval(2.0, 4.0)
    with pytest.raises(MissingRepresentation):
        boyd_index(power_psi(iv, 1.0, 1.0, 1.0), constant_psi(iv), LINE, 0, UPPER)
    with pytest.raises(IndexError):
        boyd_index(canonical_psi(iv), constant_psi(iv), LINE, 1, UPPER)


def test_shimogaki_M_at_one_is_one():
    space = GrandSpace(LINE, canonical_psi(Interval(2.0, 4.0)))
    assert shimogaki_M(space, 1.0) == pytest.approx(1.0, rel=1e-9)


def test_shimogaki_and_sandwich():
    space = GrandSpace(LINE, canonical_psi(Interval(2.0, 4.0)))
    sh = shimogaki_indices(space)
    assert 0.25 * 0.98 - 1e-3 <= sh.beta_minus <= sh.beta_plus <= 0.5 * 1.02 + 1e-3
    rep = sandwich_report(space, shimogaki=sh)
    assert rep.holds
    assert rep.boyd_upper == pytest.approx(0.5, rel=0.01)


def test_associate_boyd():
    assert associate_boyd(Interval(2.0, 4.0)) == (0.75, 0.5)
    assert associate_boyd(Interval(2.0, math.inf)) == (1.0, 0.5)
