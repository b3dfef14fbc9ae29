from __future__ import annotations

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from bgls.domain import (BlockSpec, WeightedDomain, log_measure_scaling, measure_scaling_factor,
                         multi_power, sphere_area)


@pytest.mark.parametrize("dim, want", [(1, 2.0), (2, 2 * math.pi), (3, 4 * math.pi),
                                       (4, 2 * math.pi ** 2)])
def test_sphere_area(dim, want):
    assert sphere_area(dim) == pytest.approx(want, rel=1e-15)


def test_ball_measure_of_power_block_against_mpmath():
    block = BlockSpec(dim=1, theta=1.5, profile="power", coef=2.0)
    want = float(mp.quad(lambda x: 2 * x ** mp.mpf(1.5), [0, 3]))
    assert block.ball_measure(3.0) == pytest.approx(want, rel=1e-13)
    assert block.radius_for_measure(block.ball_measure(3.0)) == pytest.approx(3.0, rel=1e-12)


def test_custom_weight_angular_mass_against_mpmath():
    # |x|**1 on the positive quadrant of R^2: quarter circle, weight 1 on the sphere
    block = BlockSpec(dim=2, theta=1.0, profile="custom",
                      weight=lambda x: np.linalg.norm(np.atleast_2d(x), axis=-1))
    assert block.angular_mass == pytest.approx(math.pi / 2, rel=1e-12)
    assert block.ball_measure(2.0) == pytest.approx(math.pi / 2 * 2.0 ** 3 / 3, rel=1e-12)


@given(st.lists(st.floats(1e-3, 1e3), min_size=2, max_size=2))
def test_measure_scaling_is_multiplicative(s):
    dom = WeightedDomain((BlockSpec(dim=1), BlockSpec(dim=2, theta=1.0, profile="custom",
                                                      weight=lambda x: np.linalg.norm(np.atleast_2d(x), axis=-1))))
    want = s[0] ** 1.0 * s[1] ** 3.0
    assert measure_scaling_factor(dom, s) == pytest.approx(want, rel=1e-12)
    assert log_measure_scaling(dom, s) == pytest.approx(math.log(want), abs=1e-12)


def test_multi_power_validation():
    assert multi_power([2.0, 3.0], [1.0, 2.0]) == pytest.approx(18.0)
    with pytest.raises(ValueError):
        multi_power([1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        multi_power([0.0], [1.0])


def test_block_validation():
    with pytest.raises(ValueError):
        BlockSpec(dim=0)
    with pytest.raises(ValueError):
        BlockSpec(dim=2, theta=1.0, profile="power")
    with pytest.raises(ValueError):
        BlockSpec(dim=1, theta=1.0)
