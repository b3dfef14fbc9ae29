from __future__ import annotations

import math

import numpy as np
import pytest

from bgls.grid import Interval
from bgls.parse import (SpecError, parse_blocks, parse_config, parse_function, parse_interval,
                        parse_matrix, parse_psi)

IV = Interval(2.0, 4.0)


def test_interval():
    assert parse_interval("2, inf") == Interval(2.0, math.inf)
    with pytest.raises(SpecError):
        parse_interval("4,2")


@pytest.mark.parametrize("text, col", [("powr(1,0,0)", 1), ("power(1,0 0)", 11), ("const(-1)", 1),
                                       ("canonical x", 11), ("prod(canonical,)", 16)])
def test_psi_errors_carry_column(text, col):
    with pytest.raises(SpecError) as info:
        parse_psi(text, IV)
    assert (info.value.line, info.value.column) == (1, col)


def test_psi_forms_evaluate():
    assert parse_psi("const(2)", IV)(3.0) == pytest.approx(2.0)
    assert parse_psi("power(1, 1, 0)", IV)(3.0) == pytest.approx(1.0)
    prod = parse_psi("prod(canonical, const(3))", IV)
    assert prod(3.0) == pytest.approx(3.0 * parse_psi("canonical", IV)(3.0))
    rep = parse_psi("rep(factor(piece(0,1,1,-0.25), piece(1,inf,1,-0.5)))", IV)
    assert rep(3.0) == pytest.approx(parse_psi("canonical", IV)(3.0), rel=1e-10)


def test_function_factor_count_must_match_blocks():
    dom = parse_blocks("1;1")
    f = parse_function("factor(piece(0,1,1,0)), factor(piece(0,2,1,0))", dom)
    assert f.domain.k == 2
    with pytest.raises(SpecError):
        parse_function("factor(piece(0,1,1,0))", dom)


def test_blocks_and_matrix():
    dom = parse_blocks("1:0; 2:1")
    assert [b.dim for b in dom.blocks] == [1, 2]
    assert dom.blocks[1].theta == 1.0
    with pytest.raises(SpecError):
        parse_blocks("1.5")
    np.testing.assert_array_equal(parse_matrix("1,2,3,4"), [[1.0, 2.0], [3.0, 4.0]])
    with pytest.raises(SpecError):
        parse_matrix("1,2,3")


def test_config_lines():
    cfg = parse_config("# header\ninterval = 2,4\n\nlevels = 6  # trailing\n")
    assert cfg == {"interval": "2,4", "levels": "6"}
    with pytest.raises(SpecError) as info:
        parse_config("interval = 2,4\n  oops\n")
    assert (info.value.line, info.value.column) == (2, 3)
