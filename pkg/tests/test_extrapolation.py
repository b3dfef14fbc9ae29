from __future__ import annotations

import math

import numpy as np
import pytest

from bgls.extrapolation import aitken, limit_of_slopes, richardson_limit, tail_fit, two_point_slopes


def test_two_point_slopes_of_a_line():
    slopes, mid = two_point_slopes([0.0, 1.0, 3.0], [1.0, 3.0, 7.0])
    np.testing.assert_allclose(slopes, [2.0, 2.0])
    np.testing.assert_allclose(mid, [0.5, 2.0])


def test_richardson_removes_polynomial_error():
    h = 1.0 / np.arange(5, 10)
    vals = 0.3 + 2.0 * h - 5.0 * h ** 2
    assert richardson_limit(h, vals) == pytest.approx(0.3, abs=1e-12)


def test_limit_of_slopes_beats_raw_ratio():
    # y = c x + log x has slope c + 1/x and ratio c + log(x)/x
    x = 2.0 * math.log(10.0) * np.arange(1, 13)
    y = 0.25 * x + np.log(x) + 1.0
    assert limit_of_slopes(x, y) == pytest.approx(0.25, abs=1e-3)
    assert abs(y[-1] / x[-1] - 0.25) > 1e-2


def test_aitken_on_geometric_partial_sums():
    partial = np.cumsum(0.5 ** np.arange(6))
    assert aitken(partial) == pytest.approx(2.0, rel=1e-14)
    assert aitken([1.0, 1.0, 1.0]) == 1.0


def test_nonfinite_samples_give_nan():
    assert math.isnan(richardson_limit([0.1, 0.2, 0.3], [1.0, math.inf, 2.0]))


def test_tail_fit():
    slope, rms = tail_fit(np.arange(6.0), 3.0 * np.arange(6.0) - 1.0)
    assert slope == pytest.approx(3.0)
    assert rms == pytest.approx(0.0, abs=1e-12)
