"""Limits of slowly converging log-log slopes.

``log phi(s) / log s`` converges like ``1/log s`` with a ``log log s``
correction, which makes the raw ratio useless for percent-level accuracy.  The
two-point slopes of ``log phi`` against ``log s`` converge like
``c1/log s + c2/log(s)**2 + ...`` instead, so a low-degree polynomial fit in
``1/log s`` (Richardson extrapolation) recovers the limit.
"""

from __future__ import annotations

import math

import numpy as np

RICHARDSON_DEGREE = 2
RICHARDSON_POINTS = 5


def two_point_slopes(x, y) -> tuple[np.ndarray, np.ndarray]:
    """Slopes of consecutive points and the midpoints they belong to."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.diff(y) / np.diff(x), 0.5 * (x[1:] + x[:-1])


def richardson_limit(h, values, degree: int = RICHARDSON_DEGREE,
                     points: int = RICHARDSON_POINTS) -> float:
    """Value at ``h = 0`` of a least-squares polynomial through the last ``points`` samples."""
    h = np.asarray(h, dtype=float)
    values = np.asarray(values, dtype=float)
    points = min(points, h.size)
    degree = min(degree, points - 1)
    hs, vs = h[-points:], values[-points:]
    if not (np.all(np.isfinite(hs)) and np.all(np.isfinite(vs))):
        return math.nan
    if np.ptp(vs) == 0.0:
        return float(vs[-1])
    return float(np.polyfit(hs, vs, degree)[-1])


def aitken(seq) -> float:
    """Aitken's delta-squared on the last three terms."""
    a, b, c = (float(v) for v in np.asarray(seq, dtype=float)[-3:])
    d = c - 2.0 * b + a
    if d == 0.0 or not math.isfinite(d):
        return c
    return c - (c - b) ** 2 / d


def limit_of_slopes(x, y, degree: int = RICHARDSON_DEGREE,
                    points: int = RICHARDSON_POINTS) -> float:
    """Limit of ``dy/dx`` as ``|x| -> inf``, from samples at increasing ``|x|``."""
    slopes, mid = two_point_slopes(x, y)
    return richardson_limit(1.0 / np.abs(mid), slopes, degree, points)


def tail_fit(x, y, points: int = 4) -> tuple[float, float]:
    """Least-squares slope of ``y`` on ``x`` over the last ``points`` samples and its RMS residual."""
    xs = np.asarray(x, dtype=float)[-points:]
    ys = np.asarray(y, dtype=float)[-points:]
    coef, res, *_ = np.polyfit(xs, ys, 1, full=True)
    rms = math.sqrt(float(res[0]) / xs.size) if res.size else 0.0
    return float(coef[0]), rms
