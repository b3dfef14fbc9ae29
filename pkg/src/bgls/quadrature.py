"""Adaptive quadrature for one-dimensional integrands with endpoint singularities.

The engine wraps QUADPACK (through :func:`scipy.integrate.quad`) and adds
the two substitutions the test functions of this package need:

* semi-infinite ranges ``[lo, inf)`` are mapped onto ``[0, 1)`` with
  ``x = lo / (1 - t)`` (``lo`` raised to 1 first when it is 0), which keeps a
  power-law tail an exact power of ``1 - t``;
* an algebraic singularity ``(t - A)**q`` at either end of the mapped range is
  peeled off into QUADPACK's algebraic weight (QAWS), leaving a smooth
  remainder for the Clenshaw-Curtis rule.

Integrals are returned in log form so that ``g(x)**p`` for very large ``p``
does not overflow.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import IntegrationWarning, quad

SUBDIVISION_BUDGET = 10_000

# relative offsets used to read off the local power law at an endpoint
_PROBE_NEAR = 1e-10
_PROBE_FAR = 1e-8
_EXPONENT_SNAP = 1e-6
_ENDPOINT_GAP = 1e-200


class ToleranceNotMet(RuntimeError):
    """The adaptive engine could not reach the requested tolerance."""


class IntegralDiverges(ArithmeticError):
    """The integrand is not integrable at an endpoint."""


@dataclass(frozen=True)
class LogIntegral:
    """``log`` of a nonnegative integral together with its relative error."""

    log_value: float
    rel_error: float

    @property
    def value(self) -> float:
        return math.exp(self.log_value) if self.log_value < 709.0 else math.inf


def _endpoint_exponent(h: Callable[[float], float], end: float, inward: float) -> float:
    """Estimate ``q`` in ``h(end + s*inward) ~ C s**q`` as ``s -> 0+``."""
    s1 = _PROBE_NEAR * abs(inward)
    s2 = _PROBE_FAR * abs(inward)
    step = math.copysign(1.0, inward)
    x1 = end + step * s1
    x2 = end + step * s2
    # use the offsets actually represented in floating point
    s1 = abs(x1 - end)
    s2 = abs(x2 - end)
    with np.errstate(all="ignore"):
        h1 = float(h(x1))
        h2 = float(h(x2))
    if not (h1 > 0.0 and h2 > 0.0) or not (math.isfinite(h1) and math.isfinite(h2)):
        if h2 > 0.0 and math.isfinite(h2) and (h1 == math.inf or math.isnan(h1)):
            return -math.inf
        return 0.0
    q = math.log(h1 / h2) / math.log(s1 / s2)
    if abs(q) < _EXPONENT_SNAP:
        return 0.0
    return q


def _quad_checked(func, a, b, rel_tol, **kwargs):
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            val, err = quad(func, a, b, epsabs=0.0, epsrel=rel_tol,
                            limit=SUBDIVISION_BUDGET, **kwargs)
        except IntegrationWarning:
            warnings.simplefilter("ignore", IntegrationWarning)
            val, err = quad(func, a, b, epsabs=0.0, epsrel=rel_tol,
                            limit=SUBDIVISION_BUDGET, **kwargs)
            # roundoff warnings are acceptable when the estimate is still good
            if not (abs(err) <= max(10.0 * rel_tol * abs(val), 1e-300)):
                raise ToleranceNotMet(
                    f"quadrature on [{a}, {b}] stalled: value={val!r}, err={err!r}")
    return val, err


def _finite_range(h: Callable[[float], float], A: float, B: float, rel_tol: float,
                  peak: float | None) -> tuple[float, float]:
    """Integrate ``h`` over the finite range ``[A, B]``; returns (value, abs error)."""
    width = B - A
    qa = _endpoint_exponent(h, A, width)
    qb = _endpoint_exponent(h, B, -width)
    if qa <= -1.0 or qb <= -1.0:
        raise IntegralDiverges(f"nonintegrable endpoint on [{A}, {B}] (q={min(qa, qb):.6g})")
    if qa == 0.0 and qb == 0.0:
        points = None
        if peak is not None and A < peak < B:
            points = [peak]
        return _quad_checked(h, A, B, rel_tol, points=points)

    qa_w = qa if qa < 0.0 else 0.0
    qb_w = qb if qb < 0.0 else 0.0
    if qa_w == 0.0 and qb_w == 0.0:
        return _quad_checked(h, A, B, rel_tol)

    # innermost sample points; near a zero endpoint stay clear of subnormals
    inner_a = max(math.nextafter(A, B), A + _ENDPOINT_GAP * width)
    inner_b = min(math.nextafter(B, A), B - _ENDPOINT_GAP * width)

    def smooth(t):
        # Clenshaw-Curtis samples the endpoints themselves
        t = min(max(t, inner_a), inner_b)
        return h(t) * (t - A) ** (-qa_w) * (B - t) ** (-qb_w)

    return _quad_checked(smooth, A, B, rel_tol, weight="alg", wvar=(qa_w, qb_w))


def log_integral(h: Callable[[float], float], lo: float, hi: float,
                 rel_tol: float = 1e-10, peak: float | None = None) -> LogIntegral:
    """Integrate a nonnegative scalar function over ``(lo, hi)``.

    Parameters
    ----------
    h : callable
        Scalar integrand, nonnegative on ``(lo, hi)``.
    lo, hi : float
        Range with ``0 <= lo < hi <= inf``.
    rel_tol : float
        Requested relative accuracy.
    peak : float, optional
        Location of a sharp interior maximum, passed on as a breakpoint.

    Raises
    ------
    IntegralDiverges
        If an endpoint singularity is not integrable.
    ToleranceNotMet
        If QUADPACK exhausts its subdivision budget.
    """
    if not hi > lo:
        return LogIntegral(-math.inf, 0.0)
    total = 0.0
    err = 0.0
    if math.isinf(hi):
        split = max(lo, 1.0) if lo == 0.0 else lo
        if lo < split:
            v, e = _finite_range(h, lo, split, rel_tol, peak)
            total += v
            err += e

        def mapped(t):
            if t >= 1.0:
                return 0.0
            one_minus = 1.0 - t
            return h(split / one_minus) * split / (one_minus * one_minus)

        mapped_peak = None
        if peak is not None and peak > split:
            mapped_peak = 1.0 - split / peak
        v, e = _finite_range(mapped, 0.0, 1.0, rel_tol, mapped_peak)
        total += v
        err += e
    else:
        v, e = _finite_range(h, lo, hi, rel_tol, peak)
        total += v
        err += e
    if total <= 0.0:
        return LogIntegral(-math.inf, 0.0)
    if not math.isfinite(total):
        raise IntegralDiverges(f"integral over ({lo}, {hi}) overflowed")
    return LogIntegral(math.log(total), err / total)
