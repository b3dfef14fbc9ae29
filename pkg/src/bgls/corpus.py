"""Canonical psi-functions with known representations, and random test banks.

For a finite ``b`` the representation on a block with radial measure
``m r**kappa dr`` is

    f(x) = x**(-(kappa+1)/b) on (0, 1],   x**(-(kappa+1)/a) on (1, inf),

so that ``|f|_p**p = m/(kappa+1) * (b/(b-p) + a/(p-a))``.  On the Lebesgue
line with ``(a, b) = (2, 4)`` this is ``4/(4-p) + 2/(p-2)``.

For ``b = inf`` no finite piecewise-power function works (``psi(inf) = inf``
needs an unbounded function lying in every ``L_p``), so the part near zero is
``HEAD_SCALE * log(1/x)**LOG_POWER``, whose ``p``-th moment is a Gamma
function.  The small scale keeps the head's share of ``psi(a)**a`` comparable
to the finite-``b`` case.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from .domain import WeightedDomain
from .functions import Factor, NumericPiece, PowerPiece, ProductFunction, power_factor
from .grid import Interval
from .psi import ANALYTIC_FORMULA, PsiFunction, from_representation

LOG_POWER = 3
HEAD_SCALE = 0.05

PSI_CORPUS = ((2.0, 4.0), (1.0, 3.0), (1.0, 2.0), (2.0, math.inf), (1.0, math.inf))
LEMMA3_CORPUS = ((2.0, 4.0), (1.0, 3.0), (2.0, math.inf), (1.0, math.inf))
VERDICT_CORPUS = ((1.0, 2.0), (2.0, 4.0), (1.0, math.inf), (2.0, math.inf))


def _first_block(domain: WeightedDomain):
    block = domain.blocks[0]
    if not block.homogeneous:
        raise ValueError("canonical representations need a homogeneous first block")
    return block


def _log_moment(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return HEAD_SCALE * (-np.log(x)) ** LOG_POWER


def _log_log_moment(u):
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return math.log(HEAD_SCALE) + LOG_POWER * np.log(-u)


def canonical_representation(interval: Interval, domain: WeightedDomain | None = None) -> ProductFunction:
    """The representation described in the module docstring, on ``domain``'s first block.

    Further blocks carry the indicator of a set of unit measure.
    """
    domain = domain or WeightedDomain.lebesgue(1)
    block = _first_block(domain)
    n = block.radial_exponent + 1.0
    a, b = interval.a, interval.b
    tail = PowerPiece(1.0, math.inf, 1.0, -n / a)
    if interval.finite:
        head = PowerPiece(0.0, 1.0, 1.0, -n / b)
    else:
        head = NumericPiece(0.0, 1.0, _log_moment, f"{HEAD_SCALE:g}*log(1/x)^{LOG_POWER}", _log_log_moment)
    factors = [Factor((head, tail))]
    for other in domain.blocks[1:]:
        factors.append(power_factor((0.0, other.radius_for_measure(1.0), 1.0, 0.0)))
    return ProductFunction(tuple(factors), domain)


def canonical_log_psi(interval: Interval, domain: WeightedDomain | None = None):
    """Closed form of ``log |f|_p`` for :func:`canonical_representation`."""
    domain = domain or WeightedDomain.lebesgue(1)
    block = _first_block(domain)
    n = block.radial_exponent + 1.0
    log_m = math.log(block.angular_mass)
    a, b = interval.a, interval.b

    if interval.finite:
        def log_psi(p):
            p = np.asarray(p, dtype=float)
            inner = b / (b - p) + a / (p - a)
            return (log_m - math.log(n) + np.log(inner)) / p
    else:
        k = LOG_POWER

        def log_psi(p):
            p = np.asarray(p, dtype=float)
            head = p * math.log(HEAD_SCALE) + gammaln(k * p + 1.0) - (k * p + 1.0) * math.log(n)
            tail = -np.log(p * n / a - n)
            return (log_m + np.logaddexp(head, tail)) / p
    return log_psi


def canonical_psi(interval: Interval, domain: WeightedDomain | None = None,
                  generated: bool = False) -> PsiFunction:
    """Canonical ``psi`` in the class ``Psi``.

    With ``generated=False`` the closed form is used and the representation is
    attached; with ``generated=True`` ``psi`` is evaluated through the norm of
    the representation.
    """
    rep = canonical_representation(interval, domain)
    if generated:
        return from_representation(rep, interval, label="canonical")
    return PsiFunction(interval, canonical_log_psi(interval, domain), ANALYTIC_FORMULA, rep,
                       "canonical")


def random_power_function(rng: np.random.Generator, interval: Interval,
                          domain: WeightedDomain | None = None,
                          max_pieces: int = 4) -> ProductFunction:
    """Random nonnegative piecewise-power function lying in every ``L_p``, ``p in (a, b)``.

    The piece touching zero has ``e*p + kappa > -1`` for all ``p < b`` and the
    unbounded piece ``e*p + kappa < -1`` for all ``p > a``; bounded pieces are
    unconstrained.
    """
    domain = domain or WeightedDomain.lebesgue(1)
    block = _first_block(domain)
    n = block.radial_exponent + 1.0
    a, b = interval.a, interval.b
    k = int(rng.integers(2, max_pieces + 1))
    cuts = np.sort(np.exp(rng.uniform(-3.0, 3.0, k - 1)))
    edges = np.concatenate([[0.0], cuts, [math.inf]])
    pieces = []
    for j in range(k):
        lo, hi = float(edges[j]), float(edges[j + 1])
        c = float(np.exp(rng.uniform(-1.5, 1.5)))
        if lo == 0.0:
            e_min = -n / b if interval.finite else 0.0
            e = float(rng.uniform(e_min, 1.0)) if interval.finite else float(rng.uniform(0.0, 1.0))
            if interval.finite and e <= e_min:
                e = e_min * 0.999
        elif math.isinf(hi):
            e = float(rng.uniform(-3.0 * n / a, -n / a))
        else:
            e = float(rng.uniform(-2.0, 2.0))
        pieces.append((lo, hi, c, e))
    return ProductFunction((power_factor(*pieces),) + tuple(
        power_factor((0.0, other.radius_for_measure(1.0), 1.0, 0.0)) for other in domain.blocks[1:]),
        domain)
