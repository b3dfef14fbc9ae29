"""Positive continuous weights ``psi`` on exponent intervals and their classification.

A :class:`PsiFunction` evaluates ``log psi`` on arrays of exponents.  Three
kinds exist: closed-form formulas, functions generated by a representation
``psi(p) = |f|_p`` and pointwise products.  Class membership (``EPsi``: at least
one, with ``psi(b-0) = inf``; ``Psi``: has a representation) is only ever
reported by :func:`classify`, never enforced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .functions import ProductFunction, log_lp_norms, lp_norm
from .grid import EPS_SCHEDULE, Interval

ANALYTIC_FORMULA = "analytic-formula"
REPRESENTATION = "representation-generated"
PRODUCT = "product-of-two"

# classification thresholds
DIVERGENCE_THRESHOLD = 1e6
DIVERGENCE_LEVELS = 4
MIN_GROWTH_EXPONENT = 0.05
CLASSIFY_EPS = EPS_SCHEDULE
LOG_CONVEX_TOL = 1e-8


class PsiDomainError(ValueError):
    """Exponent outside the open interval of a psi-function."""


class IntervalMismatch(ValueError):
    pass


class RepresentationDiverges(ArithmeticError):
    """A candidate representation is not in every ``L_p``, ``p in (a, b)``."""


@dataclass(frozen=True)
class PsiFunction:
    """``psi`` on ``interval``, stored through its logarithm.

    ``log_eval`` maps an array of exponents inside the interval to
    ``log psi``.  ``representation`` is the function ``f`` with
    ``|f|_p = psi(p)`` when one is known.
    """

    interval: Interval
    log_eval: Callable = field(compare=False)
    kind: str = ANALYTIC_FORMULA
    representation: ProductFunction | None = field(default=None, compare=False)
    label: str = "psi"

    def log(self, p):
        p = np.asarray(p, dtype=float)
        if not np.all(self.interval.contains(p)):
            raise PsiDomainError(f"p outside {self.interval}: {p}")
        return np.asarray(self.log_eval(p), dtype=float)

    def __call__(self, p):
        out = np.exp(self.log(p))
        return float(out) if out.ndim == 0 else out

    def __repr__(self):
        return f"PsiFunction({self.label!r} on {self.interval}, {self.kind})"


def eval_psi(psi: PsiFunction, p: float) -> float:
    """``psi(p)`` for ``p`` strictly inside the interval."""
    if not math.isfinite(p):
        raise PsiDomainError(f"non-finite exponent {p!r}")
    return float(psi(p))


def constant_psi(interval: Interval, c: float = 1.0) -> PsiFunction:
    """``psi = c``: not in ``EPsi``, but a useful control and the neutral ``nu``."""
    if not c > 0.0:
        raise ValueError("constant must be positive")
    lc = math.log(c)
    return PsiFunction(interval, lambda p: np.full(np.shape(p), lc), ANALYTIC_FORMULA,
                       label=f"const({c:g})")


def power_psi(interval: Interval, c: float, gamma_a: float, gamma_b: float) -> PsiFunction:
    """``c (p - a)^(-gamma_a) (b - p)^(-gamma_b)``; for ``b = inf`` the last factor is ``p^gamma_b``."""
    if not c > 0.0:
        raise ValueError("coefficient must be positive")
    a, b = interval.a, interval.b
    lc = math.log(c)
    if interval.finite:
        fn = lambda p: lc - gamma_a * np.log(p - a) - gamma_b * np.log(b - p)
    else:
        fn = lambda p: lc - gamma_a * np.log(p - a) + gamma_b * np.log(p)
    return PsiFunction(interval, fn, ANALYTIC_FORMULA, label=f"power({c:g},{gamma_a:g},{gamma_b:g})")


def multiply_psi(psi: PsiFunction, nu: PsiFunction) -> PsiFunction:
    """Pointwise product ``zeta = psi * nu`` on a shared interval."""
    if psi.interval != nu.interval:
        raise IntervalMismatch(f"{psi.interval} vs {nu.interval}")
    f, g = psi.log_eval, nu.log_eval
    return PsiFunction(psi.interval, lambda p: f(p) + g(p), PRODUCT,
                       label=f"prod({psi.label},{nu.label})")


def scale_psi(psi: PsiFunction, c: float) -> PsiFunction:
    """``c * psi`` (keeps the kind; a stored representation is scaled too)."""
    lc = math.log(c)
    f = psi.log_eval
    rep = psi.representation.scaled_by(c) if psi.representation is not None else None
    return PsiFunction(psi.interval, lambda p: f(p) + lc, psi.kind, rep, f"{c:g}*{psi.label}")


def verification_grid(interval: Interval, n: int = 16) -> np.ndarray:
    u = (np.arange(n) + 0.5) / n
    return interval.p_of_u(u)


def from_representation(f: ProductFunction, interval: Interval, tol: float = 1e-10,
                        label: str = "rep") -> PsiFunction:
    """``psi(p) = |f|_p`` after checking ``|f|_p < inf`` on a verification grid."""
    grid = verification_grid(interval)
    logs = log_lp_norms(f, grid, tol)
    bad = grid[~np.isfinite(logs) | np.isnan(logs)]
    if bad.size:
        raise RepresentationDiverges(f"|f|_p is not finite at p = {bad.tolist()}")
    return PsiFunction(interval, lambda p: log_lp_norms(f, p, tol), REPRESENTATION, f, label)


def attach_representation(psi: PsiFunction, f: ProductFunction) -> PsiFunction:
    """Same evaluator, with ``f`` recorded as its representation."""
    return PsiFunction(psi.interval, psi.log_eval, psi.kind, f, psi.label)


@dataclass(frozen=True)
class PsiClassReport:
    in_EPsi: bool
    in_Psi: bool
    psi_at_a_plus: float
    psi_at_b_minus: float
    log_convex: bool
    min_on_grid: float = math.nan


def endpoint_limit(values) -> float:
    """Limit of a sequence sampled at ``eps = 1e-2, 1e-3, ...``.

    Reported as ``inf`` when the last :data:`DIVERGENCE_LEVELS` values increase
    and either exceed :data:`DIVERGENCE_THRESHOLD` or grow at least like
    ``eps**(-MIN_GROWTH_EXPONENT)``; otherwise the last value.
    """
    v = np.asarray(values, dtype=float)
    if np.any(np.isinf(v) & (v > 0)):
        return math.inf
    tail = v[-DIVERGENCE_LEVELS:]
    increasing = bool(np.all(np.diff(tail) > 0.0))
    if increasing:
        if tail[-1] > DIVERGENCE_THRESHOLD:
            return math.inf
        with np.errstate(all="ignore"):
            growth = np.diff(np.log(tail)) / math.log(10.0)
        if np.all(growth >= MIN_GROWTH_EXPONENT):
            return math.inf
    return float(v[-1])


def _representation_consistent(psi: PsiFunction) -> bool:
    f = psi.representation
    if f is None:
        return False
    ps = verification_grid(psi.interval, 5)
    for p in ps:
        res = lp_norm(f, float(p))
        want = float(psi(p))
        tol = 1e-6 if res.method == "analytic" else 1e-4
        if not abs(res.value - want) <= tol * want:
            return False
    return True


def classify(psi: PsiFunction, grid_size: int = 64) -> PsiClassReport:
    """Report class membership, endpoint limits and log-convexity of ``psi``."""
    if grid_size < 16:
        raise ValueError("grid_size must be at least 16")
    iv = psi.interval
    eps = np.array(CLASSIFY_EPS)
    left = psi(iv.p_of_u(eps))
    right = psi(iv.p_of_u(1.0 - eps))
    a_plus = endpoint_limit(left)
    b_minus = endpoint_limit(right)

    u = (np.arange(grid_size) + 0.5) / grid_size
    p = iv.p_of_u(u)
    vals = psi(p)
    low = float(min(np.min(vals), np.min(left), np.min(right)))
    in_e = bool(low >= 1.0 - 1e-12 and math.isinf(b_minus))

    y = p * np.log(vals)
    slopes = np.diff(y) / np.diff(p)
    jumps = np.diff(slopes)
    log_convex = bool(np.all(jumps >= -LOG_CONVEX_TOL * (1.0 + np.abs(slopes[:-1]))))
    return PsiClassReport(in_e, _representation_consistent(psi), a_plus, b_minus, log_convex, low)
