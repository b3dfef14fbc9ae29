"""The bilateral grand Lebesgue norm, the fundamental function and related checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import WeightedDomain
from .extrapolation import limit_of_slopes
from .functions import ProductFunction, indicator, log_lp_norms, truncate
from .grid import EPS_SCHEDULE, SupOverP, sup_over_p, u_grid
from .psi import PsiFunction, endpoint_limit

G_O_PSI_LEVEL = 1e3
G_O_RATIO_LEVEL = 1e-3
G_O_EPS = tuple(10.0 ** -k for k in range(2, 15))
VANISH_LEVEL = 1e-3
VANISH_DECADES = 12


@dataclass(frozen=True)
class GrandSpace:
    """``G(psi; a, b)`` over a weighted product domain."""

    domain: WeightedDomain
    psi: PsiFunction

    @property
    def interval(self):
        return self.psi.interval


def bgls_norm(space: GrandSpace, f: ProductFunction, tol: float = 1e-10,
              eps_schedule=EPS_SCHEDULE, refine: bool = True) -> SupOverP:
    """``sup_p |f|_p / psi(p)``.

    With ``refine=False`` the supremum is taken over the exponent grid only.
    """
    if f.domain != space.domain:
        raise ValueError("function and space live on different domains")
    psi = space.psi
    return sup_over_p(lambda p: log_lp_norms(f, p, tol) - psi.log(p), space.interval,
                      eps_schedule, refine=refine)


def log_fundamental(space: GrandSpace, log_delta: float) -> SupOverP:
    """Fundamental function in log form: ``sup_p (log_delta / p - log psi(p))``."""
    psi = space.psi
    return sup_over_p(lambda p: log_delta / p - psi.log(p), space.interval)


def log_fundamental_grid(space: GrandSpace, log_deltas) -> np.ndarray:
    """Grid-only ``log phi`` for many arguments at once (no refinement, no endpoint tags)."""
    iv = space.interval
    p = iv.p_of_u(u_grid())
    lpsi = space.psi.log(p)
    L = np.atleast_1d(np.asarray(log_deltas, dtype=float))
    return np.max(L[:, None] / p[None, :] - lpsi[None, :], axis=1)


def fundamental_function(space: GrandSpace, delta: float) -> SupOverP:
    """``phi(delta) = sup_p delta**(1/p) / psi(p)``, the norm of an indicator of measure ``delta``."""
    if not delta > 0.0:
        raise ValueError("delta must be positive")
    return log_fundamental(space, math.log(delta))


def slope_levels(direction: str, levels: int) -> np.ndarray:
    """``log s`` along ``s = 10**(+-2m)``, ``m = 1..levels``."""
    if direction not in ("to_zero", "to_infinity"):
        raise ValueError(f"unknown direction {direction!r}")
    sign = 1.0 if direction == "to_infinity" else -1.0
    return sign * 2.0 * math.log(10.0) * np.arange(1, levels + 1)


def fundfn_asymptotic_slope(space: GrandSpace, direction: str, levels: int = 12) -> float:
    """Limit of ``log phi(s) / log s`` as ``s -> 0`` or ``s -> inf``.

    Expected values are ``1/b`` (``to_zero``) and ``1/a`` (``to_infinity``).
    """
    if levels < 3:
        raise ValueError("levels must be at least 3")
    logs = slope_levels(direction, levels)
    logphi = np.array([log_fundamental(space, float(L)).log_value for L in logs])
    return limit_of_slopes(logs, logphi)


def fundfn_vanishes_at_zero(space: GrandSpace) -> bool:
    """Whether ``phi(10**-m)`` falls below ``1e-3`` for some ``m <= 12``, decreasing on the way."""
    vals = [fundamental_function(space, 10.0 ** -m).value for m in range(1, VANISH_DECADES + 1)]
    for m, v in enumerate(vals):
        if v < VANISH_LEVEL:
            return all(y <= x for x, y in zip(vals[: m + 1], vals[1: m + 1]))
    return False


def in_G_o(space: GrandSpace, f: ProductFunction, tol: float = 1e-10) -> bool:
    """Whether ``|f|_p / psi(p) -> 0`` where ``psi(p) -> inf``.

    At each end where ``psi`` blows up, the ratio at the outermost grid points
    with ``psi > 1e3`` must be below ``1e-3``.
    """
    if f.is_zero:
        return True
    iv = space.interval
    eps = np.array(G_O_EPS)
    checked = False
    for u in (eps, 1.0 - eps):
        p = iv.p_of_u(u)
        keep = iv.contains(p)
        p = p[keep]
        psi_vals = space.psi(p)
        if not math.isinf(endpoint_limit(psi_vals[: len(EPS_SCHEDULE)])) and \
                not math.isinf(endpoint_limit(psi_vals)):
            continue
        big = psi_vals > G_O_PSI_LEVEL
        if not np.any(big):
            continue
        checked = True
        ratio = np.exp(log_lp_norms(f, p[big], tol)) / psi_vals[big]
        outer = ratio[-2:]
        if not np.all(outer < G_O_RATIO_LEVEL):
            return False
    if not checked:
        # psi never gets large: only an unbounded ratio could fail the limit
        return bgls_norm(space, f, tol).finite
    return True


@dataclass(frozen=True)
class FatouReport:
    ns: tuple[int, ...]
    norms: tuple[float, ...]
    full_norm: float
    nondecreasing: bool
    converged: bool


def fatou_check(space: GrandSpace, f: ProductFunction, n_max: int = 2 ** 30,
                rtol: float = 1e-2, ns=None) -> FatouReport:
    """Norms of the truncations ``f_n`` for ``n = 1, 2, 4, ..., n_max``.

    An explicit increasing sequence ``ns`` overrides ``n_max``; logarithmic
    heads need doubly exponential ``n`` to get close to the limit.
    """
    if ns is None:
        ns = []
        n = 1
        while n <= n_max:
            ns.append(n)
            n *= 2
    norms = [bgls_norm(space, truncate(f, n)).value for n in ns]
    full = bgls_norm(space, f).value
    nondecreasing = all(y >= x * (1.0 - 1e-9) - 1e-300 for x, y in zip(norms, norms[1:]))
    if math.isfinite(full):
        converged = abs(norms[-1] - full) <= rtol * max(full, 1e-300) or full == norms[-1]
    else:
        converged = norms[-1] >= norms[0]
    return FatouReport(tuple(ns), tuple(norms), full, nondecreasing, converged)


def indicator_norm(space: GrandSpace, delta: float) -> SupOverP:
    """BGLS norm of an indicator of measure ``delta`` (computed through ``lp_norm``)."""
    return bgls_norm(space, indicator(space.domain, delta))
