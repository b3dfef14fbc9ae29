"""Exponent intervals ``(a, b)`` and suprema over them.

Suprema over an open interval may only be reached in the limit, so the grid
clusters points at both ends: a Chebyshev-like interior plus the offsets
``eps * {1, 2, 5}`` for ``eps`` in :data:`EPS_SCHEDULE`, all in the unit
parameter ``u`` with ``p = a + (b - a) u`` (``p = a + u / (1 - u)`` when
``b = inf``).  The grid maximiser is then polished by golden-section search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

EPS_SCHEDULE = tuple(10.0 ** -k for k in range(2, 9))
INTERIOR_NODES = 33
INFINITE_SUP = 1e12
MIN_GROWTH = 0.05
ENDPOINT_LEVELS = 3
# bracket refinement of the grid maximiser: nodes per round and rounds
ZOOM_POINTS = 16
ZOOM_ROUNDS = 5


@dataclass(frozen=True)
class Interval:
    """Open exponent interval ``(a, b)`` with ``1 <= a < b <= inf``."""

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and a >= 1.0):
            raise ValueError(f"need 1 <= a < inf, got a={self.a!r}")
        if not (b > a) or math.isnan(b):
            raise ValueError(f"need b > a, got ({self.a!r}, {self.b!r})")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def finite(self) -> bool:
        return math.isfinite(self.b)

    def contains(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return np.isfinite(p) & (p > self.a) & (p < self.b)

    def p_of_u(self, u):
        u = np.asarray(u, dtype=float)
        if self.finite:
            return self.a + (self.b - self.a) * u
        with np.errstate(divide="ignore"):
            return self.a + u / (1.0 - u)

    def u_of_p(self, p):
        p = np.asarray(p, dtype=float)
        if self.finite:
            return (p - self.a) / (self.b - self.a)
        x = p - self.a
        return x / (1.0 + x)

    def __str__(self):
        return f"({self.a:g}, {'inf' if not self.finite else f'{self.b:g}'})"


def u_grid(eps_schedule=EPS_SCHEDULE, interior: int = INTERIOR_NODES) -> np.ndarray:
    """Sorted unit-parameter grid: Chebyshev interior plus endpoint clusters."""
    k = np.arange(interior)
    cheb = 0.5 * (1.0 - np.cos(np.pi * (k + 0.5) / interior))
    ends = []
    for eps in eps_schedule:
        for m in (1.0, 2.0, 5.0):
            ends.append(m * eps)
            ends.append(1.0 - m * eps)
    u = np.unique(np.concatenate([cheb, ends]))
    return u[(u > 0.0) & (u < 1.0)]


@dataclass(frozen=True)
class SupOverP:
    """A supremum over ``p in (a, b)``.

    ``argmax_p`` is a float for an attained maximum or one of the tags
    ``"a+"`` / ``"b-"`` when the maximiser ran into an endpoint.
    """

    value: float
    argmax_p: float | str
    profile: tuple[np.ndarray, np.ndarray] = field(repr=False, compare=False)
    log_value: float = field(default=math.nan, repr=False)
    level_values: tuple[float, ...] = field(default=(), repr=False, compare=False)

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)


def _diverging(level_vals: list[float], best: float) -> bool:
    """Power-law growth of the level maxima, at least ``eps**-MIN_GROWTH`` per decade."""
    lv = np.asarray(level_vals[-ENDPOINT_LEVELS - 1:])
    steps = np.diff(lv) / math.log(10.0)
    if np.all(steps >= MIN_GROWTH):
        return True
    # values beyond the cap that still increase at every level
    return best > math.log(INFINITE_SUP) and bool(np.all(steps >= 1e-3))


def _zoom(func: Callable, lo: float, mid: float, hi: float, f_mid: float,
          points: int = ZOOM_POINTS, rounds: int = ZOOM_ROUNDS) -> tuple[float, float]:
    """Maximise ``func`` in ``(lo, hi)`` by repeated grid refinement around the best node.

    ``func`` takes an array of nodes, so each round costs one vectorised call.
    """
    best_u, best = mid, f_mid
    for _ in range(rounds):
        nodes = np.linspace(lo, hi, points + 2)[1:-1]
        with np.errstate(all="ignore"):
            vals = np.asarray(func(nodes), dtype=float)
        vals = np.where(np.isnan(vals), -np.inf, vals)
        j = int(np.argmax(vals))
        if vals[j] == math.inf:
            return float(nodes[j]), math.inf
        if vals[j] > best:
            best_u, best = float(nodes[j]), float(vals[j])
        step = (hi - lo) / (points + 1)
        lo, hi = max(lo, best_u - step), min(hi, best_u + step)
    return best_u, best


def sup_over_p(log_ratio: Callable, interval: Interval, eps_schedule=EPS_SCHEDULE,
               interior: int = INTERIOR_NODES, refine: bool = True) -> SupOverP:
    """Supremum of ``exp(log_ratio(p))`` over the open interval.

    Parameters
    ----------
    log_ratio : callable
        Maps an array of exponents to an array of log-ratios.  ``-inf`` means
        a zero ratio, ``+inf`` an infinite one; ``nan`` is treated as ``-inf``.
    interval : Interval
    eps_schedule : sequence of float
        Endpoint offsets, coarse to fine; each one defines a refinement level.
    refine : bool
        Polish the grid maximiser by vectorised bracket refinement.
    """
    u = u_grid(eps_schedule, interior)
    p = interval.p_of_u(u)
    with np.errstate(all="ignore"):
        vals = np.asarray(log_ratio(p), dtype=float)
    vals = np.where(np.isnan(vals), -np.inf, vals)
    profile = (p, np.exp(np.minimum(vals, 709.0)))
    dist = np.minimum(u, 1.0 - u)

    level_vals = []
    level_arg = []
    for eps in eps_schedule:
        mask = dist >= eps * (1.0 - 1e-9)
        idx = np.flatnonzero(mask)
        j = idx[int(np.argmax(vals[idx]))]
        level_vals.append(float(vals[j]))
        level_arg.append(int(j))

    i = int(np.argmax(vals))
    best = float(vals[i])
    if best == math.inf:
        return SupOverP(math.inf, float(p[i]), profile, math.inf, tuple(level_vals))
    if best == -math.inf:
        return SupOverP(0.0, float(p[i]), profile, -math.inf, tuple(level_vals))

    # endpoint limit: the level maximiser hugs one end for the last few levels
    tag = None
    last = level_arg[-ENDPOINT_LEVELS:]
    eps_last = eps_schedule[-ENDPOINT_LEVELS:]
    if all(u[j] <= 5.0 * e * (1 + 1e-9) for j, e in zip(last, eps_last)) and \
            all(u[y] < u[x] for x, y in zip(last, last[1:])):
        tag = "a+"
    elif all(1.0 - u[j] <= 5.0 * e * (1 + 1e-9) for j, e in zip(last, eps_last)) and \
            all(u[y] > u[x] for x, y in zip(last, last[1:])):
        tag = "b-"

    if tag is not None and _diverging(level_vals, best):
        return SupOverP(math.inf, tag, profile, math.inf, tuple(level_vals))

    u_best = float(u[i])
    if refine and tag is None and 0 < i < len(u) - 1:
        u_best, best = _zoom(lambda uu: log_ratio(interval.p_of_u(uu)), float(u[i - 1]),
                             u_best, float(u[i + 1]), best)
        if best == math.inf:
            return SupOverP(math.inf, float(interval.p_of_u(u_best)), profile, math.inf,
                            tuple(level_vals))
    argmax = tag if tag is not None else float(interval.p_of_u(u_best))
    return SupOverP(math.exp(best) if best < 709.0 else math.inf, argmax, profile, best,
                    tuple(level_vals))
