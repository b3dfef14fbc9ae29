"""Product domains ``R_+^{d(1)} x ... x R_+^{d(k)}`` with homogeneous block weights.

Every block carries a weight ``W_r`` homogeneous of order ``theta(r)``.  For the
functions used in this package (one factor per block, radial inside blocks of
dimension two or more) the block measure reduces to a one-dimensional radial
measure ``coef * r**(d - 1 + theta) dr``; that reduction is what
:mod:`bgls.functions` integrates against.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

log = logging.getLogger(__name__)

PROFILES = ("lebesgue", "power", "custom")

# sampled extrema beyond these are reported as +inf / 0
DEFECT_INFINITY = 1e6
DEFECT_ZERO = 1e-6


def sphere_area(dim: int) -> float:
    """Surface area of the unit sphere in ``R^dim``."""
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


def _orthant_angular_mass(weight: Callable, dim: int, samples: int = 1 << 14,
                          seed: int = 0) -> float:
    """Integral of ``weight`` over the unit sphere restricted to the positive orthant."""
    if dim == 2:
        val, _ = quad(lambda t: np.asarray(weight(np.array([math.cos(t), math.sin(t)]))).item(),
                      0.0, math.pi / 2.0, epsabs=0.0, epsrel=1e-12)
        return val
    rng = np.random.default_rng(seed)
    pts = np.abs(rng.standard_normal((samples, dim)))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    vals = np.array([np.asarray(weight(x)).item() for x in pts])
    return float(vals.mean()) * sphere_area(dim) / 2.0 ** dim


@dataclass(frozen=True)
class BlockSpec:
    """One factor ``R_+^{dim}`` of the domain with its weight.

    ``profile`` is ``"lebesgue"`` (``W = 1``), ``"power"`` (``W(x) = coef * x**theta``,
    ``dim == 1`` only) or ``"custom"`` (``weight`` evaluator plus declared order
    ``theta``).  For ``dim >= 2`` a custom weight is sampled on the unit sphere at
    construction time.  ``full_space`` replaces ``R_+^dim`` by ``R^dim``; it is
    meant for the radial blocks of matrix dilations.
    """

    dim: int = 1
    theta: float = 0.0
    profile: str = "lebesgue"
    coef: float = 1.0
    weight: Callable | None = field(default=None, compare=False)
    full_space: bool = False
    angular_mass: float = field(init=False, compare=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"block dimension must be positive, got {self.dim}")
        if self.profile not in PROFILES:
            raise ValueError(f"unknown weight profile {self.profile!r}")
        if self.profile == "lebesgue" and self.theta != 0.0:
            raise ValueError("a Lebesgue block has theta = 0")
        if self.profile == "power" and self.dim != 1:
            raise ValueError("power profiles are defined for one-dimensional blocks")
        if self.profile == "custom" and self.weight is None:
            raise ValueError("custom profile needs a weight evaluator")
        if self.coef <= 0.0:
            raise ValueError("weight coefficient must be positive")
        if self.dim == 1:
            mass = 2.0 if self.full_space else 1.0
        elif self.profile == "custom":
            mass = _orthant_angular_mass(self.weight, self.dim)
            if self.full_space:
                mass *= 2.0 ** self.dim
        else:
            mass = sphere_area(self.dim)
            if not self.full_space:
                mass /= 2.0 ** self.dim
        if self.profile == "custom" and self.dim == 1:
            mass = 1.0
        object.__setattr__(self, "angular_mass", mass * self.coef)

    @property
    def homogeneous(self) -> bool:
        """Whether the radial measure is exactly ``coef * r**kappa dr``."""
        return not (self.profile == "custom" and self.dim == 1)

    @property
    def radial_exponent(self) -> float:
        return self.dim - 1 + self.theta

    def radial_density(self, r):
        """Density of the block measure seen by radial functions, ``r -> m(r)``."""
        r = np.asarray(r, dtype=float)
        if self.homogeneous:
            return self.angular_mass * r ** self.radial_exponent
        return np.asarray(self.weight(r), dtype=float) * self.coef

    def weight_at(self, x):
        """Evaluate ``W_r`` at points ``x`` (shape ``(n,)`` for dim 1, else ``(n, dim)``)."""
        x = np.asarray(x, dtype=float)
        if self.profile == "lebesgue":
            return np.ones(x.shape[0] if x.ndim > 1 else x.shape)
        if self.profile == "power":
            return self.coef * x ** self.theta
        if self.dim == 1:
            return self.coef * np.asarray(self.weight(x), dtype=float)
        return self.coef * np.array([float(self.weight(row)) for row in np.atleast_2d(x)])

    def ball_measure(self, radius: float) -> float:
        """Measure of ``{|x| < radius}`` in this block (homogeneous blocks only)."""
        if not self.homogeneous:
            val, _ = quad(lambda r: float(self.radial_density(r)), 0.0, radius)
            return val
        kappa = self.radial_exponent
        return self.angular_mass * radius ** (kappa + 1.0) / (kappa + 1.0)

    def radius_for_measure(self, delta: float) -> float:
        """Inverse of :meth:`ball_measure`."""
        if delta <= 0.0:
            return 0.0
        kappa = self.radial_exponent
        if self.homogeneous:
            return (delta * (kappa + 1.0) / self.angular_mass) ** (1.0 / (kappa + 1.0))
        from scipy.optimize import brentq
        hi = 1.0
        while self.ball_measure(hi) < delta:
            hi *= 2.0
        return brentq(lambda r: self.ball_measure(r) - delta, 0.0, hi, xtol=1e-14, rtol=1e-14)


@dataclass(frozen=True)
class WeightedDomain:
    """The product domain together with its product weight."""

    blocks: tuple[BlockSpec, ...]

    def __post_init__(self):
        blocks = tuple(self.blocks)
        if not blocks:
            raise ValueError("a domain needs at least one block")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def lebesgue(cls, *dims: int) -> "WeightedDomain":
        dims = dims or (1,)
        return cls(tuple(BlockSpec(dim=d) for d in dims))

    @classmethod
    def power_line(cls, theta: float, coef: float = 1.0) -> "WeightedDomain":
        """``R_+`` with weight ``coef * x**theta``."""
        if theta == 0.0 and coef == 1.0:
            return cls((BlockSpec(),))
        return cls((BlockSpec(dim=1, theta=theta, profile="power", coef=coef),))

    @property
    def k(self) -> int:
        return len(self.blocks)

    @property
    def dims(self) -> np.ndarray:
        return np.array([b.dim for b in self.blocks], dtype=float)

    @property
    def total_dim(self) -> int:
        return int(sum(b.dim for b in self.blocks))

    @property
    def theta_vec(self) -> np.ndarray:
        return np.array([b.theta for b in self.blocks], dtype=float)

    @property
    def is_unweighted_line(self) -> bool:
        b = self.blocks
        return len(b) == 1 and b[0].dim == 1 and b[0].profile == "lebesgue" and not b[0].full_space


def multi_power(s: Sequence[float], e: Sequence[float]) -> float:
    """``prod_r s(r)**e(r)`` for a positive vector ``s``."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    e = np.atleast_1d(np.asarray(e, dtype=float))
    if s.shape != e.shape:
        raise ValueError(f"length mismatch: s has {s.size} entries, e has {e.size}")
    if np.any(~(s > 0.0)):
        raise ValueError("s must be strictly positive")
    return float(math.exp(float(np.sum(e * np.log(s)))))


def log_measure_scaling(domain: WeightedDomain, s: Sequence[float]) -> float:
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if s.size != domain.k:
        raise ValueError(f"length mismatch: s has {s.size} entries, domain has {domain.k} blocks")
    if np.any(~(s > 0.0)):
        raise ValueError("s must be strictly positive")
    return float(np.sum((domain.dims + domain.theta_vec) * np.log(s)))


def measure_scaling_factor(domain: WeightedDomain, s: Sequence[float]) -> float:
    """Change-of-variables factor ``s**(d + theta)`` of the dilation ``x -> x / s``."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if s.size != domain.k:
        raise ValueError(f"length mismatch: s has {s.size} entries, domain has {domain.k} blocks")
    return multi_power(s, domain.dims + domain.theta_vec)


@dataclass(frozen=True)
class DefectConstants:
    """Sampled extrema of ``W(s y) / (s**theta W(y))``.

    The ``*_inf`` constants range over ``min s(j) >= 1``, the ``*_0`` ones over
    ``max s(j) <= 1``.  Values are sampled extrema; ``inf`` / ``0.0`` mean the
    sampled extremum kept moving past :data:`DEFECT_INFINITY` /
    :data:`DEFECT_ZERO` as the sampling range widened.
    """

    k_plus_inf: float
    k_minus_inf: float
    k_plus_0: float
    k_minus_0: float
    sample_ranges: tuple[float, ...] = ()


def _extremum(history: list[float], upper: bool) -> float:
    last = history[-1]
    if upper:
        growing = all(b > a * (1.0 + 1e-9) for a, b in zip(history, history[1:]))
        return math.inf if (growing and last > DEFECT_INFINITY) else last
    shrinking = all(b < a * (1.0 - 1e-9) for a, b in zip(history, history[1:]))
    return 0.0 if (shrinking and last < DEFECT_ZERO) else last


def defect_constants(weight: Callable, theta_declared, sample_budget: int = 4096,
                     seed: int = 0, ranges: Sequence[float] = (1e2, 1e4, 1e8),
                     y_range: float = 1e6) -> DefectConstants:
    """Estimate the homogeneity-defect constants of a weight by sampling.

    Parameters
    ----------
    weight : callable
        ``W(y)`` for an array of points of shape ``(n, k)`` (or ``(n,)`` when
        ``theta_declared`` is a scalar), returning shape ``(n,)``.
    theta_declared : float or sequence of float
        The homogeneity order ``theta`` the weight is compared against.
    sample_budget : int
        Number of random ``(s, y)`` pairs per sampling range (plus a log grid).
    ranges : sequence of float
        Increasing spans ``S``; ``s`` is drawn from ``[1, S]`` (resp. ``[1/S, 1]``).

    Notes
    -----
    The constants are suprema/infima over unbounded sets, so sampling only
    bounds them from inside.  A sampled extremum that keeps growing (shrinking)
    across ``ranges`` and ends beyond the report thresholds is reported as
    ``inf`` (``0``).
    """
    theta = np.atleast_1d(np.asarray(theta_declared, dtype=float))
    k = theta.size
    scalar = np.ndim(theta_declared) == 0
    rng = np.random.default_rng(seed)

    def ratios(s, y):
        num_pts = s * y
        if scalar:
            w_sy = np.asarray(weight(num_pts[:, 0]), dtype=float)
            w_y = np.asarray(weight(y[:, 0]), dtype=float)
        else:
            w_sy = np.asarray(weight(num_pts), dtype=float)
            w_y = np.asarray(weight(y), dtype=float)
        scale = np.exp(np.log(s) @ theta)
        return w_sy / (scale * w_y)

    hist = {"pi": [], "mi": [], "p0": [], "m0": []}
    n_grid = max(int(math.sqrt(sample_budget)), 8)
    for span in ranges:
        log_span = math.log(span)
        y = np.exp(rng.uniform(-math.log(y_range), math.log(y_range), (sample_budget, k)))
        u = rng.uniform(0.0, log_span, (sample_budget, k))
        # deterministic corners of the box so extreme ratios are always seen
        g_s = np.linspace(0.0, log_span, n_grid)
        g_y = np.linspace(-math.log(y_range), math.log(y_range), n_grid)
        gs, gy = np.meshgrid(g_s, g_y)
        u = np.vstack([u, np.repeat(gs.reshape(-1, 1), k, axis=1)])
        y = np.vstack([y, np.exp(np.repeat(gy.reshape(-1, 1), k, axis=1))])
        big = ratios(np.exp(u), y)
        small = ratios(np.exp(-u), y)
        hist["pi"].append(float(np.max(big)))
        hist["mi"].append(float(np.min(big)))
        hist["p0"].append(float(np.max(small)))
        hist["m0"].append(float(np.min(small)))
        log.debug("defect sampling span=%g: %s", span, {k_: v[-1] for k_, v in hist.items()})
    return DefectConstants(
        k_plus_inf=_extremum(hist["pi"], True),
        k_minus_inf=_extremum(hist["mi"], False),
        k_plus_0=_extremum(hist["p0"], True),
        k_minus_0=_extremum(hist["m0"], False),
        sample_ranges=tuple(float(r) for r in ranges),
    )


def corollary_bounds(constants: DefectConstants, a: float, b: float,
                     closed_form: float, s: Sequence[float]) -> dict[str, float]:
    """Sandwich bounds on the dilation norm for weights that are only nearly homogeneous.

    Returns the applicable ``upper``/``lower`` bounds for the given ``s``.  For
    ``s`` below one both readings of the upper bound are reported
    (``upper_kplus0`` uses ``K+_0``, ``upper_kminus0`` uses ``K-_0``).
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))

    def hi(k):
        return max(k ** (1.0 / a), k ** (1.0 / b) if math.isfinite(b) else 1.0)

    def lo(k):
        return min(k ** (1.0 / a), k ** (1.0 / b) if math.isfinite(b) else 1.0)

    out: dict[str, float] = {}
    if np.min(s) > 1.0:
        if math.isfinite(constants.k_plus_inf):
            out["upper"] = hi(constants.k_plus_inf) * closed_form
        if constants.k_minus_inf > 0.0:
            out["lower"] = lo(constants.k_minus_inf) * closed_form
    elif np.max(s) < 1.0:
        if math.isfinite(constants.k_plus_0):
            out["upper_kplus0"] = hi(constants.k_plus_0) * closed_form
        if constants.k_minus_0 > 0.0:
            out["upper_kminus0"] = hi(constants.k_minus_0) * closed_form
            out["lower"] = lo(constants.k_minus_0) * closed_form
    return out
