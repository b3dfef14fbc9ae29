"""Product-form test functions and their weighted ``L_p`` norms.

A :class:`ProductFunction` has one :class:`Factor` per domain block, and a
factor is a list of pieces on disjoint subintervals of ``(0, inf)``.  A
:class:`PowerPiece` is ``c * x**e`` on its interval; a :class:`NumericPiece` is
an arbitrary evaluator.  On blocks of dimension two or more the factor is read
as a radial profile.

``lp_norm`` integrates power pieces in closed form (with exact divergence
detection) and hands everything else to :mod:`bgls.quadrature`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import tanhsinh
from scipy.special import logsumexp

from .domain import BlockSpec, WeightedDomain
from .quadrature import log_integral

ANALYTIC = "analytic"
QUADRATURE = "quadrature"
TANH_SINH_LEVELS = 10
# log-drop beyond which the rest of a range is negligible
CUTOFF_DROP = 50.0


@dataclass(frozen=True)
class PowerPiece:
    """``c * x**e`` on ``(lo, hi)``."""

    lo: float
    hi: float
    c: float
    e: float

    def __post_init__(self):
        if not (0.0 <= self.lo < self.hi):
            raise ValueError(f"bad piece interval ({self.lo}, {self.hi})")
        if not self.c > 0.0:
            raise ValueError("piece coefficient must be positive")

    def __call__(self, x):
        return self.c * np.power(x, self.e)

    def scaled(self, s: float) -> "PowerPiece":
        # x -> c (x/s)^e lives on (s lo, s hi)
        return PowerPiece(self.lo * s, self.hi * s, self.c * s ** (-self.e), self.e)

    def times(self, k: float) -> "PowerPiece":
        return replace(self, c=self.c * k)

    def log_eval(self, u):
        """``log`` of the value at ``x = exp(u)``."""
        return math.log(self.c) + self.e * np.asarray(u, dtype=float)


@dataclass(frozen=True)
class NumericPiece:
    """Nonnegative evaluator ``func`` on ``(lo, hi)``; ``func`` must accept arrays.

    ``log_func`` optionally evaluates ``log func(exp(u))`` directly, for
    arguments far outside the floating range.
    """

    lo: float
    hi: float
    func: Callable = field(compare=False)
    label: str = "numeric"
    log_func: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        if not (0.0 <= self.lo < self.hi):
            raise ValueError(f"bad piece interval ({self.lo}, {self.hi})")

    def __call__(self, x):
        return np.abs(np.asarray(self.func(x), dtype=float))

    def scaled(self, s: float) -> "NumericPiece":
        g, lg, ls = self.func, self.log_func, math.log(s)
        return NumericPiece(self.lo * s, self.hi * s, lambda x: g(np.asarray(x) / s),
                            f"{self.label}(x/{s:g})",
                            None if lg is None else (lambda u: lg(np.asarray(u) - ls)))

    def times(self, k: float) -> "NumericPiece":
        g, lg, lk = self.func, self.log_func, math.log(k)
        return NumericPiece(self.lo, self.hi, lambda x: k * np.asarray(g(x)), f"{k:g}*{self.label}",
                            None if lg is None else (lambda u: lg(u) + lk))

    def log_eval(self, u):
        """``log`` of the value at ``x = exp(u)``."""
        u = np.asarray(u, dtype=float)
        if self.log_func is not None:
            return np.asarray(self.log_func(u), dtype=float)
        with np.errstate(all="ignore"):
            return np.log(self(np.exp(u)))


Piece = PowerPiece | NumericPiece


@dataclass(frozen=True)
class Factor:
    """One block's factor: pieces on disjoint intervals, zero elsewhere."""

    pieces: tuple = ()

    def __post_init__(self):
        pieces = tuple(sorted(self.pieces, key=lambda q: q.lo))
        for left, right in zip(pieces, pieces[1:]):
            if right.lo < left.hi:
                raise ValueError(f"overlapping pieces ({left.lo}, {left.hi}) and ({right.lo}, {right.hi})")
        object.__setattr__(self, "pieces", pieces)

    @property
    def is_power(self) -> bool:
        return all(isinstance(q, PowerPiece) for q in self.pieces)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for q in self.pieces:
            mask = (x > q.lo) & (x < q.hi)
            if np.any(mask):
                out[mask] = q(x[mask])
        return out

    def breakpoints(self) -> list[float]:
        pts = set()
        for q in self.pieces:
            pts.add(q.lo)
            pts.add(q.hi)
        return sorted(pts)


def power_factor(*pieces: tuple[float, float, float, float]) -> Factor:
    """Factor from ``(lo, hi, c, e)`` tuples."""
    return Factor(tuple(PowerPiece(*p) for p in pieces))


def numeric_factor(func: Callable, lo: float = 0.0, hi: float = math.inf,
                   label: str = "numeric") -> Factor:
    return Factor((NumericPiece(lo, hi, func, label),))


@dataclass(frozen=True)
class ProductFunction:
    """``f(x) = prod_r f_r(x(d(r)))`` on a :class:`WeightedDomain`."""

    factors: tuple[Factor, ...]
    domain: WeightedDomain

    def __post_init__(self):
        factors = tuple(self.factors)
        if len(factors) != self.domain.k:
            raise ValueError(f"{len(factors)} factors for a domain with {self.domain.k} blocks")
        object.__setattr__(self, "factors", factors)

    @property
    def is_power(self) -> bool:
        return all(f.is_power for f in self.factors)

    @property
    def is_zero(self) -> bool:
        return any(not f.pieces for f in self.factors)

    def __call__(self, *coords):
        """Evaluate at per-block radii (one array per block)."""
        out = None
        for fac, x in zip(self.factors, coords):
            v = fac(x)
            out = v if out is None else out * v
        return out

    def scaled_by(self, k: float) -> "ProductFunction":
        """``|k| * f`` (the first factor absorbs the constant)."""
        k = abs(k)
        if k == 0.0:
            return zero_function(self.domain)
        first = Factor(tuple(q.times(k) for q in self.factors[0].pieces))
        return ProductFunction((first,) + self.factors[1:], self.domain)


def zero_function(domain: WeightedDomain) -> ProductFunction:
    return ProductFunction(tuple(Factor(()) for _ in domain.blocks), domain)


def indicator(domain: WeightedDomain, delta: float) -> ProductFunction:
    """Indicator of a set of measure ``delta``: ``(0, x_delta)`` in the first block, a unit ball in the rest."""
    if delta <= 0.0:
        return zero_function(domain)
    factors = []
    for j, block in enumerate(domain.blocks):
        mass = delta if j == 0 else 1.0
        factors.append(power_factor((0.0, block.radius_for_measure(mass), 1.0, 0.0)))
    return ProductFunction(tuple(factors), domain)


def line_function(*pieces: tuple[float, float, float, float],
                  domain: WeightedDomain | None = None) -> ProductFunction:
    """One-block piecewise-power function."""
    domain = domain or WeightedDomain.lebesgue(1)
    return ProductFunction((power_factor(*pieces),), domain)


@dataclass(frozen=True)
class LpResult:
    """Weighted ``L_p`` norm with the path that produced it.

    ``est_error`` is an absolute error estimate on ``value`` (zero for the
    analytic path).
    """

    value: float
    method: str
    est_error: float = 0.0
    log_value: float = field(default=math.nan, repr=False)


# ---------------------------------------------------------------------------
# closed-form power integrals


def _log_power_integral(lo: float, hi: float, q):
    """``log int_lo^hi x**q dx`` for an array of exponents ``q`` (``inf`` on divergence)."""
    q = np.asarray(q, dtype=float)
    r = q + 1.0
    out = np.empty_like(r)
    log_lo = math.log(lo) if lo > 0.0 else -math.inf
    log_hi = math.log(hi) if math.isfinite(hi) else math.inf
    diverge = np.zeros(r.shape, dtype=bool)
    if lo == 0.0:
        diverge |= r <= 0.0
    if math.isinf(hi):
        diverge |= r >= 0.0
    out[diverge] = math.inf
    ok = ~diverge
    span = log_hi - log_lo
    with np.errstate(all="ignore"):
        pos = ok & (r > 0.0)
        if np.any(pos):
            rp = r[pos]
            out[pos] = rp * log_hi + np.log(-np.expm1(-rp * span)) - np.log(rp)
        neg = ok & (r < 0.0)
        if np.any(neg):
            rn = r[neg]
            out[neg] = rn * log_lo + np.log(-np.expm1(rn * span)) - np.log(-rn)
        zero = ok & (r == 0.0)
        if np.any(zero):
            out[zero] = math.log(span)
    return out


def _log_power_piece(piece: PowerPiece, block: BlockSpec, p):
    """``log int |c x^e|^p dm(x)`` over the piece, vectorised over ``p``."""
    p = np.asarray(p, dtype=float)
    q = p * piece.e + block.radial_exponent
    return p * math.log(piece.c) + math.log(block.angular_mass) + _log_power_integral(piece.lo, piece.hi, q)


def _log_density(block: BlockSpec, u):
    """``log`` of the radial density at ``r = exp(u)``."""
    u = np.asarray(u, dtype=float)
    if block.homogeneous:
        return math.log(block.angular_mass) + block.radial_exponent * u
    with np.errstate(all="ignore"):
        return np.log(np.asarray(block.radial_density(np.exp(u)), dtype=float))


def _log_grid(U0: float, U1: float) -> np.ndarray:
    core_lo = U0 if math.isfinite(U0) else min(U1, 0.0) - 60.0
    core_hi = U1 if math.isfinite(U1) else max(U0, 0.0) + 60.0
    grid = [np.linspace(core_lo, core_hi, 401)]
    far = np.geomspace(1.0, 1e15, 300)
    if not math.isfinite(U0):
        grid.insert(0, (core_lo - far)[::-1])
    if not math.isfinite(U1):
        grid.append(core_hi + far)
    return np.concatenate(grid)


_WIDTH_PROBES = np.geomspace(1e-12, 1e12, 193)
_PEAK_ROUNDS = 16


def _refine_peaks(log_h, grid: np.ndarray, idx: np.ndarray, p: np.ndarray):
    """Locate each row's maximum between the grid neighbours of the sampled one."""
    lo = grid[np.maximum(idx - 1, 0)][:, None]
    hi = grid[np.minimum(idx + 1, grid.size - 1)][:, None]
    best_u = grid[idx][:, None]
    best = log_h(best_u, p)
    frac = np.linspace(0.0, 1.0, 18)[None, 1:-1]
    for _ in range(_PEAK_ROUNDS):
        nodes = lo + (hi - lo) * frac
        vals = log_h(nodes, p)
        j = np.argmax(vals, axis=1)[:, None]
        cand = np.take_along_axis(vals, j, axis=1)
        better = cand > best
        best_u = np.where(better, np.take_along_axis(nodes, j, axis=1), best_u)
        best = np.where(better, cand, best)
        step = (hi - lo) / 17.0
        lo, hi = np.maximum(lo, best_u - step), np.minimum(hi, best_u + step)
    return best_u, best


def _log_space_integrals(piece: NumericPiece, block: BlockSpec, ps: np.ndarray,
                         tol: float) -> tuple[np.ndarray, np.ndarray]:
    """``log int |g|^p dm`` over the piece for every ``p`` in ``ps``, in the variable ``u = log x``.

    Power and logarithmic behaviour at ``0`` and ``inf`` turns into
    exponential decay in ``u`` and the integrand is handled through its
    logarithm, so arbitrarily large ``p`` stay representable.  For each ``p``
    the range is split at the sampled maximum ``u*``; each half is rescaled by
    the distance over which the log-integrand drops by one and integrated by
    tanh-sinh.  Returns (log values, relative errors); ``inf`` marks a
    divergent integral.
    """
    ps = np.asarray(ps, dtype=float)
    U0 = math.log(piece.lo) if piece.lo > 0.0 else -math.inf
    U1 = math.log(piece.hi) if math.isfinite(piece.hi) else math.inf

    def log_h(u, p):
        with np.errstate(all="ignore"):
            out = p * piece.log_eval(u) + _log_density(block, u) + u
        return np.where(np.isnan(out), -np.inf, out)

    grid = _log_grid(U0, U1)
    vals = log_h(grid[None, :], ps[:, None])
    idx = np.argmax(vals, axis=1)
    rows = np.arange(ps.size)
    scale = vals[rows, idx]
    at_open_end = ((idx == 0) & (not math.isfinite(U0))) | \
        ((idx == grid.size - 1) & (not math.isfinite(U1)))
    diverges = (scale == math.inf) | at_open_end
    empty = scale == -math.inf
    logs = np.where(diverges, math.inf, -math.inf)
    rels = np.zeros(ps.size)
    live = ~(diverges | empty)
    if not np.any(live):
        return logs, rels

    p = ps[live][:, None]
    u_star, top = _refine_peaks(log_h, grid, idx[live], p)
    signs = np.array([[1.0, -1.0]])
    # each side ends where everything beyond stays CUTOFF_DROP below the peak
    level = top - CUTOFF_DROP
    lv = vals[live]
    beyond_right = np.maximum.accumulate(lv[:, ::-1], axis=1)[:, ::-1] < level
    beyond_left = np.maximum.accumulate(lv, axis=1) < level
    pos = np.arange(grid.size)[None, :]
    i_star = idx[live][:, None]
    right = np.where(beyond_right & (pos > i_star), pos, grid.size).min(axis=1)
    left = np.where(beyond_left & (pos < i_star), pos, -1).max(axis=1)
    hi_end = np.where(right < grid.size, grid[np.minimum(right, grid.size - 1)], U1)[:, None]
    lo_end = np.where(left >= 0, grid[np.maximum(left, 0)], U0)[:, None]
    reach = np.where(signs > 0, hi_end - u_star, u_star - lo_end)
    # width: largest probe step with a drop of at most one
    steps = np.minimum(_WIDTH_PROBES[None, None, :], reach[:, :, None])
    drop = top[:, :, None] - log_h(u_star[:, :, None] + signs[:, :, None] * steps, p[:, :, None])
    ok = drop <= 1.0
    width = np.where(ok, steps, 0.0).max(axis=2)
    width = np.where(width > 0.0, width, steps[:, :, 0])
    width = np.where(width > 0.0, width, 1.0)
    has = reach > 0.0
    span = np.where(has, reach / width, 0.0)

    # peak-normalised: the log-mode error estimate is not scale invariant
    def f(w, us, sg, wd, pp, tp):
        return log_h(us + sg * w * wd, pp) - tp

    with np.errstate(all="ignore"):
        res = tanhsinh(f, 0.0, span, args=(u_star, signs, width, p, top), log=True,
                       rtol=math.log(tol), maxlevel=TANH_SINH_LEVELS)
    shift = top + np.log(width)
    part = np.where(has, np.real(res.integral) + shift, -np.inf)
    part_err = np.where(has, np.real(res.error) + shift, -np.inf)
    good = np.all(res.success | ~has, axis=1)
    with np.errstate(all="ignore"):
        total = logsumexp(part, axis=1)
        err = np.exp(logsumexp(part_err, axis=1) - total)
    out_logs = np.where(good, total, np.nan)
    out_rels = np.where(good, np.nan_to_num(err), np.nan)
    for j in np.flatnonzero(~good):
        out_logs[j], out_rels[j] = _log_space_quadpack(piece, block, float(p[j, 0]), tol,
                                                       float(u_star[j, 0]), float(top[j, 0]))
    logs[live] = out_logs
    rels[live] = out_rels
    return logs, rels


def _log_space_quadpack(piece: NumericPiece, block: BlockSpec, p: float, tol: float,
                        u_star: float, top: float) -> tuple[float, float]:
    """Fallback for :func:`_log_space_integrals` through the adaptive engine."""
    U0 = math.log(piece.lo) if piece.lo > 0.0 else -math.inf
    U1 = math.log(piece.hi) if math.isfinite(piece.hi) else math.inf

    def log_h(u):
        with np.errstate(all="ignore"):
            out = float(p * piece.log_eval(u) + _log_density(block, u) + u)
        return -math.inf if math.isnan(out) else out

    total, err = 0.0, 0.0
    for sign, reach in ((1.0, U1 - u_star), (-1.0, u_star - U0)):
        if not reach > 0.0:
            continue
        h = lambda v, sign=sign: math.exp(min(log_h(u_star + sign * v) - top, 700.0))
        res = log_integral(h, 0.0, reach, rel_tol=tol)
        if res.log_value > -math.inf:
            v = math.exp(res.log_value)
            total += v
            err += v * res.rel_error
    if total == 0.0:
        return -math.inf, 0.0
    return top + math.log(total), err / total


def _numeric_log_integrals(piece: NumericPiece, block: BlockSpec, ps: np.ndarray,
                           tol: float) -> tuple[np.ndarray, np.ndarray]:
    """``log int |g|^p dm`` over the piece by quadrature; returns (log values, rel errors)."""
    return _log_space_integrals(piece, block, ps, tol)


def _as_numeric(piece: Piece) -> NumericPiece:
    if isinstance(piece, NumericPiece):
        return piece
    c, e = piece.c, piece.e
    return NumericPiece(piece.lo, piece.hi, lambda x: c * np.power(x, e), "power", piece.log_eval)


def _factor_log_integrals(factor: Factor, block: BlockSpec, ps: np.ndarray, tol: float,
                          force_quadrature: bool) -> tuple[np.ndarray, np.ndarray, bool]:
    """``log int |f_r|^p dm_r`` for each ``p``; returns (log values, rel errors, used quadrature)."""
    logs = []
    errs = []
    used_quad = False
    for piece in factor.pieces:
        if isinstance(piece, PowerPiece) and block.homogeneous and not force_quadrature:
            logs.append(np.asarray(_log_power_piece(piece, block, ps), dtype=float))
            errs.append(np.zeros(ps.size))
        else:
            used_quad = True
            lv, rel = _numeric_log_integrals(_as_numeric(piece), block, ps, tol)
            logs.append(lv)
            errs.append(rel)
    if not logs:
        return np.full(ps.size, -math.inf), np.zeros(ps.size), used_quad
    logs = np.array(logs)
    errs = np.array(errs)
    with np.errstate(invalid="ignore"):
        total = logsumexp(logs, axis=0)
        weights = np.nan_to_num(np.exp(logs - total))
    rel = np.sum(weights * errs, axis=0)
    diverges = np.any(np.isposinf(logs), axis=0)
    total = np.where(diverges, math.inf, total)
    rel = np.where(diverges, 0.0, rel)
    return total, rel, used_quad


def _log_lp(f: ProductFunction, ps: np.ndarray, tol: float, force: bool):
    """(log norms, relative errors of the p-th powers, used quadrature)."""
    total = np.zeros(ps.size)
    rel = np.zeros(ps.size)
    zero = np.zeros(ps.size, dtype=bool)
    used_quad = False
    for fac, block in zip(f.factors, f.domain.blocks):
        lv, r, q = _factor_log_integrals(fac, block, ps, tol, force)
        used_quad |= q
        zero |= lv == -math.inf
        with np.errstate(invalid="ignore"):
            total = total + lv
        rel = rel + r
    total = np.where(zero, -math.inf, total)
    rel = np.where(np.isfinite(total), rel, 0.0)
    return total / ps, rel, used_quad


def lp_norm(f: ProductFunction, p: float, tol: float = 1e-10, method: str | None = None) -> LpResult:
    """Weighted norm ``(prod_r int |f_r|^p dm_r)^(1/p)``.

    Parameters
    ----------
    f : ProductFunction
    p : float
        Exponent, ``1 <= p < inf``.
    tol : float
        Relative tolerance handed to the quadrature engine.
    method : {None, "analytic", "quadrature"}
        ``None`` picks the analytic path whenever every piece is a power piece
        on a homogeneous block; ``"quadrature"`` forces numerical integration.

    Returns
    -------
    LpResult
        ``value`` is ``inf`` when a factor integral diverges.
    """
    if not (p >= 1.0 and math.isfinite(p)):
        raise ValueError(f"p must be finite and >= 1, got {p!r}")
    force = method == QUADRATURE
    if method == ANALYTIC and not (f.is_power and all(b.homogeneous for b in f.domain.blocks)):
        raise ValueError("analytic path needs power pieces on homogeneous blocks")
    if f.is_zero:
        return LpResult(0.0, ANALYTIC if not force else QUADRATURE, 0.0, -math.inf)
    logs, rels, used_quad = _log_lp(f, np.array([float(p)]), tol, force)
    log_value, rel = float(logs[0]), float(rels[0])
    path = QUADRATURE if used_quad else ANALYTIC
    if log_value == -math.inf:
        return LpResult(0.0, path, 0.0, -math.inf)
    if math.isinf(log_value):
        return LpResult(math.inf, path, 0.0, math.inf)
    value = math.exp(log_value) if log_value < 709.0 else math.inf
    return LpResult(value, path, value * rel / p if used_quad else 0.0, log_value)


def log_lp_norms(f: ProductFunction, ps, tol: float = 1e-10) -> np.ndarray:
    """``log |f|_p`` for an array of exponents (vectorised on the analytic path)."""
    ps = np.atleast_1d(np.asarray(ps, dtype=float))
    if f.is_zero:
        return np.full(ps.shape, -math.inf)
    if f.is_power and all(b.homogeneous for b in f.domain.blocks):
        total = np.zeros_like(ps)
        for fac, block in zip(f.factors, f.domain.blocks):
            terms = np.array([_log_power_piece(q, block, ps) for q in fac.pieces])
            with np.errstate(invalid="ignore"):
                total = total + logsumexp(terms, axis=0)
        return total / ps
    return _log_lp(f, ps, tol, False)[0]


# ---------------------------------------------------------------------------
# structural operations


def _truncate_piece(piece: Piece, lo: float, hi: float, cap: float) -> list[Piece]:
    """Part of ``piece`` inside ``(lo, hi)`` where its value does not exceed ``cap``."""
    a, b = max(piece.lo, lo), min(piece.hi, hi)
    if not a < b:
        return []
    if isinstance(piece, NumericPiece):
        g = piece.func

        def cut(x, g=g):
            v = np.abs(np.asarray(g(x), dtype=float))
            return np.where(v <= cap, v, 0.0)

        return [NumericPiece(a, b, cut, f"{piece.label}[<={cap:g}]")]
    c, e = piece.c, piece.e
    if math.isinf(cap):
        return [PowerPiece(a, b, c, e)]
    if e == 0.0:
        return [PowerPiece(a, b, c, 0.0)] if c <= cap else []
    cross = (cap / c) ** (1.0 / e)  # c x^e == cap
    if e < 0.0:
        a = max(a, cross)
    else:
        b = min(b, cross)
    return [PowerPiece(a, b, c, e)] if a < b else []


def truncate(f: ProductFunction, n: int) -> ProductFunction:
    """``f * 1{box} * 1{|f| <= n}`` with the box ``(1/n, n)`` in every coordinate.

    On blocks of dimension two or more the box is read radially (the shell
    ``1/n < |x| < n``).  For several blocks the height condition is imposed on
    the first factor against ``n`` divided by the sup of the other factors on
    the box, which keeps product form and still increases to ``f``.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    lo, hi = 1.0 / n, float(n)
    rest_sup = 1.0
    for fac in f.factors[1:]:
        rest_sup *= _factor_sup(fac, lo, hi)
    factors = []
    for j, fac in enumerate(f.factors):
        cap = (n / rest_sup if rest_sup > 0.0 else math.inf) if j == 0 else math.inf
        pieces = []
        for q in fac.pieces:
            pieces.extend(_truncate_piece(q, lo, hi, cap))
        factors.append(Factor(tuple(pieces)))
    return ProductFunction(tuple(factors), f.domain)


def _factor_sup(fac: Factor, lo: float, hi: float) -> float:
    best = 0.0
    for q in fac.pieces:
        a, b = max(q.lo, lo), min(q.hi, hi)
        if not a < b:
            continue
        if isinstance(q, PowerPiece):
            best = max(best, q.c * a ** q.e, q.c * b ** q.e)
        else:
            xs = np.linspace(a, b, 257)[1:-1]
            best = max(best, float(np.max(q(xs))))
    return best


def scale_arg(f: ProductFunction, s: Sequence[float]) -> ProductFunction:
    """The dilation ``x -> f(x(d(1))/s(1), ..., x(d(k))/s(k))``, kept in structural form."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if s.size != f.domain.k:
        raise ValueError(f"s has {s.size} entries, domain has {f.domain.k} blocks")
    if np.any(~(s > 0.0)):
        raise ValueError("dilation vector must be positive")
    factors = []
    for fac, sj in zip(f.factors, s):
        if sj == 1.0:
            factors.append(fac)
        else:
            factors.append(Factor(tuple(q.scaled(float(sj)) for q in fac.pieces)))
    return ProductFunction(tuple(factors), f.domain)


def add_line_functions(f: ProductFunction, g: ProductFunction) -> ProductFunction:
    """Pointwise sum of two one-block functions (numeric pieces where they overlap)."""
    if f.domain.k != 1 or g.domain != f.domain:
        raise ValueError("sums are implemented for one-block functions on the same domain")
    ff, gf = f.factors[0], g.factors[0]
    cuts = sorted(set(ff.breakpoints()) | set(gf.breakpoints()))
    pieces: list[Piece] = []
    for a, b in zip(cuts, cuts[1:]):
        mid = math.sqrt(a * b) if a > 0.0 and math.isfinite(b) else (b / 2.0 if a == 0.0 else a * 2.0)
        fp = [q for q in ff.pieces if q.lo < mid < q.hi]
        gp = [q for q in gf.pieces if q.lo < mid < q.hi]
        live = fp + gp
        if not live:
            continue
        if len(live) == 1:
            q = live[0]
            pieces.append(PowerPiece(a, b, q.c, q.e) if isinstance(q, PowerPiece)
                          else NumericPiece(a, b, q.func, q.label, q.log_func))
            continue
        if all(isinstance(q, PowerPiece) for q in live) and live[0].e == live[1].e:
            pieces.append(PowerPiece(a, b, live[0].c + live[1].c, live[0].e))
            continue
        parts = tuple(live)
        pieces.append(NumericPiece(
            a, b, lambda x, parts=parts: sum(q(x) for q in parts), "sum",
            lambda u, parts=parts: np.logaddexp.reduce([q.log_eval(u) for q in parts], axis=0)))
    return ProductFunction((Factor(tuple(pieces)),), f.domain)


def _transplant_piece(piece: Piece, src: BlockSpec, dst: BlockSpec) -> Piece:
    # measure coordinate t = m r**n / n on each block; r_dst = (t * n_dst / m_dst)**(1/n_dst)
    n_s, n_d = src.radial_exponent + 1.0, dst.radial_exponent + 1.0
    k_s, k_d = src.angular_mass / n_s, dst.angular_mass / n_d

    def to_dst(r):
        return (k_s * r ** n_s / k_d) ** (1.0 / n_d)

    lo, hi = to_dst(piece.lo), to_dst(piece.hi) if math.isfinite(piece.hi) else math.inf
    if isinstance(piece, PowerPiece):
        # r_src = (k_d r**n_d / k_s)**(1/n_s)
        ratio = n_d / n_s
        return PowerPiece(lo, hi, piece.c * (k_d / k_s) ** (piece.e / n_s), piece.e * ratio)
    g = piece.func
    back = lambda r: (k_d * np.asarray(r, dtype=float) ** n_d / k_s) ** (1.0 / n_s)
    log_func = None
    if piece.log_func is not None:
        # affine in u = log r
        shift, slope, lf = math.log(k_d / k_s) / n_s, n_d / n_s, piece.log_func
        log_func = lambda u: lf(shift + slope * np.asarray(u, dtype=float))
    return NumericPiece(lo, hi, lambda r: g(back(r)), f"{piece.label}~", log_func)


def transplant(f: ProductFunction, domain: WeightedDomain) -> ProductFunction:
    """Equimeasurable copy of a one-block function on ``domain``.

    The first block receives the radial rearrangement with the same
    distribution function, the other blocks the indicator of a ball of unit
    measure, so every ``|.|_p`` is preserved.
    """
    if f.domain.k != 1:
        raise ValueError("transplant starts from a one-block function")
    src = f.domain.blocks[0]
    dst = domain.blocks[0]
    if not (src.homogeneous and dst.homogeneous):
        raise ValueError("transplant needs homogeneous blocks")
    first = Factor(tuple(_transplant_piece(q, src, dst) for q in f.factors[0].pieces))
    rest = tuple(power_factor((0.0, b.radius_for_measure(1.0), 1.0, 0.0)) for b in domain.blocks[1:])
    return ProductFunction((first,) + rest, domain)
