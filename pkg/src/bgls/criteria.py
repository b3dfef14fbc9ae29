"""Boundedness rules for Hardy-type operators, the maximal operator, the Hilbert
transform and Fourier partial sums on ``G(psi; a, b)``, plus a numerical probe.

The Hardy operators on ``R_+`` are

    P_alpha f(t) = t**-alpha * int_0^t s**(alpha - 1) f(s) ds,
    Q_beta  f(t) = t**-beta  * int_t^inf s**(beta - 1) f(s) ds.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss, legint, legvander
from scipy.integrate import IntegrationWarning, quad
from scipy.special import logsumexp

from .functions import PowerPiece, ProductFunction, _log_power_integral
from .grand import GrandSpace
from .grid import Interval, sup_over_p

P_ALPHA = "P_alpha"
Q_BETA = "Q_beta"
MAXIMAL = "maximal"
HILBERT = "hilbert"
FOURIER = "fourier"
OPERATORS = (P_ALPHA, Q_BETA, MAXIMAL, HILBERT, FOURIER)

PLATEAU_CHANGE = 0.01
GROWTH_CHANGE = 0.10
PROBE_WINDOW = 3
PROBE_LEVELS = 13
PANEL_WIDTH = 2.0
PANEL_NODES = 16

BOUNDED_CONSISTENT = "bounded-consistent"
UNBOUNDED_CONSISTENT = "unbounded-consistent"
INCONCLUSIVE = "inconclusive"


class HardyDivergence(ArithmeticError):
    """The defining integral of a Hardy operator diverges."""


class WeightedDomainError(ValueError):
    """The Hardy criteria are stated for ``R_+`` without weight."""


@dataclass(frozen=True)
class CriterionVerdict:
    operator: str
    parameters: dict = field(default_factory=dict)
    bounded: bool = False
    condition_text: str = ""


def _check_param(name: str, value) -> float:
    if value is None:
        raise ValueError(f"{name} is required")
    v = float(value)
    if not 0.0 < v < 1.0:
        raise ValueError(f"{name} must lie in (0, 1), got {value!r}")
    return v


def boundedness(operator: str, interval: Interval, parameters: dict | None = None) -> CriterionVerdict:
    """Verdict of the literal rule; boundary cases count as unbounded."""
    params = dict(parameters or {})
    a, b = interval.a, interval.b
    if operator == P_ALPHA:
        alpha = _check_param("alpha", params.get("alpha"))
        return CriterionVerdict(operator, {"alpha": alpha}, alpha > 1.0 / a, "alpha > 1/a")
    if operator == Q_BETA:
        beta = _check_param("beta", params.get("beta"))
        inv_b = 1.0 / b if interval.finite else 0.0
        return CriterionVerdict(operator, {"beta": beta}, beta < inv_b, "beta < 1/b")
    if params:
        raise ValueError(f"{operator} takes no parameters, got {sorted(params)}")
    if operator == MAXIMAL:
        return CriterionVerdict(operator, {}, a > 1.0, "a > 1")
    if operator in (HILBERT, FOURIER):
        return CriterionVerdict(operator, {}, a > 1.0 and interval.finite, "a > 1 and b < inf")
    raise ValueError(f"unknown operator {operator!r}; expected one of {OPERATORS}")


def verdict_table(interval: Interval, alpha: float, beta: float) -> list[CriterionVerdict]:
    return [boundedness(P_ALPHA, interval, {"alpha": alpha}),
            boundedness(Q_BETA, interval, {"beta": beta}),
            boundedness(MAXIMAL, interval),
            boundedness(HILBERT, interval),
            boundedness(FOURIER, interval)]


# ---------------------------------------------------------------------------
# pointwise values


def _line_factor(f: ProductFunction):
    dom = f.domain
    if not dom.is_unweighted_line:
        raise WeightedDomainError("Hardy operators act on R_+ with Lebesgue measure")
    return f.factors[0]


def _piece_moment(piece, lo: float, hi: float, q: float) -> float:
    """``int_lo^hi s**q piece(s) ds`` (``HardyDivergence`` if infinite)."""
    lo, hi = max(lo, piece.lo), min(hi, piece.hi)
    if not lo < hi:
        return 0.0
    if isinstance(piece, PowerPiece):
        lv = float(_log_power_integral(lo, hi, q + piece.e))
        if math.isinf(lv):
            raise HardyDivergence(f"s^{q + piece.e:g} is not integrable on ({lo:g}, {hi:g})")
        return piece.c * math.exp(lv)
    # smooth in u = log s
    g = lambda u: float(math.exp((q + 1.0) * u) * piece(np.array([math.exp(u)]))[0])
    u_lo = math.log(lo) if lo > 0.0 else -745.0
    u_hi = math.log(hi) if math.isfinite(hi) else 709.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            val, _ = quad(g, u_lo, u_hi, limit=1000, epsabs=0.0, epsrel=1e-11)
        except IntegrationWarning as exc:
            raise HardyDivergence(f"moment of {piece.label} on ({lo:g}, {hi:g}) did not converge") from exc
    if not math.isfinite(val):
        raise HardyDivergence(f"moment of {piece.label} diverges on ({lo:g}, {hi:g})")
    return val


def hardy_P(f: ProductFunction, alpha: float, t: float) -> float:
    """``P_alpha f(t)``; analytic on power pieces."""
    fac = _line_factor(f)
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if not t > 0.0:
        raise ValueError("t must be positive")
    total = sum(_piece_moment(q, 0.0, t, alpha - 1.0) for q in fac.pieces)
    return t ** (-alpha) * total


def hardy_Q(f: ProductFunction, beta: float, t: float) -> float:
    """``Q_beta f(t)``; analytic on power pieces."""
    fac = _line_factor(f)
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie in (0, 1)")
    if not t > 0.0:
        raise ValueError("t must be positive")
    total = sum(_piece_moment(q, t, math.inf, beta - 1.0) for q in fac.pieces)
    return t ** (-beta) * total


# ---------------------------------------------------------------------------
# the probe, in the variable u = log x
#
# Truncation levels run to log n ~ 1e4, far beyond the floating range of x,
# so functions are handled through u and log values only.


@dataclass(frozen=True)
class LogPiece:
    """``log g(exp(u)) = log_eval(u)`` for ``u0 < u < u1``."""

    u0: float
    u1: float
    log_eval: object = field(compare=False)


@dataclass(frozen=True)
class PowerTail:
    """``exp(log_c + e u)`` on ``(u0, u1)`` with one infinite end."""

    u0: float
    u1: float
    log_c: float
    e: float

    def log_moment(self, ps: np.ndarray) -> np.ndarray:
        """``log int exp(p (log_c + e u) + u) du`` (``inf`` when divergent)."""
        r = ps * self.e + 1.0
        out = np.full(ps.shape, math.inf)
        if math.isinf(self.u1):
            ok = r < 0.0
            out[ok] = ps[ok] * self.log_c + r[ok] * self.u0 - np.log(-r[ok])
        else:
            ok = r > 0.0
            out[ok] = ps[ok] * self.log_c + r[ok] * self.u1 - np.log(r[ok])
        return out


@dataclass(frozen=True)
class SampledLine:
    """Nonnegative function on ``R_+`` through node log values on a bounded ``u`` range plus power tails.

    ``log |g|_p**p`` is a log-sum over ``p * log value + log weight`` at the
    nodes plus closed forms for the tails, vectorised over ``p``.
    """

    log_values: np.ndarray
    log_weights: np.ndarray
    tails: tuple[PowerTail, ...] = ()

    def log_norms(self, ps) -> np.ndarray:
        ps = np.atleast_1d(np.asarray(ps, dtype=float))
        terms = [logsumexp(ps[:, None] * self.log_values[None, :] + self.log_weights[None, :], axis=1)]
        terms += [t.log_moment(ps) for t in self.tails]
        with np.errstate(invalid="ignore"):
            return logsumexp(np.array(terms), axis=0) / ps


def log_truncation(f: ProductFunction, log_n: float) -> tuple[LogPiece, ...]:
    """Pieces of ``f_n = f 1{1/n < x < n} 1{f <= n}`` for ``n = exp(log_n)``."""
    fac = _line_factor(f)
    out = []
    for q in fac.pieces:
        u0 = max(math.log(q.lo) if q.lo > 0.0 else -math.inf, -log_n)
        u1 = min(math.log(q.hi) if math.isfinite(q.hi) else math.inf, log_n)
        if not u0 < u1:
            continue

        def cut(u, q=q):
            v = q.log_eval(u)
            return np.where(v <= log_n, v, -np.inf)

        out.append(LogPiece(u0, u1, cut))
    return tuple(out)


def _panels(pieces) -> tuple[np.ndarray, np.ndarray, list]:
    """Panel edges ``(v0, v1)`` of width at most :data:`PANEL_WIDTH` inside each piece."""
    v0, v1, owner = [], [], []
    for idx, pc in enumerate(pieces):
        k = max(1, int(math.ceil((pc.u1 - pc.u0) / PANEL_WIDTH)))
        edges = np.linspace(pc.u0, pc.u1, k + 1)
        v0.append(edges[:-1])
        v1.append(edges[1:])
        owner += [idx] * k
    return np.concatenate(v0), np.concatenate(v1), owner


def _nodes(pieces):
    t, w = leggauss(PANEL_NODES)
    v0, v1, owner = _panels(pieces)
    half = 0.5 * (v1 - v0)
    U = 0.5 * (v0 + v1)[:, None] + half[:, None] * t[None, :]
    logf = np.empty_like(U)
    owner = np.asarray(owner)
    for idx, pc in enumerate(pieces):
        rows = owner == idx
        with np.errstate(all="ignore"):
            logf[rows] = pc.log_eval(U[rows])
    logf = np.where(np.isnan(logf), -np.inf, logf)
    return U, half, logf, t, w


def sample_pieces(pieces) -> SampledLine:
    if not pieces:
        return SampledLine(np.array([-np.inf]), np.array([0.0]))
    U, half, logf, t, w = _nodes(pieces)
    logw = np.log(half)[:, None] + np.log(w)[None, :] + U
    return SampledLine(logf.ravel(), logw.ravel())


def _log_cumulative(logh: np.ndarray, half: np.ndarray, t: np.ndarray, w: np.ndarray,
                    from_right: bool) -> tuple[np.ndarray, float]:
    """Log of the running integral of ``exp(logh)`` (``du``) at every node, and of the total.

    Each panel interpolates its (rescaled) integrand by Legendre polynomials
    and integrates the interpolant exactly; panel totals are accumulated in
    log form.
    """
    n = t.size
    k = np.arange(n)
    to_coef = (legvander(t, n - 1) * w[:, None]).T * ((2 * k + 1) / 2.0)[:, None]
    m = np.max(logh, axis=1)
    m = np.where(np.isfinite(m), m, 0.0)
    H = np.exp(logh - m[:, None])
    coef = to_coef @ H.T  # (n, panels)
    lbnd = 1.0 if from_right else -1.0
    integ = legint(coef, lbnd=lbnd, axis=0) * half[None, :]
    V = legvander(t, n)  # (n, n + 1)
    partial = V @ integ  # integral from the panel's start side to each node
    edge = np.sum(integ * ((-1.0) ** np.arange(n + 1))[:, None], axis=0) if from_right \
        else np.sum(integ, axis=0)
    if from_right:
        partial, edge = -partial, -edge
    with np.errstate(divide="ignore", invalid="ignore"):
        log_part = np.log(np.maximum(partial, 0.0)).T + m[:, None]
        log_edge = np.log(np.maximum(edge, 0.0)) + m
    if from_right:
        after = np.logaddexp.accumulate(log_edge[::-1])[::-1]
        before = np.concatenate([after[1:], [-np.inf]])
    else:
        upto = np.logaddexp.accumulate(log_edge)
        before = np.concatenate([[-np.inf], upto[:-1]])
    total = float(np.logaddexp.reduce(log_edge))
    return np.logaddexp(before[:, None], log_part), total


def hardy_transform_log(pieces, operator: str, param: float) -> SampledLine:
    """``P_alpha`` or ``Q_beta`` of a compactly supported function given by :class:`LogPiece` s.

    Outside the support the transform is an exact power: ``C t**-alpha`` to
    the right for ``P_alpha`` and ``C t**-beta`` to the left for ``Q_beta``.
    """
    if not pieces:
        return SampledLine(np.array([-np.inf]), np.array([0.0]))
    u_lo, u_hi = pieces[0].u0, pieces[-1].u1
    if not (math.isfinite(u_lo) and math.isfinite(u_hi)):
        raise ValueError("the transform is sampled for compactly supported functions")
    U, half, logf, t, w = _nodes(pieces)
    logh = param * U + logf  # s**(param - 1) f(s) ds = exp(param u) f du
    if operator == P_ALPHA:
        cum, total = _log_cumulative(logh, half, t, w, from_right=False)
        tail = PowerTail(u_hi, math.inf, total, -param)
    elif operator == Q_BETA:
        cum, total = _log_cumulative(logh, half, t, w, from_right=True)
        tail = PowerTail(-math.inf, u_lo, total, -param)
    else:
        raise ValueError(f"no numerical transform for {operator!r}")
    logw = np.log(half)[:, None] + np.log(w)[None, :] + U
    tails = (tail,) if math.isfinite(total) else ()
    return SampledLine((cum - param * U).ravel(), logw.ravel(), tails)


def sampled_norm(space: GrandSpace, g: SampledLine) -> float:
    psi = space.psi
    return sup_over_p(lambda p: g.log_norms(p) - psi.log(p), space.interval).value


@dataclass(frozen=True)
class ProbeReport:
    operator: str
    parameter: float
    log_ns: tuple[float, ...]
    ratios: tuple[float, ...]
    flag: str


def _flag(ratios: np.ndarray) -> str:
    tail = ratios[-PROBE_WINDOW:]
    if np.all(np.isinf(tail)):
        return UNBOUNDED_CONSISTENT
    if not np.all(np.isfinite(tail)):
        return INCONCLUSIVE
    change = tail[1:] / tail[:-1] - 1.0
    if np.all(np.abs(change) < PLATEAU_CHANGE):
        return BOUNDED_CONSISTENT
    if np.all(change > GROWTH_CHANGE):
        return UNBOUNDED_CONSISTENT
    return INCONCLUSIVE


def hardy_norm_probe(operator: str, space: GrandSpace, parameter: float,
                     probe_levels: int = PROBE_LEVELS) -> ProbeReport:
    """``r_n = ||T f_n|| / ||f_n||`` over truncations ``f_n`` of the representation.

    The levels are ``n = 2**(2**k)``, ``k = 1..probe_levels``: the ratio
    approaches its limit roughly like a power of ``1 / log n``, so the levels
    double ``log n`` rather than ``n``.  The flag reads ``bounded-consistent``
    when ``r_n`` changes by less than 1% across the last three levels and
    ``unbounded-consistent`` when it is infinite there or grows by more than
    10% per level.
    """
    rep = space.psi.representation
    if rep is None:
        raise ValueError("the probe starts from the representation of psi")
    if not space.domain.is_unweighted_line or rep.domain != space.domain:
        raise WeightedDomainError("the probe runs on R_+ without weight")
    if probe_levels < PROBE_WINDOW:
        raise ValueError(f"probe_levels must be at least {PROBE_WINDOW}")
    log_ns = tuple(2.0 ** k * math.log(2.0) for k in range(1, probe_levels + 1))
    ratios = []
    for log_n in log_ns:
        pieces = log_truncation(rep, log_n)
        den = sampled_norm(space, sample_pieces(pieces))
        num = sampled_norm(space, hardy_transform_log(pieces, operator, parameter))
        ratios.append(num / den if den > 0.0 else math.nan)
        if len(ratios) >= PROBE_WINDOW and all(math.isinf(r) for r in ratios[-PROBE_WINDOW:]):
            log_ns = log_ns[: len(ratios)]
            break
    return ProbeReport(operator, parameter, log_ns, tuple(ratios), _flag(np.array(ratios)))


def probe_parameters(interval: Interval) -> dict[str, tuple[float, ...]]:
    """One parameter on each side of the rule (where that side is non-empty)."""
    a, b = interval.a, interval.b
    inv_a = 1.0 / a
    inv_b = 1.0 / b if interval.finite else 0.0
    alphas = [0.5 * inv_a]
    if inv_a < 1.0:
        alphas.append(0.5 * (inv_a + 1.0))
    betas = [0.5 * (inv_b + inv_a)]
    if inv_b > 0.0:
        betas.append(0.5 * inv_b)
    return {P_ALPHA: tuple(alphas), Q_BETA: tuple(betas)}
