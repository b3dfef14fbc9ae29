"""Boyd and Shimogaki indices of grand Lebesgue spaces.

Boyd indices are log-log slopes of the dilation norm ``h(s)`` in one block
coordinate.  Shimogaki indices are log-log slopes of
``M(t) = sup_s phi(s t) / phi(s)``.  Both are limits, estimated by
:func:`bgls.extrapolation.limit_of_slopes`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .dilation import MissingRepresentation, log_dilation_norm_closed_form
from .domain import WeightedDomain
from .extrapolation import limit_of_slopes, richardson_limit, tail_fit, two_point_slopes
from .grand import GrandSpace, log_fundamental, log_fundamental_grid
from .grid import Interval
from .psi import PsiFunction, constant_psi

UPPER = "upper"
LOWER = "lower"
INDEX_LEVELS = 12
SANDWICH_SLACK = 0.02
SANDWICH_FLOOR = 1e-3
DEFINITION_MISMATCH = 0.02
S_GRID_DECADES = 8
S_GRID_POINTS = 65


@dataclass(frozen=True)
class IndexReport:
    """Per-block Boyd indices next to ``(d(j) + theta(j)) / a`` and ``/ b``.

    ``closed_form`` and ``numerical`` list ``B+_1, B-_1, B+_2, B-_2, ...``.
    ``fit_residual`` is the largest RMS residual of a straight-line fit to the
    four largest scales.
    """

    closed_form: tuple[float, ...]
    numerical: tuple[float, ...]
    per_block: tuple[tuple[float, float], ...]
    fit_residual: float

    def max_rel_error(self, floor: float = SANDWICH_FLOOR) -> float:
        c = np.asarray(self.closed_form)
        n = np.asarray(self.numerical)
        return float(np.max(np.abs(n - c) / np.maximum(np.abs(c), floor)))


@dataclass(frozen=True)
class ShimogakiReport:
    """Shimogaki indices as limits, plus the definitional inf/sup over sampled ``t``."""

    beta_minus: float
    beta_plus: float
    M_profile: tuple[np.ndarray, np.ndarray] = field(repr=False, compare=False)
    beta_minus_sampled: float = math.nan
    beta_plus_sampled: float = math.nan
    definitions_disagree: bool = False


def nu_from_pair(psi: PsiFunction, zeta: PsiFunction) -> PsiFunction:
    """``nu = zeta / psi``, the only ``nu`` compatible with ``zeta = psi * nu``."""
    if psi.interval != zeta.interval:
        raise ValueError(f"{psi.interval} vs {zeta.interval}")
    f, g = psi.log_eval, zeta.log_eval
    return PsiFunction(psi.interval, lambda p: g(p) - f(p), label=f"{zeta.label}/{psi.label}")


def _block_logs(direction: str, levels: int) -> np.ndarray:
    if direction not in (UPPER, LOWER):
        raise ValueError(f"direction must be {UPPER!r} or {LOWER!r}")
    sign = 1.0 if direction == UPPER else -1.0
    return sign * 2.0 * math.log(10.0) * np.arange(1, levels + 1)


def boyd_curve(psi: PsiFunction, nu: PsiFunction, domain: WeightedDomain, j: int,
               direction: str, levels: int = INDEX_LEVELS) -> tuple[np.ndarray, np.ndarray]:
    """``(log s(j), log h(s))`` along ``s(j) = 10**(+-2m)`` with the other coordinates at 1."""
    if not 0 <= j < domain.k:
        raise IndexError(f"block {j} out of range for {domain.k} blocks")
    logs = _block_logs(direction, levels)
    logh = []
    for L in logs:
        s = np.ones(domain.k)
        s[j] = math.exp(L) if abs(L) < 700 else math.inf
        if not math.isfinite(s[j]):
            raise OverflowError("scale out of floating range; lower levels")
        logh.append(log_dilation_norm_closed_form(psi, nu, domain, s))
    return logs, np.array(logh)


def boyd_index(psi: PsiFunction, nu: PsiFunction, domain: WeightedDomain, j: int,
               direction: str, levels: int = INDEX_LEVELS) -> float:
    """Upper (``s(j) -> inf``) or lower (``s(j) -> 0``) Boyd index of block ``j``.

    Expected ``(d(j) + theta(j)) / a`` (upper) and ``(d(j) + theta(j)) / b``
    (lower).  ``j`` is zero-based.
    """
    if psi.representation is None:
        raise MissingRepresentation("Boyd indices are stated for psi with a representation")
    logs, logh = boyd_curve(psi, nu, domain, j, direction, levels)
    return limit_of_slopes(logs, logh)


def boyd_closed_form(interval: Interval, domain: WeightedDomain, j: int) -> tuple[float, float]:
    """``((d(j) + theta(j)) / a, (d(j) + theta(j)) / b)``."""
    block = domain.blocks[j]
    w = block.dim + block.theta
    return w / interval.a, (w / interval.b if interval.finite else 0.0)


def boyd_report(psi: PsiFunction, nu: PsiFunction, domain: WeightedDomain,
                levels: int = INDEX_LEVELS) -> IndexReport:
    closed, numerical, per_block = [], [], []
    resid = 0.0
    for j in range(domain.k):
        up_c, lo_c = boyd_closed_form(psi.interval, domain, j)
        pair = []
        for direction in (UPPER, LOWER):
            logs, logh = boyd_curve(psi, nu, domain, j, direction, levels)
            pair.append(limit_of_slopes(logs, logh))
            resid = max(resid, tail_fit(logs, logh)[1])
        closed += [up_c, lo_c]
        numerical += pair
        per_block.append((pair[0], pair[1]))
    return IndexReport(tuple(closed), tuple(numerical), tuple(per_block), resid)


def _log_phi(space: GrandSpace, L) -> float:
    return log_fundamental(space, float(L)).log_value


def _default_s_grid() -> np.ndarray:
    return np.linspace(-S_GRID_DECADES, S_GRID_DECADES, S_GRID_POINTS) * math.log(10.0)


def shimogaki_log_M(space: GrandSpace, log_t: float, s_grid=None) -> tuple[float, float]:
    """``(log M(t), log s*)`` with ``M(t) = sup_s phi(s t) / phi(s)`` over a log grid of ``s``.

    The default grid is ``10**-8 .. 10**8`` with 65 points.  The grid
    maximiser is located with grid-only values of ``phi``, then the
    increment is recomputed with refined suprema at that point and its
    neighbours and polished by a bounded scalar search.
    """
    Ls = _default_s_grid() if s_grid is None else np.log(np.asarray(s_grid, dtype=float))
    if log_t == 0.0:
        return 0.0, float(Ls[0])
    rough = log_fundamental_grid(space, Ls + log_t) - log_fundamental_grid(space, Ls)
    i = int(np.argmax(rough))
    diff = lambda L: _log_phi(space, L + log_t) - _log_phi(space, L)
    cand = [j for j in (i - 1, i, i + 1) if 0 <= j < len(Ls)]
    vals = [diff(Ls[j]) for j in cand]
    k = int(np.argmax(vals))
    best, L_best = float(vals[k]), float(Ls[cand[k]])
    j = cand[k]
    if 0 < j < len(Ls) - 1:
        res = minimize_scalar(lambda L: -diff(L), bounds=(Ls[j - 1], Ls[j + 1]),
                              method="bounded", options={"xatol": 1e-10})
        if -float(res.fun) > best:
            best, L_best = -float(res.fun), float(res.x)
    return best, L_best


def shimogaki_M(space: GrandSpace, t: float, s_grid=None) -> float:
    if not t > 0.0:
        raise ValueError("t must be positive")
    return math.exp(shimogaki_log_M(space, math.log(t), s_grid)[0])


def _slope_limit(log_t: np.ndarray, log_M: np.ndarray, log_s: np.ndarray) -> float:
    # the increment is a difference of log phi at s* t and s*, so the slopes
    # converge in 1 / |log(s* t)|
    slopes, _ = two_point_slopes(log_t, log_M)
    at = log_t + log_s
    mid = 0.5 * (at[1:] + at[:-1])
    return richardson_limit(1.0 / np.abs(mid), slopes)


def shimogaki_indices(space: GrandSpace, levels: int = INDEX_LEVELS, s_grid=None) -> ShimogakiReport:
    """``beta-`` (``t -> 0``) and ``beta+`` (``t -> inf``) of ``G(psi)``.

    Limits come from the extrapolated slopes of ``log M`` along
    ``t = 10**(+-2m)``.  The definitional values ``inf_{t>1} log M / log t``
    and ``sup_{t<1} log M / log t`` over the same samples are reported next to
    them and ``definitions_disagree`` flags a gap above 2%.
    """
    if levels < 3:
        raise ValueError("levels must be at least 3")
    out = {}
    for direction in (UPPER, LOWER):
        lt = _block_logs(direction, levels)
        pairs = np.array([shimogaki_log_M(space, L, s_grid) for L in lt])
        out[direction] = (lt, pairs[:, 0], _slope_limit(lt, pairs[:, 0], pairs[:, 1]))
    up, M_up, beta_plus = out[UPPER]
    down, M_down, beta_minus = out[LOWER]
    plus_def = float(np.min(M_up / up))
    minus_def = float(np.max(M_down / down))
    disagree = abs(plus_def - beta_plus) > DEFINITION_MISMATCH * max(abs(beta_plus), SANDWICH_FLOOR) or \
        abs(minus_def - beta_minus) > DEFINITION_MISMATCH * max(abs(beta_minus), SANDWICH_FLOOR)
    logs = np.concatenate([down[::-1], up])
    prof = np.exp(np.concatenate([M_down[::-1], M_up]))
    return ShimogakiReport(beta_minus, beta_plus, (np.exp(logs), prof), minus_def, plus_def, disagree)


def associate_boyd(interval: Interval) -> tuple[float, float]:
    """``(1 - 1/b, 1 - 1/a)``: upper and lower Boyd indices of the associate space."""
    inv_b = 1.0 / interval.b if interval.finite else 0.0
    return 1.0 - inv_b, 1.0 - 1.0 / interval.a


@dataclass(frozen=True)
class SandwichReport:
    boyd_lower: float
    beta_minus: float
    beta_plus: float
    boyd_upper: float
    holds: bool


def sandwich_report(space: GrandSpace, levels: int = INDEX_LEVELS,
                    shimogaki: ShimogakiReport | None = None) -> SandwichReport:
    """``0 <= B- <= beta- <= beta+ <= B+`` with ``V1 = V2 = G(psi)`` on the line.

    Each link may fail by at most 2% of the larger side (plus ``1e-3`` near zero).
    A ``shimogaki`` report computed earlier for ``space`` is reused.
    """
    psi = space.psi
    one = constant_psi(psi.interval)
    line = WeightedDomain.lebesgue(1)
    logs_u, h_u = boyd_curve(psi, one, line, 0, UPPER, levels)
    logs_l, h_l = boyd_curve(psi, one, line, 0, LOWER, levels)
    b_up = limit_of_slopes(logs_u, h_u)
    b_lo = limit_of_slopes(logs_l, h_l)
    sh = shimogaki if shimogaki is not None else shimogaki_indices(space, levels)
    chain = [0.0, b_lo, sh.beta_minus, sh.beta_plus, b_up]
    holds = all(x <= y + SANDWICH_SLACK * max(abs(x), abs(y)) + SANDWICH_FLOOR
                for x, y in zip(chain, chain[1:]))
    return SandwichReport(b_lo, sh.beta_minus, sh.beta_plus, b_up, holds)


def sandwich_check(space: GrandSpace, levels: int = INDEX_LEVELS) -> bool:
    return sandwich_report(space, levels).holds
