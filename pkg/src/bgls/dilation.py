"""Dilation operators ``sigma_s`` and matrix dilations ``D_A`` with their norms.

The closed forms are values of the fundamental function of ``G(nu)``:
``phi(G(nu), s**(d + theta))`` for ``sigma_s``, ``phi(G(nu), |det A|)`` for a
matrix on the unweighted space and ``phi(G(nu), |det A| * |||A|||**sigma)``
under the weight ``|||x|||**sigma``.  The empirical side pushes a witness
through the operator and divides BGLS norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import logsumexp

from .domain import BlockSpec, WeightedDomain, log_measure_scaling
from .functions import ProductFunction, scale_arg, transplant, truncate
from .grand import GrandSpace, bgls_norm, log_fundamental
from .grid import sup_over_p
from .psi import IntervalMismatch, PsiFunction, multiply_psi

EQUALITY_EXPECTED = "equality_expected"
UPPER_BOUND_ONLY = "upper_bound_only"

WITNESS_BANK_SIZE = 8
FIELD_BOX_HALF_WIDTH = 12.0
FIELD_PANELS = 24
FIELD_NODES = 16


class MissingRepresentation(ValueError):
    """An equality statement needs a representation of ``psi``."""


class StructureError(ValueError):
    """The operator does not preserve the structural form of the function."""


class SingularMatrix(ValueError):
    pass


@dataclass(frozen=True)
class DilationSpec:
    """``kind`` is ``"vector"``, ``"matrix"`` or ``"matrix-weighted"``."""

    kind: str
    s: tuple[float, ...] = ()
    matrix: np.ndarray | None = field(default=None, compare=False)
    sigma: float | None = None

    def __post_init__(self):
        if self.kind == "vector":
            s = tuple(float(v) for v in self.s)
            if not s or any(not v > 0.0 for v in s):
                raise ValueError("dilation vector entries must be positive")
            object.__setattr__(self, "s", s)
        elif self.kind in ("matrix", "matrix-weighted"):
            A = _as_matrix(self.matrix)
            object.__setattr__(self, "matrix", A)
            if self.kind == "matrix-weighted" and self.sigma is None:
                raise ValueError("a weighted matrix dilation needs sigma")
        else:
            raise ValueError(f"unknown dilation kind {self.kind!r}")

    @classmethod
    def vector(cls, *s: float) -> "DilationSpec":
        return cls("vector", tuple(s))

    @classmethod
    def from_matrix(cls, A, sigma: float | None = None) -> "DilationSpec":
        if sigma is None:
            return cls("matrix", matrix=A)
        return cls("matrix-weighted", matrix=A, sigma=float(sigma))


@dataclass(frozen=True)
class OperatorNormResult:
    """Closed-form norm next to the ratio realised by a witness.

    ``empirical_lower`` is a genuine lower bound on the operator norm (it is
    the ratio for one function); with ``relation == "equality_expected"`` it
    should also match ``closed_form``.
    """

    closed_form: float
    empirical_lower: float
    relation: str
    witness: str = ""

    @property
    def rel_gap(self) -> float:
        if self.closed_form == 0.0:
            return abs(self.empirical_lower)
        return abs(self.empirical_lower - self.closed_form) / self.closed_form


def _as_matrix(A) -> np.ndarray:
    A = np.atleast_2d(np.array(A, dtype=float))
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"matrix must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    det = float(np.linalg.det(A))
    if det == 0.0 or abs(det) < 1e-300 or np.linalg.cond(A) > 1e14:
        raise SingularMatrix(f"matrix is singular (det = {det:g})")
    A.setflags(write=False)
    return A


def _is_diagonal(A: np.ndarray) -> bool:
    return bool(np.all(A == np.diag(np.diag(A))))


def scaled_orthogonal(A: np.ndarray, rtol: float = 1e-12) -> float | None:
    """``s`` when ``A = s U`` with ``U`` orthogonal and ``s > 0``, else ``None``."""
    A = np.asarray(A, dtype=float)
    gram = A.T @ A
    s2 = float(np.trace(gram)) / A.shape[0]
    if s2 > 0.0 and np.allclose(gram, s2 * np.eye(A.shape[0]), rtol=0.0, atol=rtol * s2):
        return math.sqrt(s2)
    return None


# ---------------------------------------------------------------------------
# numeric fields on R^d (general matrices)


@dataclass(frozen=True)
class FieldFunction:
    """Numeric function on ``R^dim``: ``func`` maps an ``(n, dim)`` array to ``(n,)``."""

    func: Callable = field(compare=False)
    dim: int
    label: str = "field"

    def __call__(self, x):
        return np.abs(np.asarray(self.func(np.atleast_2d(x)), dtype=float))


def gaussian_field(dim: int, shape: np.ndarray | None = None) -> FieldFunction:
    """``exp(-|B x|^2 / 2)``; the default witness for non-diagonal matrices."""
    B = np.eye(dim) if shape is None else np.asarray(shape, dtype=float)
    return FieldFunction(lambda x: np.exp(-0.5 * np.sum((x @ B.T) ** 2, axis=1)), dim, "gauss")


def _box_rule(dim: int, half_width: float):
    t, w = leggauss(FIELD_NODES)
    edges = np.linspace(-half_width, half_width, FIELD_PANELS + 1)
    nodes = np.concatenate([0.5 * (lo + hi) + 0.5 * (hi - lo) * t for lo, hi in zip(edges, edges[1:])])
    weights = np.concatenate([0.5 * (hi - lo) * w for lo, hi in zip(edges, edges[1:])])
    grids = np.meshgrid(*([nodes] * dim), indexing="ij")
    wgrids = np.meshgrid(*([weights] * dim), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    wts = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    return pts, wts


def field_log_lp_norms(g: FieldFunction, ps, sigma: float = 0.0,
                       half_width: float = FIELD_BOX_HALF_WIDTH) -> np.ndarray:
    """``log |g|_p`` with weight ``|x|**sigma`` by tensor Gauss-Legendre on a box.

    Meant for rapidly decaying fields; mass outside the box is ignored.
    """
    ps = np.atleast_1d(np.asarray(ps, dtype=float))
    pts, wts = _box_rule(g.dim, half_width)
    vals = g(pts)
    if sigma:
        wts = wts * np.linalg.norm(pts, axis=1) ** sigma
    keep = (vals > 0.0) & (wts > 0.0)
    lv, lw = np.log(vals[keep]), np.log(wts[keep])
    return np.array([float(logsumexp(p * lv + lw)) / p for p in ps])


# ---------------------------------------------------------------------------
# operators


def apply_dilation(spec: DilationSpec, f):
    """``sigma_s f`` or ``D_A f`` in structural form.

    Vector dilations and diagonal matrices (one one-dimensional block per
    coordinate) act on :class:`ProductFunction`; ``A = s U`` acts on a single
    radial block; other matrices only act on :class:`FieldFunction`.
    """
    if spec.kind == "vector":
        if not isinstance(f, ProductFunction):
            raise StructureError("vector dilations act on product functions")
        return scale_arg(f, spec.s)
    A = spec.matrix
    if isinstance(f, FieldFunction):
        if f.dim != A.shape[0]:
            raise ValueError(f"matrix is {A.shape[0]}x{A.shape[0]}, field lives on R^{f.dim}")
        inv_t = np.linalg.inv(A).T
        g = f.func
        return FieldFunction(lambda x: g(np.atleast_2d(x) @ inv_t), f.dim, f"{f.label}(A^-1 x)")
    blocks = f.domain.blocks
    if _is_diagonal(A) and len(blocks) == A.shape[0] and all(b.dim == 1 for b in blocks):
        diag = np.diag(A)
        if np.any(diag < 0.0) and not all(b.full_space for b in blocks):
            raise StructureError("negative diagonal entries leave the positive orthant")
        return scale_arg(f, np.abs(diag))
    s = scaled_orthogonal(A)
    if s is not None and len(blocks) == 1 and blocks[0].dim == A.shape[0] and \
            (blocks[0].full_space or _is_diagonal(A)):
        return scale_arg(f, [s])
    raise StructureError("a non-diagonal matrix breaks the product form; use a FieldFunction")


def _check_pair(psi: PsiFunction, nu: PsiFunction):
    if psi.interval != nu.interval:
        raise IntervalMismatch(f"{psi.interval} vs {nu.interval}")


def _phi_log(nu: PsiFunction, log_delta: float) -> float:
    return log_fundamental(GrandSpace(WeightedDomain.lebesgue(1), nu), log_delta).log_value


def dilation_norm_closed_form(psi: PsiFunction, nu: PsiFunction, domain: WeightedDomain,
                              s: Sequence[float]) -> float:
    """``phi(G(nu), s**(d + theta))``: the norm of ``sigma_s`` from ``G(psi)`` to ``G(psi * nu)``."""
    _check_pair(psi, nu)
    return math.exp(_phi_log(nu, log_measure_scaling(domain, s)))


def log_dilation_norm_closed_form(psi: PsiFunction, nu: PsiFunction, domain: WeightedDomain,
                                  s: Sequence[float]) -> float:
    _check_pair(psi, nu)
    return _phi_log(nu, log_measure_scaling(domain, s))


def representation_on(psi: PsiFunction, domain: WeightedDomain) -> ProductFunction | None:
    """The representation of ``psi`` moved onto ``domain`` (``None`` if there is none)."""
    rep = psi.representation
    if rep is None:
        return None
    if rep.domain == domain:
        return rep
    if rep.domain.k == 1:
        return transplant(rep, domain)
    return None


def witness_bank(psi: PsiFunction, domain: WeightedDomain, size: int = WITNESS_BANK_SIZE,
                 seed: int = 0) -> list[ProductFunction]:
    """Representation-like piecewise-power functions lying in ``G(psi)``."""
    from .corpus import canonical_representation, random_power_function
    rng = np.random.default_rng(seed)
    bank = [canonical_representation(psi.interval, domain)]
    bank += [random_power_function(rng, psi.interval, domain) for _ in range(size - 1)]
    return bank


def operator_ratio(zeta: PsiFunction, psi: PsiFunction, f: ProductFunction,
                   Tf: ProductFunction, tol: float = 1e-10) -> float:
    """``||T f||_{G(zeta)} / ||f||_{G(psi)}``."""
    num = bgls_norm(GrandSpace(Tf.domain, zeta), Tf, tol)
    den = bgls_norm(GrandSpace(f.domain, psi), f, tol)
    if den.value == 0.0:
        return 0.0
    return num.value / den.value


def dilation_norm_empirical(psi: PsiFunction, nu: PsiFunction, domain: WeightedDomain,
                            s: Sequence[float], witnesses: Sequence[ProductFunction] | None = None,
                            tol: float = 1e-10) -> OperatorNormResult:
    """Witness ratio ``||sigma_s f||_{G(psi nu)} / ||f||_{G(psi)}`` next to the closed form.

    With a representation of ``psi`` on ``domain`` that representation is the
    only witness and equality is expected.  Otherwise the best ratio over
    ``witnesses`` (default: :func:`witness_bank`) is a lower bound and only the
    upper bound is asserted.
    """
    closed = dilation_norm_closed_form(psi, nu, domain, s)
    zeta = multiply_psi(psi, nu)
    rep = representation_on(psi, domain)
    if rep is not None:
        emp = operator_ratio(zeta, psi, rep, scale_arg(rep, s), tol)
        return OperatorNormResult(closed, emp, EQUALITY_EXPECTED, "representation")
    if witnesses is None:
        witnesses = witness_bank(psi, domain)
    if not witnesses:
        raise MissingRepresentation("psi has no representation on this domain and no witnesses were given")
    best = max(operator_ratio(zeta, psi, f, scale_arg(f, s), tol) for f in witnesses)
    return OperatorNormResult(closed, best, UPPER_BOUND_ONLY, f"bank[{len(witnesses)}]")


def truncation_ratios(psi: PsiFunction, nu: PsiFunction, domain: WeightedDomain,
                      s: Sequence[float], ns: Sequence[int] = (1, 2, 4, 8, 16, 32, 64),
                      tol: float = 1e-10) -> np.ndarray:
    """``||sigma_s f_n||_{G(psi nu)} / ||f_n||_{G(psi)}`` along truncations of the representation."""
    rep = representation_on(psi, domain)
    if rep is None:
        raise MissingRepresentation("truncation ratios start from the representation")
    zeta = multiply_psi(psi, nu)
    out = []
    for n in ns:
        fn = truncate(rep, int(n))
        out.append(operator_ratio(zeta, psi, fn, scale_arg(fn, s), tol))
    return np.array(out)


def _radial_domain(dim: int, sigma: float) -> WeightedDomain:
    if sigma == 0.0:
        return WeightedDomain((BlockSpec(dim=dim, full_space=True),))
    if dim == 1:
        return WeightedDomain((BlockSpec(dim=1, theta=sigma, profile="power", full_space=True),))
    weight = lambda x: np.linalg.norm(np.atleast_2d(x), axis=-1) ** sigma
    return WeightedDomain((BlockSpec(dim=dim, theta=sigma, profile="custom", weight=weight,
                                     full_space=True),))


def _field_ratio(zeta: PsiFunction, psi: PsiFunction, g: FieldFunction, A: np.ndarray,
                 sigma: float) -> float:
    Dg = apply_dilation(DilationSpec("matrix", matrix=A), g)
    iv = psi.interval
    num = sup_over_p(lambda p: field_log_lp_norms(Dg, p, sigma) - zeta.log(p), iv, refine=False)
    den = sup_over_p(lambda p: field_log_lp_norms(g, p, sigma) - psi.log(p), iv, refine=False)
    return num.value / den.value


def matrix_dilation_norm(psi: PsiFunction, nu: PsiFunction, A, sigma: float | None = None,
                         tol: float = 1e-10) -> OperatorNormResult:
    """Norm of ``D_A f = f(A^{-1} x)`` from ``G(psi)`` to ``G(psi nu)`` on ``R^d``.

    Unweighted: ``phi(G(nu), |det A|)``.  With the weight ``|x|**sigma``:
    ``phi(G(nu), |det A| * ||A||**sigma)`` (operator 2-norm), asserted only
    as an upper bound except for ``A = s U`` where it is ``phi(G(nu), s**(d + sigma))``.
    The witness is the representation of ``psi`` moved onto the matching
    domain (a product of lines for diagonal ``A``, a radial block for ``s U``)
    and a Gaussian field otherwise.
    """
    _check_pair(psi, nu)
    A = _as_matrix(A)
    d = A.shape[0]
    sig = 0.0 if sigma is None else float(sigma)
    zeta = multiply_psi(psi, nu)
    log_det = math.log(abs(float(np.linalg.det(A))))
    s_orth = scaled_orthogonal(A)
    if sig == 0.0:
        log_arg = log_det
        relation = EQUALITY_EXPECTED
    elif s_orth is not None:
        log_arg = (d + sig) * math.log(s_orth)
        relation = EQUALITY_EXPECTED
    else:
        log_arg = log_det + sig * math.log(float(np.linalg.norm(A, 2)))
        relation = UPPER_BOUND_ONLY
    closed = math.exp(_phi_log(nu, log_arg))
    has_rep = psi.representation is not None
    if not has_rep:
        relation = UPPER_BOUND_ONLY

    if has_rep and sig == 0.0 and _is_diagonal(A):
        domain = WeightedDomain((BlockSpec(full_space=True),) * d)
        rep = representation_on(psi, domain)
        emp = operator_ratio(zeta, psi, rep, scale_arg(rep, np.abs(np.diag(A))), tol)
        return OperatorNormResult(closed, emp, relation, "representation x lines")
    if has_rep and s_orth is not None:
        domain = _radial_domain(d, sig)
        rep = representation_on(psi, domain)
        emp = operator_ratio(zeta, psi, rep, scale_arg(rep, [s_orth]), tol)
        return OperatorNormResult(closed, emp, relation, "radial representation")
    emp = _field_ratio(zeta, psi, gaussian_field(d), A, sig)
    return OperatorNormResult(closed, emp, UPPER_BOUND_ONLY if not has_rep else relation, "gauss")


def matrix_boyd_limits(psi: PsiFunction, nu: PsiFunction, levels: int = 12) -> tuple[float, float]:
    """Slopes of ``log ||D_A|| / log |det A|`` as ``|det A| -> inf`` and ``-> 0``.

    The expected values are ``1/a`` and ``1/b``.
    """
    from .grand import fundfn_asymptotic_slope
    _check_pair(psi, nu)
    if psi.representation is None:
        raise MissingRepresentation("matrix Boyd limits are stated for psi with a representation")
    space = GrandSpace(WeightedDomain.lebesgue(1), nu)
    return (fundfn_asymptotic_slope(space, "to_infinity", levels),
            fundfn_asymptotic_slope(space, "to_zero", levels))
