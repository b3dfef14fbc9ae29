"""Command-line front end.

    bgls <command> [--config FILE] [flags]

Commands: ``norm``, ``fundfn``, ``dilation-norm``, ``matrix-dilation``,
``boyd``, ``shimogaki``, ``criteria``, ``probe``, ``verify-all``.

Every run is described by a flat key-value config file plus flags (flags
win); the resolved config, the tolerance and the package version are
written into the output so a table can be regenerated from its own header.
Output is JSON (sorted keys, floats in shortest round-trip form) or
plot-ready CSV.

Exit codes: 0 success, 1 criterion failure, 2 usage or parse error,
3 computation error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import __version__
from .criteria import (BOUNDED_CONSISTENT, P_ALPHA, PROBE_LEVELS, Q_BETA, UNBOUNDED_CONSISTENT,
                       boundedness, hardy_norm_probe, probe_parameters, verdict_table)
from .dilation import (EQUALITY_EXPECTED, dilation_norm_empirical, matrix_dilation_norm,
                       representation_on)
from .domain import WeightedDomain
from .grand import GrandSpace, bgls_norm, fundamental_function
from .indices import (INDEX_LEVELS, LOWER, UPPER, boyd_closed_form, boyd_curve, sandwich_report,
                      shimogaki_indices)
from .extrapolation import limit_of_slopes
from .parse import (SpecError, parse_blocks, parse_config, parse_floats, parse_function,
                    parse_interval, parse_matrix, parse_psi)
from .verify import EQUALITY_RTOL, INDEX_RTOL, SLOPE_FLOOR, UPPER_SLACK, run_check, CHECKS

EXIT_OK = 0
EXIT_CRITERION = 1
EXIT_USAGE = 2
EXIT_COMPUTATION = 3

COMMANDS = ("norm", "fundfn", "dilation-norm", "matrix-dilation", "boyd", "shimogaki",
            "criteria", "probe", "verify-all")
# flag name -> help text; every flag may also be given in the config file
FLAGS = {
    "interval": "exponent interval a,b (b may be inf)",
    "psi": "psi expression, e.g. canonical, power(1,0.5,0.5), const(2)",
    "nu": "second psi expression (target space G(psi*nu))",
    "blocks": "domain blocks dim[:theta];... e.g. 1:0;2:1",
    "function": "function factor(piece(lo,hi,c,e),...),... (default: representation of psi)",
    "s": "comma-separated floats: dilation vector or sweep arguments",
    "matrix": "row-major square matrix as comma-separated floats",
    "sigma": "weight exponent of |x|**sigma for matrix dilations",
    "alpha": "Hardy parameter of P_alpha",
    "beta": "Hardy parameter of Q_beta",
    "levels": "number of refinement levels",
    "tol": "relative quadrature tolerance",
    "out": "output path (default: standard output)",
    "format": "json or csv",
}
DEFAULTS = {"psi": "canonical", "nu": "const(1)", "blocks": "1", "tol": "1e-10", "format": "json"}
# fundamental-function sweep: delta = 10**k
FUNDFN_DECADES = range(-6, 7)


class UsageError(ValueError):
    """A config value is missing or invalid; the message names the field."""


class ComputationError(RuntimeError):
    def __init__(self, operation: str, cause: BaseException):
        super().__init__(f"{operation}: {type(cause).__name__}: {cause}")
        self.operation = operation


@contextlib.contextmanager
def _operation(name: str):
    try:
        yield
    except (UsageError, SpecError, ComputationError):
        raise
    except Exception as exc:
        raise ComputationError(name, exc) from exc


@dataclass
class Table:
    """One result table plus the scalars that summarise it."""

    quantity: str
    grid_kind: str
    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    passed: bool = True


# ---------------------------------------------------------------------------
# config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bgls", description=__doc__.split("\n\n")[0])
    parser.add_argument("command", nargs="?", choices=COMMANDS)
    parser.add_argument("--config", help="key = value file; flags override its entries")
    for name, text in FLAGS.items():
        parser.add_argument(f"--{name}", help=text)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def resolve_config(ns: argparse.Namespace) -> dict[str, str]:
    """Defaults, then the config file, then flags."""
    cfg = dict(DEFAULTS)
    if ns.config:
        try:
            with open(ns.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"--config: cannot read {ns.config}: {exc.strerror}") from None
        try:
            entries = parse_config(text)
        except SpecError as exc:
            raise UsageError(f"{ns.config}: {exc}") from None
        unknown = sorted(set(entries) - set(FLAGS) - {"command"})
        if unknown:
            raise UsageError(f"{ns.config}: unknown key {unknown[0]!r}")
        cfg.update(entries)
    for name in FLAGS:
        value = getattr(ns, name)
        if value is not None:
            cfg[name] = value
    if ns.command:
        cfg["command"] = ns.command
    if cfg.get("command") not in COMMANDS:
        raise UsageError(f"command: expected one of {', '.join(COMMANDS)}, got {cfg.get('command')!r}")
    if cfg["format"] not in ("json", "csv"):
        raise UsageError(f"--format: expected json or csv, got {cfg['format']!r}")
    return cfg


def _field(cfg: dict, name: str, parse, required: bool = False):
    text = cfg.get(name)
    if text is None:
        if required:
            raise UsageError(f"--{name} is required for {cfg['command']}")
        return None
    try:
        return parse(text)
    except SpecError as exc:
        raise UsageError(f"--{name}: {exc}") from None
    except ValueError as exc:
        raise UsageError(f"--{name}: {exc}") from None


def _positive_int(text: str) -> int:
    try:
        v = int(text.strip())
    except ValueError:
        raise ValueError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise ValueError(f"expected a positive integer, got {text!r}")
    return v


def _scalar(text: str) -> float:
    vals = parse_floats(text)
    if len(vals) != 1:
        raise ValueError(f"expected one number, got {len(vals)}")
    return vals[0]


def _unit_param(text: str) -> float:
    v = _scalar(text)
    if not 0.0 < v < 1.0:
        raise ValueError(f"must lie in (0, 1), got {text!r}")
    return v


@dataclass(frozen=True)
class _Setup:
    interval: object
    domain: WeightedDomain
    psi: object
    nu: object
    tol: float


def _setup(cfg: dict, psi_on_domain: bool = True) -> _Setup:
    iv = _field(cfg, "interval", parse_interval, required=True)
    dom = _field(cfg, "blocks", parse_blocks)
    line = WeightedDomain.lebesgue(1)
    psi = _field(cfg, "psi", lambda t: parse_psi(t, iv, dom if psi_on_domain else line))
    nu = _field(cfg, "nu", lambda t: parse_psi(t, iv, line))
    tol = _field(cfg, "tol", _unit_param)
    return _Setup(iv, dom, psi, nu, tol)


# ---------------------------------------------------------------------------
# commands


def cmd_norm(cfg: dict) -> Table:
    st = _setup(cfg)
    f = _field(cfg, "function", lambda t: parse_function(t, st.domain))
    if f is None:
        f = representation_on(st.psi, st.domain)
        if f is None:
            raise UsageError("--function is required: psi has no representation on this domain")
    with _operation("bgls_norm"):
        res = bgls_norm(GrandSpace(st.domain, st.psi), f, st.tol)
    p, ratio = res.profile
    table = Table("bgls_norm", "p-grid", ("p", "ratio"), list(zip(p, ratio)))
    table.summary = {"norm": res.value, "log_norm": res.log_value, "argmax_p": res.argmax_p}
    return table


def cmd_fundfn(cfg: dict) -> Table:
    st = _setup(cfg)
    deltas = _field(cfg, "s", parse_floats)
    if deltas is None:
        deltas = [10.0 ** k for k in FUNDFN_DECADES]
    if any(not d > 0.0 for d in deltas):
        raise UsageError("--s: fundamental-function arguments must be positive")
    space = GrandSpace(st.domain, st.psi)
    with _operation("fundamental_function"):
        phi = [fundamental_function(space, float(d)).value for d in deltas]
    return Table("fundamental_function", "delta", ("delta", "phi"), list(zip(deltas, phi)))


def _norm_verdict(res) -> tuple[bool, dict]:
    if res.relation == EQUALITY_EXPECTED:
        ok = res.rel_gap <= EQUALITY_RTOL
    else:
        ok = res.empirical_lower <= res.closed_form * (1.0 + UPPER_SLACK)
    return ok, {"closed_form": res.closed_form, "empirical_lower": res.empirical_lower,
                "rel_gap": res.rel_gap, "relation": res.relation, "witness": res.witness}


def cmd_dilation_norm(cfg: dict) -> Table:
    st = _setup(cfg)
    s = _field(cfg, "s", parse_floats, required=True)
    if len(s) != st.domain.k or any(not v > 0.0 for v in s):
        raise UsageError(f"--s: expected {st.domain.k} positive entries, one per block")
    with _operation("dilation_norm_empirical"):
        res = dilation_norm_empirical(st.psi, st.nu, st.domain, s, tol=st.tol)
    ok, summary = _norm_verdict(res)
    row = (res.closed_form, res.empirical_lower, res.rel_gap, res.relation, res.witness)
    return Table("dilation_norm", "single", ("closed_form", "empirical_lower", "rel_gap",
                                             "relation", "witness"), [row], summary, ok)


def cmd_matrix_dilation(cfg: dict) -> Table:
    st = _setup(cfg, psi_on_domain=False)
    A = _field(cfg, "matrix", parse_matrix, required=True)
    sigma = _field(cfg, "sigma", _scalar)
    with _operation("matrix_dilation_norm"):
        res = matrix_dilation_norm(st.psi, st.nu, A, sigma, st.tol)
    ok, summary = _norm_verdict(res)
    summary["det"] = float(np.linalg.det(A))
    row = (res.closed_form, res.empirical_lower, res.rel_gap, res.relation, res.witness)
    return Table("matrix_dilation_norm", "single", ("closed_form", "empirical_lower", "rel_gap",
                                                    "relation", "witness"), [row], summary, ok)


def cmd_boyd(cfg: dict) -> Table:
    st = _setup(cfg)
    levels = _field(cfg, "levels", _positive_int) or INDEX_LEVELS
    if levels < 3:
        raise UsageError("--levels: at least 3 levels are needed for extrapolation")
    table = Table("boyd_curve", "s=10**(+-2m)", ("block", "direction", "s", "h(s)", "slope"))
    ok = True
    with _operation("boyd_curve"):
        for j in range(st.domain.k):
            up_c, lo_c = boyd_closed_form(st.interval, st.domain, j)
            for direction, want in ((LOWER, lo_c), (UPPER, up_c)):
                logs, logh = boyd_curve(st.psi, st.nu, st.domain, j, direction, levels)
                for L, H in zip(logs, logh):
                    table.rows.append((j + 1, direction, math.exp(L), math.exp(H), H / L))
                got = limit_of_slopes(logs, logh)
                table.summary[f"block{j + 1}_{direction}"] = got
                table.summary[f"block{j + 1}_{direction}_expected"] = want
                ok &= abs(got - want) <= INDEX_RTOL * max(abs(want), SLOPE_FLOOR)
    # the closed forms presuppose psi in the class Psi
    table.passed = ok or st.psi.representation is None
    return table


def cmd_shimogaki(cfg: dict) -> Table:
    st = _setup(cfg)
    levels = _field(cfg, "levels", _positive_int) or INDEX_LEVELS
    if levels < 3:
        raise UsageError("--levels: at least 3 levels are needed for extrapolation")
    space = GrandSpace(st.domain, st.psi)
    with _operation("shimogaki_indices"):
        sh = shimogaki_indices(space, levels)
    with _operation("sandwich_report"):
        sw = sandwich_report(space, levels, shimogaki=sh)
    t, M = sh.M_profile
    table = Table("shimogaki_M", "t=10**(+-2m)", ("t", "M(t)"), list(zip(t, M)))
    table.summary = {
        "beta_minus": sh.beta_minus, "beta_plus": sh.beta_plus,
        "beta_minus_sampled": sh.beta_minus_sampled, "beta_plus_sampled": sh.beta_plus_sampled,
        "definitions_disagree": sh.definitions_disagree,
        "boyd_lower": sw.boyd_lower, "boyd_upper": sw.boyd_upper, "sandwich_holds": sw.holds,
    }
    table.passed = sw.holds
    return table


def _default_params(cfg: dict, iv) -> tuple[float, float]:
    params = probe_parameters(iv)
    alpha = _field(cfg, "alpha", _unit_param)
    beta = _field(cfg, "beta", _unit_param)
    return (params[P_ALPHA][-1] if alpha is None else alpha,
            params[Q_BETA][-1] if beta is None else beta)


def cmd_criteria(cfg: dict) -> Table:
    iv = _field(cfg, "interval", parse_interval, required=True)
    alpha, beta = _default_params(cfg, iv)
    table = Table("boundedness_verdicts", "operators", ("operator", "parameter", "bounded",
                                                        "condition"))
    with _operation("verdict_table"):
        for v in verdict_table(iv, alpha, beta):
            param = next(iter(v.parameters.values()), "")
            table.rows.append((v.operator, param, v.bounded, v.condition_text))
    table.summary = {"alpha": alpha, "beta": beta}
    return table


def cmd_probe(cfg: dict) -> Table:
    st = _setup(cfg)
    levels = _field(cfg, "levels", _positive_int) or PROBE_LEVELS
    alpha = _field(cfg, "alpha", _unit_param)
    beta = _field(cfg, "beta", _unit_param)
    if alpha is None and beta is None:
        jobs = [(op, v) for op, vals in probe_parameters(st.interval).items() for v in vals]
    else:
        jobs = ([(P_ALPHA, alpha)] if alpha is not None else []) + \
            ([(Q_BETA, beta)] if beta is not None else [])
    space = GrandSpace(st.domain, st.psi)
    table = Table("hardy_probe", "n=2**2**k", ("operator", "parameter", "log_n", "ratio"))
    ok = True
    for op, value in jobs:
        key = "alpha" if op == P_ALPHA else "beta"
        with _operation(f"hardy_norm_probe({op})"):
            rep = hardy_norm_probe(op, space, value, levels)
        bounded = boundedness(op, st.interval, {key: value}).bounded
        for log_n, r in zip(rep.log_ns, rep.ratios):
            table.rows.append((op, value, log_n, r))
        name = f"{op}({value:g})"
        table.summary[f"{name}_flag"] = rep.flag
        table.summary[f"{name}_bounded"] = bounded
        ok &= not ((bounded and rep.flag == UNBOUNDED_CONSISTENT)
                   or (not bounded and rep.flag == BOUNDED_CONSISTENT))
    table.passed = ok
    return table


def cmd_verify_all(cfg: dict) -> Table:
    table = Table("acceptance", "criteria", ("criterion", "title", "passed", "cases", "worst",
                                             "detail"))
    for k in range(1, len(CHECKS) + 1):
        with _operation(f"criterion {k}"):
            res = run_check(k)
        # timings go to stderr only, so the table itself is deterministic
        print(res.line(), file=sys.stderr, flush=True)
        table.rows.append((res.number, res.title, res.passed, res.cases, res.worst, res.detail))
    table.passed = all(r[2] for r in table.rows)
    table.summary = {"passed": table.passed}
    return table


HANDLERS = {
    "norm": cmd_norm, "fundfn": cmd_fundfn, "dilation-norm": cmd_dilation_norm,
    "matrix-dilation": cmd_matrix_dilation, "boyd": cmd_boyd, "shimogaki": cmd_shimogaki,
    "criteria": cmd_criteria, "probe": cmd_probe, "verify-all": cmd_verify_all,
}


# ---------------------------------------------------------------------------
# output


def _plain(v):
    """JSON-safe scalar: non-finite floats become strings."""
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    return v


def _cell(v) -> str:
    v = _plain(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(v) if isinstance(v, float) else str(v)


def _recorded(cfg: dict) -> dict:
    return {k: v for k, v in sorted(cfg.items()) if k not in ("out", "format")}


def render_json(table: Table, cfg: dict) -> str:
    doc = {
        "quantity": table.quantity, "grid_kind": table.grid_kind,
        "tolerance": float(cfg["tol"]), "version": __version__, "config": _recorded(cfg),
        "columns": list(table.columns),
        "rows": [[_plain(v) for v in row] for row in table.rows],
        "summary": {k: _plain(v) for k, v in table.summary.items()},
        "passed": table.passed,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _write_header(out, quantity: str, grid_kind: str, tolerance: float, cfg: dict | None):
    out.write("# quantity, grid_kind, tolerance, version\n")
    out.write(f"# {quantity}, {grid_kind}, {tolerance!r}, {__version__}\n")
    if cfg:
        out.write("# config: " + "; ".join(f"{k}={v}" for k, v in _recorded(cfg).items()) + "\n")


def render_csv(table: Table, cfg: dict) -> str:
    out = io.StringIO()
    _write_header(out, table.quantity, table.grid_kind, float(cfg["tol"]), cfg)
    for k, v in table.summary.items():
        out.write(f"# {k} = {_cell(v)}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(table.columns)
    writer.writerows([_cell(v) for v in row] for row in table.rows)
    return out.getvalue()


def emit_sweep(quantity: str, grid: Sequence[float], results: Sequence[float], sink,
               grid_kind: str = "log", tolerance: float = math.nan,
               columns: tuple[str, str] = ("x", "value"), cfg: dict | None = None) -> None:
    """Two-column CSV of ``results`` over ``grid`` with the provenance header.

    ``sink`` is a path or a text stream.  Values are written in shortest
    round-trip form, so they read back bit-exactly.
    """
    grid, results = list(grid), list(results)
    if not grid:
        raise ValueError("empty grid")
    if len(grid) != len(results):
        raise ValueError(f"grid has {len(grid)} points but there are {len(results)} results")
    buf = io.StringIO()
    _write_header(buf, quantity, grid_kind, tolerance, cfg)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows((_cell(x), _cell(y)) for x, y in zip(grid, results))
    _deliver(buf.getvalue(), sink)


def _deliver(text: str, sink):
    if hasattr(sink, "write"):
        sink.write(text)
        return
    with open(sink, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def run(cfg: dict) -> tuple[int, str]:
    """Execute a resolved config; returns (exit status, rendered output)."""
    table = HANDLERS[cfg["command"]](cfg)
    text = render_json(table, cfg) if cfg["format"] == "json" else render_csv(table, cfg)
    return (EXIT_OK if table.passed else EXIT_CRITERION), text


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(ns)
        status, text = run(cfg)
    except (UsageError, SpecError) as exc:
        print(f"bgls: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ComputationError as exc:
        print(f"bgls: computation failed in {exc}", file=sys.stderr)
        return EXIT_COMPUTATION
    try:
        _deliver(text, cfg.get("out") or sys.stdout)
    except OSError as exc:
        print(f"bgls: computation failed in writing output: {exc}", file=sys.stderr)
        return EXIT_COMPUTATION
    return status


if __name__ == "__main__":
    sys.exit(main())
