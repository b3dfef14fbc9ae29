"""Text specifications for intervals, psi-functions, functions and domains.

Grammar::

    psi      := "canonical" | "power(" num "," num "," num ")" | "const(" num ")"
              | "rep(" function ")" | "prod(" psi "," psi ")"
    function := factor ("," factor)*
    factor   := "factor(" piece ("," piece)* ")"
    piece    := "piece(" num "," num "," num "," num ")"
    blocks   := block (";" block)*          block := dim [":" theta]

Numbers accept ``inf``.  Errors carry the line and column of the offending
character.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .corpus import canonical_psi
from .domain import BlockSpec, WeightedDomain
from .functions import Factor, PowerPiece, ProductFunction
from .grid import Interval
from .psi import PsiFunction, constant_psi, from_representation, multiply_psi, power_psi

_NUMBER = re.compile(r"[+-]?(?:inf|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)")
_NAME = re.compile(r"[A-Za-z_]+")


class SpecError(ValueError):
    """Malformed specification text, located by line and column (both from 1)."""

    def __init__(self, message: str, text: str = "", pos: int = 0, line_offset: int = 0):
        line = text.count("\n", 0, pos) + 1 + line_offset
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.column = col
        self.detail = message


@dataclass
class _Cursor:
    text: str
    pos: int = 0
    line_offset: int = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def fail(self, message: str):
        raise SpecError(message, self.text, self.pos, self.line_offset)

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            found = self.peek() or "end of input"
            self.fail(f"expected {ch!r}, found {found!r}")
        self.pos += 1

    def name(self) -> str:
        self.skip()
        m = _NAME.match(self.text, self.pos)
        if not m:
            self.fail("expected a name")
        self.pos = m.end()
        return m.group()

    def number(self) -> float:
        self.skip()
        m = _NUMBER.match(self.text, self.pos)
        if not m:
            self.fail("expected a number")
        self.pos = m.end()
        return float(m.group())

    def numbers(self, count: int) -> list[float]:
        self.expect("(")
        out = []
        for j in range(count):
            if j:
                self.expect(",")
            out.append(self.number())
        self.expect(")")
        return out

    def end(self):
        if self.peek():
            self.fail(f"unexpected trailing text {self.text[self.pos:]!r}")


def parse_interval(text: str) -> Interval:
    """``"a,b"`` with ``b`` possibly ``inf``."""
    cur = _Cursor(text)
    a = cur.number()
    cur.expect(",")
    b = cur.number()
    cur.end()
    try:
        return Interval(a, b)
    except ValueError as exc:
        raise SpecError(str(exc), text, 0) from None


def parse_floats(text: str) -> list[float]:
    """Comma-separated numbers."""
    cur = _Cursor(text)
    out = [cur.number()]
    while cur.peek() == ",":
        cur.expect(",")
        out.append(cur.number())
    cur.end()
    return out


def parse_matrix(text: str) -> np.ndarray:
    """Row-major square matrix from a flat list of numbers."""
    vals = parse_floats(text)
    d = int(round(math.sqrt(len(vals))))
    if d * d != len(vals):
        raise SpecError(f"{len(vals)} entries do not form a square matrix", text, len(text))
    return np.array(vals).reshape(d, d)


def parse_blocks(text: str) -> WeightedDomain:
    """``"1"``, ``"1:1"`` or ``"1:0;2:1"``: block dimensions with optional weight exponents.

    A positive exponent on a one-dimensional block gives ``x**theta``; on a
    higher-dimensional block it gives ``|x|**theta``.
    """
    cur = _Cursor(text)
    blocks = []
    while True:
        start = cur.pos
        dim = cur.number()
        if dim != int(dim) or dim < 1:
            raise SpecError("block dimension must be a positive integer", text, start)
        theta = 0.0
        if cur.peek() == ":":
            cur.expect(":")
            theta = cur.number()
        blocks.append(_block(int(dim), theta))
        if cur.peek() != ";":
            break
        cur.expect(";")
    cur.end()
    return WeightedDomain(tuple(blocks))


def _block(dim: int, theta: float) -> BlockSpec:
    if theta == 0.0:
        return BlockSpec(dim=dim)
    if dim == 1:
        return BlockSpec(dim=1, theta=theta, profile="power")
    weight = lambda x: np.linalg.norm(np.atleast_2d(x), axis=-1) ** theta
    return BlockSpec(dim=dim, theta=theta, profile="custom", weight=weight)


def _piece(cur: _Cursor) -> PowerPiece:
    start = cur.pos
    if cur.name() != "piece":
        raise SpecError("expected 'piece'", cur.text, start, cur.line_offset)
    lo, hi, c, e = cur.numbers(4)
    try:
        return PowerPiece(lo, hi, c, e)
    except ValueError as exc:
        raise SpecError(str(exc), cur.text, start, cur.line_offset) from None


def _factor(cur: _Cursor) -> Factor:
    start = cur.pos
    cur.skip()
    if cur.name() != "factor":
        raise SpecError("expected 'factor'", cur.text, start, cur.line_offset)
    cur.expect("(")
    pieces = [_piece(cur)]
    while cur.peek() == ",":
        cur.expect(",")
        pieces.append(_piece(cur))
    cur.expect(")")
    try:
        return Factor(tuple(pieces))
    except ValueError as exc:
        raise SpecError(str(exc), cur.text, start, cur.line_offset) from None


def _function(cur: _Cursor, domain: WeightedDomain) -> ProductFunction:
    start = cur.pos
    factors = [_factor(cur)]
    while cur.peek() == ",":
        cur.expect(",")
        factors.append(_factor(cur))
    if len(factors) != domain.k:
        raise SpecError(f"{len(factors)} factors for a domain with {domain.k} blocks",
                        cur.text, start, cur.line_offset)
    return ProductFunction(tuple(factors), domain)


def parse_function(text: str, domain: WeightedDomain | None = None) -> ProductFunction:
    """``factor(piece(lo, hi, c, e), ...), factor(...)``, one factor per block."""
    cur = _Cursor(text)
    f = _function(cur, domain or WeightedDomain.lebesgue(1))
    cur.end()
    return f


def _psi(cur: _Cursor, interval: Interval, domain: WeightedDomain) -> PsiFunction:
    cur.skip()
    start = cur.pos
    kind = cur.name()
    if kind == "canonical":
        return canonical_psi(interval, domain)
    if kind == "const":
        (c,) = cur.numbers(1)
        if not c > 0.0:
            raise SpecError("const needs a positive value", cur.text, start, cur.line_offset)
        return constant_psi(interval, c)
    if kind == "power":
        c, ga, gb = cur.numbers(3)
        if not c > 0.0:
            raise SpecError("power needs a positive coefficient", cur.text, start, cur.line_offset)
        return power_psi(interval, c, ga, gb)
    if kind == "rep":
        cur.expect("(")
        f = _function(cur, domain)
        cur.expect(")")
        try:
            return from_representation(f, interval)
        except ArithmeticError as exc:
            raise SpecError(str(exc), cur.text, start, cur.line_offset) from None
    if kind == "prod":
        cur.expect("(")
        left = _psi(cur, interval, domain)
        cur.expect(",")
        right = _psi(cur, interval, domain)
        cur.expect(")")
        return multiply_psi(left, right)
    raise SpecError(f"unknown psi form {kind!r}", cur.text, start, cur.line_offset)


def parse_psi(text: str, interval: Interval, domain: WeightedDomain | None = None) -> PsiFunction:
    """Build ``psi`` on ``interval`` from its text form (see the module docstring)."""
    cur = _Cursor(text)
    psi = _psi(cur, interval, domain or WeightedDomain.lebesgue(1))
    cur.end()
    return psi


def parse_config(text: str) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment, blank lines are ignored."""
    out = {}
    offset = 0
    for line in text.splitlines(keepends=True):
        body = line.split("#", 1)[0]
        if body.strip():
            if "=" not in body:
                raise SpecError("expected 'key = value'", text, offset + len(body) - len(body.lstrip()))
            key, value = body.split("=", 1)
            key = key.strip()
            if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_-]*", key):
                raise SpecError(f"bad key {key!r}", text, offset + len(body) - len(body.lstrip()))
            out[key.replace("-", "_")] = value.strip()
        offset += len(line)
    return out
