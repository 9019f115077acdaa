"""Text form of :class:`PolynomialZ`: ascending coefficients separated by commas.

Each coefficient is a decimal real (``-2``, ``1.5e-3``), a complex literal
``a+bi`` / ``a-bi``, or a pure imaginary ``bi``.  Whitespace is ignored.
"""

from __future__ import annotations

import math
import re

from .series import PolynomialZ

_NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_COEFF = re.compile(
    rf"""
    (?P<re>[+-]?{_NUM})(?:(?P<sign>[+-])(?P<im>{_NUM})?i)?   # a, a+bi, a+i
    | (?P<pim>[+-]?(?:{_NUM})?)i                             # bi, i, -i
    """,
    re.VERBOSE,
)


class PolyParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


def _parse_coeff(token: str, position: int) -> complex:
    m = _COEFF.fullmatch(token)
    if m is None:
        raise PolyParseError(f"malformed coefficient {token!r}", position)
    if m.group("re") is not None:
        real = float(m.group("re"))
        if m.group("sign") is None:
            return complex(real, 0.0)
        imag = float(m.group("im")) if m.group("im") else 1.0
        return complex(real, imag if m.group("sign") == "+" else -imag)
    p = m.group("pim")
    if p in ("", "+"):
        return 1j
    if p == "-":
        return -1j
    return complex(0.0, float(p))


def parse_poly(text: str) -> PolynomialZ:
    """``"1,0,-2"`` -> ``1 - 2 z^2``.  Raises :class:`PolyParseError` with a character position."""
    if text is None or not text.strip():
        raise PolyParseError("empty polynomial", 0)
    coeffs = []
    pos = 0
    for raw in text.split(","):
        start = pos + (len(raw) - len(raw.lstrip()))
        token = "".join(raw.split())
        if not token:
            raise PolyParseError("missing coefficient", start)
        value = _parse_coeff(token, start)
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise PolyParseError(f"coefficient {token!r} is not finite", start)
        coeffs.append(value)
        pos += len(raw) + 1
    return PolynomialZ(coeffs)


def _fmt_real(v: float) -> str:
    return repr(float(v))


def format_poly(p: PolynomialZ) -> str:
    """Canonical text; ``parse_poly(format_poly(p)) == p``."""
    parts = []
    for c in p.coeffs:
        if c.imag == 0:
            parts.append(_fmt_real(c.real))
        else:
            sign = "-" if math.copysign(1.0, c.imag) < 0 else "+"
            parts.append(f"{_fmt_real(c.real)}{sign}{_fmt_real(abs(c.imag))}i")
    return ",".join(parts)
