"""Small helpers for exact rational arithmetic and formatting."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

Number = Union[int, Fraction, str]

INF = math.inf


def Q(x) -> Fraction:
    """Coerce ``x`` to a :class:`Fraction`.

    Strings may be ``"p/q"``, integers or finite decimals (``"1.5"``).
    Floats are accepted and converted exactly, which is rarely what a caller
    wants; pass strings instead.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def ratio(num: Fraction, den: Fraction):
    """Return ``num/den`` with 0/0 -> 0 and x/0 -> inf for x > 0."""
    if num <= 0:
        if num < 0 and den > 0:
            return num / den
        return Fraction(0)
    if den == 0:
        return INF
    return num / den


def fmt(x) -> str:
    """Format a rational as ``"p/q"`` (or ``"p"`` when integral)."""
    if x == INF:
        return "inf"
    x = Q(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse(s: str):
    """Inverse of :func:`fmt`."""
    if s == "inf":
        return INF
    return Fraction(s)


def dec(x, digits: int = 15) -> str:
    """Advisory decimal rendering with ``digits`` significant digits."""
    if x == INF:
        return "inf"
    return f"{float(x):.{digits}g}"


def lcm(*values: int) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out
