"""Exact rational arithmetic helpers.

All coordinates in this package are exact rationals.  gmpy2's mpq is used
when available (it is an order of magnitude faster than fractions.Fraction
and interoperates with it); the stdlib Fraction is the fallback.  Both
expose .numerator/.denominator and normalize gcd/sign on construction.
"""

from __future__ import annotations

from fractions import Fraction

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    Q = Fraction

ZERO = Q(0)
ONE = Q(1)


def rat(num, den=1):
    """Build an exact rational from ints, strings, Fractions or mpq."""
    return Q(num, den) if den != 1 else Q(num)


def is_rational(x) -> bool:
    return isinstance(x, (int, Fraction)) or type(x) is type(ZERO)


def fmt(q) -> str:
    """Canonical text form: 'p' or 'p/q' with q > 0."""
    q = Q(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def qmin(*vals):
    return min(vals)


def qmax(*vals):
    return max(vals)


def qfloor(q) -> int:
    q = Q(q)
    return q.numerator // q.denominator


def qceil(q) -> int:
    q = Q(q)
    return -((-q.numerator) // q.denominator)


def qsign(q) -> int:
    if q > 0:
        return 1
    if q < 0:
        return -1
    return 0
