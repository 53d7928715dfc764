"""Exact rational arithmetic backing the field tower.

Uses gmpy2.mpq when available (much faster), falling back to
fractions.Fraction.  Both expose .numerator/.denominator and canonical
str() forms like "3" and "-1/2", which the text formats rely on.
"""

try:
    from gmpy2 import mpq as QQ, is_square as _gmpy_is_square, isqrt as _gmpy_isqrt, mpz

    def _isqrt(n):
        return int(_gmpy_isqrt(mpz(n)))

    def _is_square(n):
        return bool(_gmpy_is_square(mpz(n)))

except ImportError:  # pragma: no cover - exercised only without gmpy2
    from fractions import Fraction as QQ
    from math import isqrt as _isqrt

    def _is_square(n):
        if n < 0:
            return False
        r = _isqrt(n)
        return r * r == n


ZERO = QQ(0)
ONE = QQ(1)


def qq(value):
    """Coerce an int, string ("p/q"), or rational to QQ."""
    if isinstance(value, type(ZERO)):
        return value
    return QQ(value)


def is_integer(q):
    return q.denominator == 1


def as_integer(q):
    if q.denominator != 1:
        raise ValueError(f"{q} is not an integer")
    return int(q.numerator)


def sign_of(q):
    if q > 0:
        return 1
    if q < 0:
        return -1
    return 0


def rational_sqrt(q):
    """Exact square root of a non-negative rational, or None."""
    if q < 0:
        return None
    num, den = int(q.numerator), int(q.denominator)
    if not (_is_square(num) and _is_square(den)):
        return None
    return QQ(_isqrt(num), _isqrt(den))
