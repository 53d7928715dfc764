"""Univariate polynomials with FieldElement coefficients.

Coefficients are stored low degree first with no trailing zeros; the zero
polynomial has an empty coefficient tuple and degree -1.
"""

from .errors import DivisionByZeroError
from .field import FieldElement, RATIONALS, join, one_of, zero_of


class FieldPolynomial:
    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        coeffs = list(coeffs)
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", tuple(c.coerce(field) for c in coeffs))

    def __setattr__(self, *args):
        raise AttributeError("FieldPolynomial is immutable")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def from_scalars(values, field=RATIONALS):
        return FieldPolynomial(field, [FieldElement.of(v, field) for v in values])

    @staticmethod
    def constant(value):
        return FieldPolynomial(value.field, [value])

    @staticmethod
    def x(field=RATIONALS):
        return FieldPolynomial(field, [zero_of(field), one_of(field)])

    @staticmethod
    def x_minus(value):
        return FieldPolynomial(value.field, [-value, one_of(value.field)])

    # -- structure ------------------------------------------------------

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def coefficient(self, k):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return zero_of(self.field)

    @property
    def leading(self):
        if not self.coeffs:
            raise DivisionByZeroError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coerce(self, field):
        if field == self.field:
            return self
        return FieldPolynomial(field, self.coeffs)

    def _binary(self, other):
        if isinstance(other, FieldElement):
            other = FieldPolynomial.constant(other)
        elif isinstance(other, int):
            other = FieldPolynomial.from_scalars([other], self.field)
        if not isinstance(other, FieldPolynomial):
            return self, NotImplemented
        f = join(self.field, other.field)
        return self.coerce(f), other.coerce(f)

    # -- ring operations --------------------------------------------------

    def __add__(self, other):
        a, b = self._binary(other)
        if b is NotImplemented:
            return NotImplemented
        n = max(len(a.coeffs), len(b.coeffs))
        return FieldPolynomial(
            a.field, [a.coefficient(i) + b.coefficient(i) for i in range(n)]
        )

    __radd__ = __add__

    def __neg__(self):
        return FieldPolynomial(self.field, [-c for c in self.coeffs])

    def __sub__(self, other):
        a, b = self._binary(other)
        if b is NotImplemented:
            return NotImplemented
        n = max(len(a.coeffs), len(b.coeffs))
        return FieldPolynomial(
            a.field, [a.coefficient(i) - b.coefficient(i) for i in range(n)]
        )

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        a, b = self._binary(other)
        if b is NotImplemented:
            return NotImplemented
        if a.is_zero() or b.is_zero():
            return FieldPolynomial(a.field, [])
        out = [zero_of(a.field)] * (len(a.coeffs) + len(b.coeffs) - 1)
        for i, ci in enumerate(a.coeffs):
            if ci.is_zero():
                continue
            for j, cj in enumerate(b.coeffs):
                out[i + j] = out[i + j] + ci * cj
        return FieldPolynomial(a.field, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        result = FieldPolynomial.from_scalars([1], self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other):
        a, b = self._binary(other)
        if b is NotImplemented:
            return NotImplemented
        if b.is_zero():
            raise DivisionByZeroError("polynomial division by zero")
        quo = [zero_of(a.field)] * max(len(a.coeffs) - len(b.coeffs) + 1, 0)
        rem = list(a.coeffs)
        inv_lead = b.leading.inverse()
        db = b.degree
        for k in range(len(rem) - 1, db - 1, -1):
            c = rem[k]
            if c.is_zero():
                continue
            q = c * inv_lead
            quo[k - db] = q
            for j in range(db + 1):
                rem[k - db + j] = rem[k - db + j] - q * b.coeffs[j]
        return FieldPolynomial(a.field, quo), FieldPolynomial(a.field, rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __eq__(self, other):
        if isinstance(other, (int, FieldElement)):
            a, b = self._binary(other)
            return a.coeffs == b.coeffs
        if not isinstance(other, FieldPolynomial):
            return NotImplemented
        a, b = self._binary(other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    # -- calculus and substitution ---------------------------------------

    def derivative(self):
        return FieldPolynomial(
            self.field,
            [c * FieldElement.of(k, self.field) for k, c in enumerate(self.coeffs)][1:],
        )

    def evaluate(self, x):
        acc = zero_of(join(self.field, x.field))
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose(self, inner):
        """self(inner(x)) for a polynomial argument."""
        acc = FieldPolynomial(join(self.field, inner.field), [])
        for c in reversed(self.coeffs):
            acc = acc * inner + FieldPolynomial.constant(c)
        return acc

    def substitute_power(self, r):
        """self(x^r)."""
        if r == 1 or self.is_zero():
            return self
        out = [zero_of(self.field)] * (self.degree * r + 1)
        for k, c in enumerate(self.coeffs):
            out[k * r] = c
        return FieldPolynomial(self.field, out)

    def monic(self):
        if self.is_zero():
            return self
        inv = self.leading.inverse()
        return FieldPolynomial(self.field, [c * inv for c in self.coeffs])

    def map_coefficients(self, fn):
        return FieldPolynomial(self.field, [fn(c) for c in self.coeffs])

    def conjugate(self):
        return self.map_coefficients(lambda c: c.conjugate())

    def is_real(self):
        return all(c.is_real() for c in self.coeffs)

    def key(self):
        """Deterministic sort key: degree, then coefficient coordinates."""
        return (self.degree, tuple(c.key() for c in self.coeffs))

    def __repr__(self):
        from .text import render_polynomial

        return f"<poly {render_polynomial(self)}>"


def poly_gcd(a, b):
    """Monic gcd via the Euclidean algorithm."""
    a, b = a._binary(b)
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


def poly_xgcd(a, b):
    """Extended gcd: returns (g, s, t) with s*a + t*b = g, g monic."""
    f = join(a.field, b.field)
    a, b = a.coerce(f), b.coerce(f)
    one = FieldPolynomial.from_scalars([1], f)
    zero = FieldPolynomial(f, [])
    r0, r1 = a, b
    s0, s1 = one, zero
    t0, t1 = zero, one
    while not r1.is_zero():
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    inv = r0.leading.inverse()
    return r0.monic(), s0 * inv, t0 * inv


def squarefree_decomposition(p):
    """Yun's algorithm: returns [(factor, multiplicity)] with factors monic,
    squarefree, pairwise coprime, and p = lc * prod factor^mult."""
    if p.degree < 1:
        return []
    p = p.monic()
    dp = p.derivative()
    a = poly_gcd(p, dp)
    b = p // a
    c = dp // a
    d = c - b.derivative()
    out = []
    i = 1
    while b.degree >= 1:
        a = poly_gcd(b, d)
        if a.degree >= 1:
            out.append((a, i))
        b = b // a
        d = (d // a) - b.derivative()
        i += 1
    return out
