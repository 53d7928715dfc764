"""Truncated formal meromorphic series (Laurent jets) with explicit
guaranteed-order bookkeeping.

A jet represents f = sum_{d=v}^{N} c_d x^d + O(x^{N+1}) where N is the
guaranteed order: every coefficient up to and including absolute degree N
is exact.  N may be ORDER_INF for exact Laurent polynomials.  Guarantees
propagate pessimistically; any request for coefficients beyond the
guarantee raises PrecisionError instead of fabricating zeros.
"""

import math

from .errors import PrecisionError, ZeroJetError
from .field import FieldElement, join, zero_of, one_of
from .rationals import qq

ORDER_INF = math.inf


class LaurentJet:
    __slots__ = ("field", "valuation", "coeffs", "order")

    def __init__(self, field, valuation, coeffs, order=ORDER_INF):
        coeffs = list(coeffs)
        # strip beyond-order data (it carries no guarantee), then normalize
        if valuation is not None and order != ORDER_INF:
            excess = (valuation + len(coeffs) - 1) - order
            if excess > 0:
                del coeffs[len(coeffs) - excess :]
        while coeffs and coeffs[0].is_zero():
            coeffs.pop(0)
            valuation += 1
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        if not coeffs:
            valuation = None
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "valuation", valuation)
        object.__setattr__(self, "coeffs", tuple(c.coerce(field) for c in coeffs))
        object.__setattr__(self, "order", order)

    def __setattr__(self, *args):
        raise AttributeError("LaurentJet is immutable")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero(field, order=ORDER_INF):
        return LaurentJet(field, None, (), order)

    @staticmethod
    def constant(value, order=ORDER_INF):
        return LaurentJet(value.field, 0, (value,), order)

    @staticmethod
    def monomial(value, degree, order=ORDER_INF):
        return LaurentJet(value.field, degree, (value,), order)

    @staticmethod
    def from_polynomial(p, order=ORDER_INF):
        return LaurentJet(p.field, 0, p.coeffs, order)

    # -- structure ------------------------------------------------------

    def is_zero(self):
        """Zero up to the guaranteed order."""
        return self.valuation is None

    def is_exact_zero(self):
        return self.valuation is None and self.order == ORDER_INF

    @property
    def valuation_bound(self):
        """Exact valuation, or (for jets zero to their order) a lower bound."""
        if self.valuation is not None:
            return self.valuation
        return self.order + 1

    def coerce(self, field):
        if field == self.field:
            return self
        return LaurentJet(field, self.valuation, self.coeffs, self.order)

    def coefficient(self, degree):
        if degree > self.order:
            raise PrecisionError(
                f"coefficient at degree {degree} beyond guaranteed order {self.order}",
                required=degree,
                available=self.order,
            )
        if self.valuation is None:
            return zero_of(self.field)
        k = degree - self.valuation
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return zero_of(self.field)

    def items(self):
        """Known nonzero coefficients as (degree, value) pairs."""
        if self.valuation is None:
            return
        for k, c in enumerate(self.coeffs):
            if not c.is_zero():
                yield self.valuation + k, c

    # -- arithmetic -------------------------------------------------------

    def _binary(self, other):
        if isinstance(other, FieldElement):
            other = LaurentJet.constant(other)
        if not isinstance(other, LaurentJet):
            return self, NotImplemented
        if other.field == self.field:
            return self, other
        f = join(self.field, other.field)
        return self.coerce(f), other.coerce(f)

    def __add__(self, other):
        a, b = self._binary(other)
        if b is NotImplemented:
            return NotImplemented
        order = min(a.order, b.order)
        sparse = {}
        for src in (a, b):
            for d, c in src.items():
                if d <= order:
                    sparse[d] = sparse.get(d, zero_of(a.field)) + c
        return _from_sparse(a.field, sparse, order)

    __radd__ = __add__

    def __neg__(self):
        return LaurentJet(
            self.field, self.valuation, tuple(-c for c in self.coeffs), self.order
        )

    def __sub__(self, other):
        a, b = self._binary(other)
        if b is NotImplemented:
            return NotImplemented
        return a + (-b)

    def __mul__(self, other):
        a, b = self._binary(other)
        if b is NotImplemented:
            return NotImplemented
        order = min(a.valuation_bound + b.order, b.valuation_bound + a.order)
        if a.valuation is None or b.valuation is None:
            return LaurentJet.zero(a.field, order)
        sparse = {}
        for da, ca in a.items():
            for db, cb in b.items():
                d = da + db
                if d <= order:
                    prod = ca * cb
                    sparse[d] = sparse.get(d, zero_of(a.field)) + prod
        return _from_sparse(a.field, sparse, order)

    __rmul__ = __mul__

    def scale(self, value):
        if value.is_zero():
            return LaurentJet.zero(join(self.field, value.field), self.order)
        f = join(self.field, value.field)
        return LaurentJet(
            f, self.valuation, tuple(c * value for c in self.coeffs), self.order
        )

    def shift(self, k):
        """Multiply by x^k."""
        if k == 0:
            return self
        val = None if self.valuation is None else self.valuation + k
        return LaurentJet(self.field, val, self.coeffs, self.order + k)

    def invert_unit(self, order=None):
        """Multiplicative inverse; ``order`` is the requested absolute
        guaranteed order of the result (defaults to the provable one)."""
        if self.valuation is None:
            raise ZeroJetError("cannot invert a jet with no known nonzero term")
        v = self.valuation
        if len(self.coeffs) == 1 and (order is None or self.order == ORDER_INF):
            inv = LaurentJet.monomial(self.coeffs[0].inverse(), -v, self.order - 2 * v)
            return inv if order is None else inv.restrict(order)
        natural = self.order - 2 * v
        if order is None:
            order = natural
            if order == ORDER_INF:
                raise PrecisionError(
                    "target order required to invert an exact jet"
                )
        if order > natural:
            raise PrecisionError(
                f"inverse only provable to order {natural}, requested {order}",
                required=order,
                available=natural,
            )
        depth = order + v  # relative coefficients needed in the result
        c0 = self.coeffs[0]
        inv0 = c0.inverse()
        rel = [inv0]
        for j in range(1, depth + 1):
            acc = zero_of(self.field)
            for i in range(1, min(j, len(self.coeffs) - 1) + 1):
                acc = acc + self.coeffs[i] * rel[j - i]
            rel.append(-acc * inv0)
        return LaurentJet(self.field, -v, rel, order)

    def derivative(self):
        if self.valuation is None:
            return LaurentJet.zero(self.field, self.order - 1)
        coeffs = [
            c * FieldElement.of(self.valuation + k, self.field)
            for k, c in enumerate(self.coeffs)
        ]
        return LaurentJet(self.field, self.valuation - 1, coeffs, self.order - 1)

    def substitute_power(self, r):
        """self(x^r); valuation and guaranteed order multiply by r."""
        if r == 1:
            return self
        if self.valuation is None:
            return LaurentJet.zero(self.field, self.order * r)
        coeffs = []
        for k, c in enumerate(self.coeffs):
            if k:
                coeffs.extend([zero_of(self.field)] * (r - 1))
            coeffs.append(c)
        return LaurentJet(self.field, self.valuation * r, coeffs, self.order * r)

    def truncate(self, degree):
        """Exact truncation: drop all terms beyond absolute ``degree``.

        The result is an exact Laurent polynomial (infinite order)."""
        if degree > self.order:
            raise PrecisionError(
                f"truncation at degree {degree} beyond guaranteed order {self.order}",
                required=degree,
                available=self.order,
            )
        if self.valuation is None:
            return LaurentJet.zero(self.field)
        kept = self.coeffs[: max(0, degree - self.valuation + 1)]
        return LaurentJet(self.field, self.valuation if kept else None, kept)

    def restrict(self, order):
        """Weaken the guarantee to ``order`` (drops now-unreliable terms)."""
        if order >= self.order:
            return self
        if self.valuation is None:
            return LaurentJet.zero(self.field, order)
        kept = self.coeffs[: max(0, order - self.valuation + 1)]
        return LaurentJet(self.field, self.valuation if kept else None, kept, order)

    # -- comparison and text ----------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, LaurentJet):
            return NotImplemented
        a, b = self._binary(other)
        return (
            a.valuation == b.valuation
            and a.coeffs == b.coeffs
            and a.order == b.order
        )

    def __hash__(self):
        return hash((self.valuation, self.coeffs, self.order))

    def same_series(self, other, upto=None):
        """Equality of known coefficients up to min guaranteed order
        (or ``upto`` if given)."""
        a, b = self._binary(other)
        limit = min(a.order, b.order)
        if upto is not None:
            limit = min(limit, upto)
        if limit == ORDER_INF:
            return a.valuation == b.valuation and a.coeffs == b.coeffs
        lo = min(a.valuation_bound, b.valuation_bound)
        if lo == ORDER_INF or lo > limit:
            return True
        d = lo
        while d <= limit:
            if a.coefficient(d) != b.coefficient(d):
                return False
            d += 1
        return True

    def __repr__(self):
        from .text import render_jet

        return f"<jet {render_jet(self)}>"


def _from_sparse(field, sparse, order):
    sparse = {d: c for d, c in sparse.items() if not c.is_zero()}
    if not sparse:
        return LaurentJet.zero(field, order)
    val = min(sparse)
    top = max(sparse)
    coeffs = [sparse.get(d, zero_of(field)) for d in range(val, top + 1)]
    return LaurentJet(field, val, coeffs, order)


def jet_x(field, order=ORDER_INF):
    return LaurentJet.monomial(one_of(field), 1, order)


def jet_of(value, field, order=ORDER_INF):
    return LaurentJet.constant(FieldElement.of(qq(value), field), order)
