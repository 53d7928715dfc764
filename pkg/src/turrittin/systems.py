"""Meromorphic linear systems Y' = A(x) Y as jet matrices, their invariants,
gauge transformations, ramifications, and recorded transformation chains.

A SystemJet holds an n x n matrix of Laurent jets sharing one guaranteed
absolute order.  A gauge step B = P^{-1} A P - P^{-1} P' is recorded as a
TransformStep carrying the payload matrix (never a closure), so chains
serialize and replay bit-exactly.
"""

from .errors import (
    LinalgError,
    PrecisionError,
    SingularGaugeError,
    ZeroSystemError,
)
from .field import FieldElement, join, one_of, zero_of
from .jets import LaurentJet, ORDER_INF
from .matrix import Matrix, det, inverse
from .poly import FieldPolynomial

CONSTANT_REGULAR = "constant-regular"
REGULAR_POLYNOMIAL = "regular-polynomial"
DIAGONAL_MONOMIAL = "diagonal-monomial"
RAMIFICATION = "ramification"

GAUGE_KINDS = (CONSTANT_REGULAR, REGULAR_POLYNOMIAL, DIAGONAL_MONOMIAL)


class SystemJet:
    __slots__ = ("field", "n", "entries", "order")

    def __init__(self, field, entries, order=None):
        entries = [list(row) for row in entries]
        n = len(entries)
        if any(len(row) != n for row in entries):
            raise LinalgError("system matrix must be square")
        common = ORDER_INF if order is None else order
        for row in entries:
            for jet in row:
                common = min(common, jet.order)
        entries = tuple(
            tuple(jet.coerce(field).restrict(common) for jet in row) for row in entries
        )
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "order", common)

    def __setattr__(self, *args):
        raise AttributeError("SystemJet is immutable")

    # -- construction -----------------------------------------------------

    @staticmethod
    def from_coefficients(field, valuation, matrices, order=None):
        """Build x^valuation * (M0 + x M1 + ...) with guaranteed absolute
        order (default: exact)."""
        n = matrices[0].nrows
        entries = []
        for i in range(n):
            row = []
            for j in range(n):
                sparse = {}
                for t, m in enumerate(matrices):
                    c = m[i, j]
                    if not c.is_zero():
                        sparse[valuation + t] = c
                if sparse:
                    lo = min(sparse)
                    hi = max(sparse)
                    coeffs = [sparse.get(d, zero_of(field)) for d in range(lo, hi + 1)]
                    row.append(LaurentJet(field, lo, coeffs, ORDER_INF if order is None else order))
                else:
                    row.append(LaurentJet.zero(field, ORDER_INF if order is None else order))
            entries.append(row)
        return SystemJet(field, entries, order)

    @staticmethod
    def zero(field, n, order=ORDER_INF):
        z = LaurentJet.zero(field, order)
        return SystemJet(field, [[z] * n for _ in range(n)], order)

    def coerce(self, field):
        if field == self.field:
            return self
        return SystemJet(field, self.entries, self.order)

    # -- structure ----------------------------------------------------------

    def valuation(self):
        v = None
        for row in self.entries:
            for jet in row:
                if jet.valuation is not None:
                    v = jet.valuation if v is None else min(v, jet.valuation)
        return v

    def is_zero(self):
        return self.valuation() is None

    @property
    def relative_order(self):
        v = self.valuation()
        if v is None:
            return ORDER_INF
        return self.order - v

    def matrix_at(self, degree):
        """Coefficient matrix at absolute degree (exact; raises beyond order)."""
        return Matrix(
            [[jet.coefficient(degree) for jet in row] for row in self.entries]
        )

    def coefficient(self, j):
        """The paper's A_j: coefficient at x^(valuation + j)."""
        v = self.valuation()
        if v is None:
            raise ZeroSystemError("zero system has no coefficients")
        return self.matrix_at(v + j)

    def truncate(self, n_rel):
        """J_N truncation relative to the valuation; exact result."""
        v = self.valuation()
        if v is None:
            if self.order == ORDER_INF:
                return self
            raise PrecisionError(
                "cannot truncate a zero jet of finite order exactly",
                required=n_rel,
            )
        if n_rel > self.relative_order:
            raise PrecisionError(
                f"truncation order {n_rel} beyond guaranteed relative order "
                f"{self.relative_order}",
                required=n_rel,
                available=self.relative_order,
            )
        cut = v + n_rel
        return SystemJet(
            self.field,
            [[jet.truncate(cut) for jet in row] for row in self.entries],
        )

    def restrict_relative(self, n_rel):
        v = self.valuation()
        if v is None:
            return self
        return SystemJet(
            self.field,
            [[jet.restrict(v + n_rel) for jet in row] for row in self.entries],
            v + n_rel,
        )

    def block(self, rows, cols=None):
        cols = rows if cols is None else cols
        return SystemJet(
            self.field,
            [[self.entries[i][j] for j in cols] for i in rows],
            self.order,
        )

    def same_series(self, other, upto=None):
        if self.n != other.n:
            return False
        for ra, rb in zip(self.entries, other.entries):
            for a, b in zip(ra, rb):
                if not a.same_series(b, upto=upto):
                    return False
        return True

    def __eq__(self, other):
        if not isinstance(other, SystemJet):
            return NotImplemented
        return self.n == other.n and all(
            a == b
            for ra, rb in zip(self.entries, other.entries)
            for a, b in zip(ra, rb)
        )

    def __repr__(self):
        from .text import render_jet

        rows = "; ".join(
            ", ".join(render_jet(jet, with_order=False) for jet in row)
            for row in self.entries
        )
        return f"<system n={self.n} order={self.order} [{rows}]>"


class SystemInvariants:
    __slots__ = ("n", "order", "poincare_rank", "radiality_index", "determinacy_order")

    def __init__(self, n, order, poincare_rank, radiality_index):
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "poincare_rank", poincare_rank)
        object.__setattr__(self, "radiality_index", radiality_index)
        object.__setattr__(
            self,
            "determinacy_order",
            n * (poincare_rank - radiality_index) + radiality_index,
        )

    def __setattr__(self, *args):
        raise AttributeError("SystemInvariants is immutable")

    def __repr__(self):
        return (
            f"<invariants nu={self.order} q={self.poincare_rank} "
            f"k={self.radiality_index} N={self.determinacy_order}>"
        )


def system_invariants(system):
    """Order, Poincare rank, radiality index and determinacy order."""
    v = system.valuation()
    if v is None:
        raise ZeroSystemError("invariants of the zero system")
    q = max(-v - 1, 0)
    from .matrix import is_scalar_matrix

    k = q
    for j in range(q):
        if v + j > system.order:
            raise PrecisionError(
                "radiality index needs more coefficients",
                required=j,
                available=system.order - v,
            )
        if not is_scalar_matrix(system.coefficient(j)):
            k = j
            break
    return SystemInvariants(system.n, v, q, k)


# -- transformation steps -------------------------------------------------


class TransformStep:
    """One recorded reduction move.

    kinds and payloads:
      constant-regular    Matrix of FieldElement, invertible
      regular-polynomial  Matrix of FieldPolynomial with det P(0) != 0
      diagonal-monomial   tuple of non-negative integer exponents
      ramification        integer r >= 1
    """

    __slots__ = ("kind", "payload", "field")

    def __init__(self, kind, payload, field=None):
        if kind == CONSTANT_REGULAR:
            if det(payload).is_zero():
                raise SingularGaugeError("constant gauge payload is singular")
            field = field or payload[0, 0].field
        elif kind == REGULAR_POLYNOMIAL:
            p0 = payload.map(lambda p: p.coefficient(0))
            if det(p0).is_zero():
                raise SingularGaugeError("gauge payload has det P(0) = 0")
            field = field or payload[0, 0].field
        elif kind == DIAGONAL_MONOMIAL:
            payload = tuple(int(e) for e in payload)
            if any(e < 0 for e in payload):
                raise LinalgError("monomial exponents must be non-negative")
        elif kind == RAMIFICATION:
            payload = int(payload)
            if payload < 1:
                raise LinalgError("ramification index must be >= 1")
        else:
            raise LinalgError(f"unknown step kind {kind!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "payload", payload)
        object.__setattr__(self, "field", field)

    def __setattr__(self, *args):
        raise AttributeError("TransformStep is immutable")

    @property
    def is_gauge(self):
        return self.kind in GAUGE_KINDS

    def poly_matrix(self, field):
        """The payload as a polynomial matrix over ``field``."""
        if self.kind == CONSTANT_REGULAR:
            return self.payload.map(
                lambda c: FieldPolynomial.constant(c.coerce(field))
            )
        if self.kind == REGULAR_POLYNOMIAL:
            return self.payload.map(lambda p: p.coerce(field))
        if self.kind == DIAGONAL_MONOMIAL:
            n = len(self.payload)
            zero = FieldPolynomial(field, [])
            rows = []
            for i in range(n):
                row = [zero] * n
                row[i] = FieldPolynomial(
                    field,
                    [zero_of(field)] * self.payload[i] + [one_of(field)],
                )
                rows.append(row)
            return Matrix(rows)
        raise LinalgError("ramification has no payload matrix")

    def degree(self):
        if self.kind == CONSTANT_REGULAR:
            return 0
        if self.kind == REGULAR_POLYNOMIAL:
            return max(p.degree for row in self.payload.rows for p in row)
        if self.kind == DIAGONAL_MONOMIAL:
            return max(self.payload)
        return 0

    def __eq__(self, other):
        if not isinstance(other, TransformStep):
            return NotImplemented
        return self.kind == other.kind and self.payload == other.payload

    def __repr__(self):
        if self.kind == RAMIFICATION:
            return f"<step R_{self.payload}>"
        if self.kind == DIAGONAL_MONOMIAL:
            return f"<step diag x^{list(self.payload)}>"
        return f"<step {self.kind} deg {self.degree()}>"


def constant_step(matrix):
    return TransformStep(CONSTANT_REGULAR, matrix)


def polynomial_step(matrix):
    return TransformStep(REGULAR_POLYNOMIAL, matrix)


def monomial_step(exponents):
    return TransformStep(DIAGONAL_MONOMIAL, exponents)


def ramification_step(r):
    return TransformStep(RAMIFICATION, r)


class TransformChain:
    __slots__ = ("steps",)

    def __init__(self, steps=()):
        object.__setattr__(self, "steps", tuple(steps))

    def __setattr__(self, *args):
        raise AttributeError("TransformChain is immutable")

    def __iter__(self):
        return iter(self.steps)

    def __len__(self):
        return len(self.steps)

    def __getitem__(self, k):
        return self.steps[k]

    def __add__(self, other):
        if isinstance(other, TransformChain):
            return TransformChain(self.steps + other.steps)
        return TransformChain(self.steps + tuple(other))

    def __eq__(self, other):
        if not isinstance(other, TransformChain):
            return NotImplemented
        return self.steps == other.steps

    def ramification_index(self):
        r = 1
        for step in self.steps:
            if step.kind == RAMIFICATION:
                r *= step.payload
        return r

    def gauge_degree(self):
        """Degree of the product of all gauge payloads (composition degree)."""
        return sum(step.degree() for step in self.steps if step.is_gauge)

    def __repr__(self):
        return f"<chain {list(self.steps)!r}>"


# -- the transformations ---------------------------------------------------


def _jet_matrix(poly_matrix, field, order=ORDER_INF):
    return poly_matrix.map(
        lambda p: LaurentJet.from_polynomial(p.coerce(field), order)
    )


def _jet_identity(n, field, order=ORDER_INF):
    one = LaurentJet.constant(one_of(field), order)
    zero = LaurentJet.zero(field, order)
    return Matrix([[one if i == j else zero for j in range(n)] for i in range(n)])


def _system_matrix(system):
    return Matrix(system.entries)


def _poly_inverse_jets(pmat, field, order):
    """Inverse of a regular polynomial matrix, as jets to absolute order
    ``order`` (which must be finite and >= 0)."""
    n = pmat.nrows
    p0 = pmat.map(lambda p: p.coefficient(0).coerce(field))
    try:
        p0_inv = inverse(p0)
    except LinalgError as exc:
        raise SingularGaugeError("gauge payload has det P(0) = 0") from exc
    p0_inv_jets = p0_inv.map(lambda c: LaurentJet.constant(c))
    pjets = _jet_matrix(pmat, field)
    ident = _jet_identity(n, field)
    w = (p0_inv_jets * pjets - ident).map(lambda jet: jet.restrict(order))
    acc = ident.map(lambda jet: jet.restrict(order))
    term = acc
    for _ in range(int(order) + 1):
        term = (term * w).map(lambda jet: (-jet).restrict(order))
        if all(jet.is_zero() for row in term.rows for jet in row):
            break
        acc = acc + term
    return acc * p0_inv_jets


def gauge_transform(system, step):
    """Apply a gauge step: B = P^{-1} A P - P^{-1} P'."""
    field = join(system.field, step.field) if step.field else system.field
    system = system.coerce(field)
    if step.kind == CONSTANT_REGULAR:
        p = step.payload.map(lambda c: c.coerce(field))
        p_inv = inverse(p)
        a = _system_matrix(system)
        # P^{-1} A P with scalar coefficients, entrywise
        n = system.n
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = LaurentJet.zero(field, system.order)
                for s in range(n):
                    if p_inv[i, s].is_zero():
                        continue
                    for t in range(n):
                        if p[t, j].is_zero():
                            continue
                        acc = acc + a[s, t].scale(p_inv[i, s] * p[t, j])
                row.append(acc)
            rows.append(row)
        return SystemJet(field, rows, system.order)
    if step.kind == DIAGONAL_MONOMIAL:
        exps = step.payload
        if len(exps) != system.n:
            raise LinalgError("monomial gauge size mismatch")
        rows = []
        for i in range(system.n):
            row = []
            for j in range(system.n):
                jet = system.entries[i][j].shift(exps[j] - exps[i])
                if i == j and exps[i]:
                    jet = jet - LaurentJet.monomial(
                        FieldElement.of(exps[i], field), -1
                    )
                row.append(jet)
            rows.append(row)
        return SystemJet(field, rows)
    if step.kind == REGULAR_POLYNOMIAL:
        pmat = step.payload.map(lambda q: q.coerce(field))
        pjets = _jet_matrix(pmat, field)
        pprime = _jet_matrix(pmat.map(lambda q: q.derivative()), field)
        a = _system_matrix(system)
        s = a * pjets - pprime
        if system.order == ORDER_INF:
            # exact input: keep exactness only for exact inverses (monomial-free
            # regular P has a genuinely infinite inverse), so a target is needed
            raise PrecisionError(
                "regular polynomial gauge on exact systems needs a finite order; "
                "restrict the system first"
            )
        v_s = min(
            (jet.valuation_bound for row in s.rows for jet in row),
            default=ORDER_INF,
        )
        v_s = min(v_s, 0)
        target = int(system.order - v_s) + 1
        p_inv = _poly_inverse_jets(pmat, field, target)
        b = p_inv * s
        return SystemJet(field, b.rows, system.order)
    raise LinalgError("ramification is applied with ramify(), not gauge_transform()")


def ramify(system, r):
    """R_r[A] = r x^(r-1) A(x^r)."""
    if r == 1:
        return system
    field = system.field
    scale = FieldElement.of(r, field)
    rows = [
        [
            jet.substitute_power(r).shift(r - 1).scale(scale)
            for jet in row
        ]
        for row in system.entries
    ]
    return SystemJet(field, rows)


def push_through_ramification(step, r):
    """P~ with R_r o Psi_P = Psi_P~ o R_r; substitution x -> x^r."""
    if not step.is_gauge:
        raise LinalgError("only gauge steps push through ramifications")
    if r == 1 or step.kind == CONSTANT_REGULAR:
        return step
    if step.kind == DIAGONAL_MONOMIAL:
        return TransformStep(DIAGONAL_MONOMIAL, tuple(e * r for e in step.payload))
    return TransformStep(
        REGULAR_POLYNOMIAL,
        step.payload.map(lambda p: p.substitute_power(r)),
        step.field,
    )


def apply_step(system, step):
    if step.kind == RAMIFICATION:
        return ramify(system, step.payload)
    return gauge_transform(system, step)


def replay(system, chain):
    for step in chain:
        system = apply_step(system, step)
    return system


def normalize_chain(chain):
    """Rewrite as a single leading ramification followed by gauge steps.

    Uses R_r o Psi_P = Psi_{P(x^r)} o R_r; the rewritten chain acts
    identically on every system.
    """
    r_total = 1
    for step in chain:
        if step.kind == RAMIFICATION:
            r_total *= step.payload
    gauges = []
    r_seen = 1
    for step in chain:
        if step.kind == RAMIFICATION:
            r_seen *= step.payload
        else:
            gauges.append(push_through_ramification(step, r_total // r_seen))
    steps = []
    if r_total > 1:
        steps.append(ramification_step(r_total))
    return TransformChain(steps + gauges)
