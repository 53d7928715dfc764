"""Reduction of singular systems to Turrittin-Ramis-Sibuya normal forms
with recorded, replayable chains: rank-0 reduction (splitting, coefficient
specialization, shearing with ramification), tail elimination under
non-resonance, deresonation, and assembly of the formal normal form.

All pipelines are deterministic: identical inputs give bit-identical
chains.  Precision is tracked pessimistically; a run that would need more
input coefficients fails fast with the required truncation order.
"""

from .constmat import (
    coprime_split,
    gamma_invariants,
    jordan_block,
    jordan_single_eigen,
    matrix_spectrum,
    quadratic_roots,
    resonance_data,
    split_by_factors,
    sylvester_solve,
)
from .errors import (
    PrecisionError,
    ResonantResidualError,
    SpectrumMismatchError,
    TurrittinError,
    UnsupportedTowerError,
)
from .factor import factor_poly
from .field import FieldElement, join, one_of, zero_of
from .jets import LaurentJet, ORDER_INF
from .matrix import (
    Matrix,
    charpoly,
    commutator,
    direct_sum,
    is_diagonal_matrix,
    is_scalar_matrix,
    rref,
    solve,
)
from .poly import FieldPolynomial
from .rationals import QQ, as_integer
from .systems import (
    SystemJet,
    TransformChain,
    constant_step,
    gauge_transform,
    monomial_step,
    normalize_chain,
    polynomial_step,
    push_through_ramification,
    ramification_step,
    ramify,
    replay,
    system_invariants,
)


class NormalForm:
    """A (TRS) certificate: x^{-(q+1)} (D(x) + x^q C + tail)."""

    __slots__ = (
        "rank",
        "degree",
        "ramification",
        "exponential_part",
        "residual_matrix",
        "block_structure",
        "principal_part",
        "tail",
        "reduced_system",
        "field",
    )

    def __init__(
        self,
        rank,
        degree,
        ramification,
        exponential_part,
        residual_matrix,
        block_structure,
        principal_part,
        tail,
        reduced_system,
        field,
    ):
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "ramification", ramification)
        object.__setattr__(self, "exponential_part", tuple(exponential_part))
        object.__setattr__(self, "residual_matrix", residual_matrix)
        object.__setattr__(self, "block_structure", tuple(tuple(b) for b in block_structure))
        object.__setattr__(self, "principal_part", principal_part)
        object.__setattr__(self, "tail", tail)
        object.__setattr__(self, "reduced_system", reduced_system)
        object.__setattr__(self, "field", field)

    def __setattr__(self, *args):
        raise AttributeError("NormalForm is immutable")

    def __repr__(self):
        from .text import render_polynomial

        d = ", ".join(render_polynomial(p) for p in self.exponential_part)
        return (
            f"<normal-form q~={self.rank} mu={self.degree} r={self.ramification} "
            f"D=diag({d})>"
        )


class ShearingOrder:
    __slots__ = ("value", "h", "r", "witness")

    def __init__(self, value, witness):
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "h", int(value.numerator))
        object.__setattr__(self, "r", int(value.denominator))
        object.__setattr__(self, "witness", witness)

    def __setattr__(self, *args):
        raise AttributeError("ShearingOrder is immutable")

    def __repr__(self):
        return f"<shearing-order {self.h}/{self.r} via {self.witness}>"


def _system_sub(a, b):
    rows = [
        [x - y for x, y in zip(ra, rb)] for ra, rb in zip(a.entries, b.entries)
    ]
    return SystemJet(a.field, rows, min(a.order, b.order))


def carve_normal_form(system, ramification=1, degree=0, zero_tail=False):
    """Read the (TRS) data off a reduced jet.

    The frame is x^{-(q+1)}: D at absolute degrees -(q+1)..-2, the residual
    matrix at -1, tail from 0 on.
    """
    field = system.field
    n = system.n
    v = system.valuation()
    q = 0 if v is None else max(-v - 1, 0)
    if system.order != ORDER_INF and system.order < -1:
        raise PrecisionError(
            "residual matrix lies beyond the guaranteed order",
            required=q,
            available=system.order + q + 1,
        )
    polys = []
    for i in range(n):
        coeffs = []
        for t in range(q):
            row_mat = system.matrix_at(t - q - 1)
            if not is_diagonal_matrix(row_mat):
                raise TurrittinError(
                    f"coefficient {t} of the exponential region is not diagonal"
                )
            coeffs.append(row_mat[i, i])
        polys.append(FieldPolynomial(field, coeffs))
    residual = system.matrix_at(-1)
    dmat = [
        Matrix.diagonal([p.coefficient(t) for p in polys]) for t in range(max(q, 1))
    ]
    for t in range(q):
        if not commutator(dmat[t], residual).is_zero():
            raise TurrittinError("exponential part does not commute with the residual")
    groups = []
    seen = {}
    for i, p in enumerate(polys):
        key = p.key()
        if key in seen:
            groups[seen[key]].append(i)
        else:
            seen[key] = len(groups)
            groups.append([i])
    principal = SystemJet.from_coefficients(
        field, -(q + 1), dmat[:q] + [residual] if q else [residual]
    )
    if zero_tail:
        tail = SystemJet.zero(field, n)
        reduced = principal
    else:
        reduced = system
        tail = _system_sub(system, principal)
    return NormalForm(
        rank=q,
        degree=degree,
        ramification=ramification,
        exponential_part=polys,
        residual_matrix=residual,
        block_structure=groups,
        principal_part=principal,
        tail=tail,
        reduced_system=reduced,
        field=field,
    )


def is_trs_form(system, rank, degree):
    """Definitional (TRS) predicate; independent re-check lives in verify."""
    try:
        nf = carve_normal_form(system)
    except TurrittinError:
        return False
    if nf.rank != rank:
        return False
    v = system.valuation()
    for d in range(0, degree):
        if not system.matrix_at(d).is_zero():
            return False
    return True


# -- splitting lemma ---------------------------------------------------------


def splitting_lemma(a, t0, sizes, n_target):
    """Block-diagonalize to order ``n_target`` after the constant move t0.

    Returns (step_t, b): step_t a regular polynomial gauge of degree at most
    n_target - k with payload P(0) = I, and b the transformed system with
    J_{n_target} b = b11 (+) b22.
    """
    inv = system_invariants(a)
    q, k = inv.poincare_rank, inv.radiality_index
    if not k < q:
        raise SpectrumMismatchError("splitting needs k < q")
    if a.relative_order < n_target:
        raise PrecisionError(
            "splitting lemma needs more coefficients",
            required=n_target,
            available=a.relative_order,
        )
    a0 = gauge_transform(a, constant_step(t0))
    n1, n2 = sizes
    n = a.n
    ak = a0.coefficient(k)
    top = list(range(n1))
    bottom = list(range(n1, n))
    for i in top:
        for j in bottom:
            if not (ak[i, j].is_zero() and ak[j, i].is_zero()):
                raise SpectrumMismatchError("leading matrix is not block-diagonal")
    r_blk = ak.submatrix(top, top)
    s_blk = ak.submatrix(bottom, bottom)
    from .poly import poly_gcd

    if poly_gcd(charpoly(r_blk), charpoly(s_blk)).degree != 0:
        raise SpectrumMismatchError("block spectra are not disjoint")
    field = a0.field
    cur = a0
    payload = _poly_identity(n, field)
    for j in range(1, n_target - k + 1):
        w = cur.coefficient(k + j)
        w12 = w.submatrix(top, bottom)
        w21 = w.submatrix(bottom, top)
        if w12.is_zero() and w21.is_zero():
            continue
        x12 = sylvester_solve(r_blk, s_blk, -w12)
        x21 = sylvester_solve(s_blk, r_blk, -w21)
        tj = Matrix.from_blocks(
            [
                [Matrix.zero(n1, n1, field), x12],
                [x21, Matrix.zero(n2, n2, field)],
            ]
        )
        factor = _poly_identity(n, field) + _poly_of_matrix(tj, j)
        cur = gauge_transform(cur, polynomial_step(factor))
        payload = payload * factor
    payload = payload.map(lambda p: _poly_truncate(p, n_target - k))
    step = polynomial_step(payload)
    b = gauge_transform(a0, step)
    return step, b


def _poly_identity(n, field):
    one = FieldPolynomial.from_scalars([1], field)
    zero = FieldPolynomial(field, [])
    return Matrix([[one if i == j else zero for j in range(n)] for i in range(n)])


def _poly_of_matrix(m, degree):
    """Matrix of monomials m * x^degree."""
    field = m[0, 0].field
    def lift(c):
        if c.is_zero():
            return FieldPolynomial(field, [])
        return FieldPolynomial(field, [zero_of(field)] * degree + [c])
    return m.map(lift)


def _poly_truncate(p, degree):
    return FieldPolynomial(p.field, p.coeffs[: degree + 1])


# -- coefficient specialization (single-eigenvalue head) ----------------------


def _partial_sums(sigma):
    out = []
    acc = 0
    for s in sigma:
        acc += s
        out.append(acc)
    return out


def is_special_matrix(m, sigma):
    """Nonzero rows only at the partial sums of sigma (1-based)."""
    msums = set(_partial_sums(sigma))
    for i in range(m.nrows):
        if (i + 1) in msums:
            continue
        if any(not m[i, j].is_zero() for j in range(m.ncols)):
            return False
    return True


def _solve_specialization(h_sigma, sigma, w):
    """Find T with [H, T] + W special of type sigma (canonical solution)."""
    n = w.nrows
    field = w[0, 0].field
    msums = set(_partial_sums(sigma))
    block_end = [(i + 1) in msums for i in range(n)]
    rows = []
    rhs = []
    for u in range(n):
        if block_end[u]:
            continue
        for v in range(n):
            # [H,T]_{uv} = T_{u+1,v}*(u not block end) - T_{u,v-1}*(v-1 not block end)
            row = [zero_of(field)] * (n * n)
            row[(u + 1) * n + v] = one_of(field)
            if v >= 1 and not block_end[v - 1]:
                row[u * n + (v - 1)] = row[u * n + (v - 1)] - one_of(field)
            rows.append(row)
            rhs.append([-w[u, v]])
    if not rows:
        return Matrix.zero(n, n, field)
    sol = solve(Matrix(rows), Matrix(rhs))
    return Matrix([[sol[i * n + j, 0] for j in range(n)] for i in range(n)])


def specialize_coefficients(a, sigma, n_target):
    """Make every coefficient A_j, k+1 <= j <= n_target, special of type
    sigma, by a regular polynomial gauge with P(0) = I (Wasow 19.2 shape).
    """
    inv = system_invariants(a)
    k = inv.radiality_index
    if all(s == 1 for s in sigma):
        raise SpectrumMismatchError(
            "leading coefficient is radial; specialization does not apply"
        )
    if a.relative_order < n_target:
        raise PrecisionError(
            "specialization needs more coefficients",
            required=n_target,
            available=a.relative_order,
        )
    field = a.field
    n = a.n
    ak = a.coefficient(k)
    lam = ak[0, 0]
    expected = direct_sum([jordan_block(lam, s) for s in sigma])
    if ak != expected:
        raise SpectrumMismatchError("leading coefficient is not in Jordan form")
    h_sigma = expected - Matrix.identity(n, field).scaled(lam)
    cur = a
    payload = _poly_identity(n, field)
    for j in range(1, n_target - k + 1):
        w = cur.coefficient(k + j)
        if is_special_matrix(w, sigma):
            continue
        tj = _solve_specialization(h_sigma, sigma, w)
        factor = _poly_identity(n, field) + _poly_of_matrix(tj, j)
        cur = gauge_transform(cur, polynomial_step(factor))
        payload = payload * factor
    payload = payload.map(lambda p: _poly_truncate(p, n_target - k))
    step = polynomial_step(payload)
    b = gauge_transform(a, step)
    return step, b


# -- shearing ------------------------------------------------------------------


def shearing_order(a):
    """The rational shearing order g = min over entry valuations of the
    non-radial remainder (the single eigenvalue of A_k is carried as radial
    data and excluded from the diagonal valuations)."""
    inv = system_invariants(a)
    q, k = inv.poincare_rank, inv.radiality_index
    if a.relative_order < inv.determinacy_order:
        raise PrecisionError(
            "shearing order needs the determinacy-order truncation",
            required=inv.determinacy_order,
            available=a.relative_order,
        )
    n = a.n
    ak = a.coefficient(k)
    lam = ak[0, 0]
    v = a.valuation()
    depth = min(a.relative_order, inv.determinacy_order) - k
    best = QQ(q - k)
    witness = ("fallback", q - k)
    for u in range(n):
        for w in range(u + 1):  # w <= u: diagonal and below
            alpha = None
            for t in range(int(depth) + 1):
                c = a.entries[u][w].coefficient(v + k + t)
                if u == w and t == 0:
                    c = c - lam
                if not c.is_zero():
                    alpha = t
                    break
            if alpha is None:
                continue
            if u == w:
                cand = QQ(alpha)
                tag = ("diagonal", u + 1, alpha)
            else:
                cand = QQ(alpha, 1 + u - w)
                tag = ("subdiagonal", u + 1, w + 1, alpha)
            if cand < best:
                best = cand
                witness = tag
    if best <= 0:
        raise SpectrumMismatchError(
            "shearing order is not positive; leading matrix is not a Jordan head"
        )
    return ShearingOrder(best, witness)


def shear(a, h):
    """Conjugation by diag(1, x^h, ..., x^{(n-1)h}) minus the log-derivative."""
    if h == 0:
        return None, a
    step = monomial_step([j * h for j in range(a.n)])
    return step, gauge_transform(a, step)


# -- the rank-0 reduction -------------------------------------------------------


def _single_factor_eigenvalue(a, ak):
    """Dispatch data: factor the leading char poly, widening the field when a
    lone irreducible quadratic hides a pair of roots.  Returns
    (a, ak, factors) over the possibly-widened field."""
    while True:
        factors = factor_poly(charpoly(ak))
        if len(factors) > 1 or factors[0][0].degree == 1:
            return a, ak, factors
        p = factors[0][0]
        if p.degree != 2:
            raise UnsupportedTowerError(
                f"irreducible spectral factor of degree {p.degree}"
            )
        wide, _ = quadratic_roots(p, allow_complex=True)
        a = a.coerce(join(a.field, wide))
        ak = ak.map(lambda c: c.coerce(a.field))


def _embed_constant(m, offset, total):
    field = m[0, 0].field
    ident = Matrix.identity(total, field)
    rows = [list(r) for r in ident.rows]
    for i in range(m.nrows):
        for j in range(m.ncols):
            rows[offset + i][offset + j] = m[i, j]
    return Matrix(rows)


def _embed_step(step, offset, total):
    """Extend a block gauge step by the identity on the other coordinates."""
    if step.kind == "constant-regular":
        return constant_step(_embed_constant(step.payload, offset, total))
    if step.kind == "diagonal-monomial":
        exps = [0] * total
        for i, e in enumerate(step.payload):
            exps[offset + i] = e
        return monomial_step(exps)
    field = step.field
    size = step.payload.nrows
    ident = _poly_identity(total, field)
    rows = [list(r) for r in ident.rows]
    for i in range(size):
        for j in range(size):
            rows[offset + i][offset + j] = step.payload[i, j]
    return polynomial_step(Matrix(rows))


def _reduce0(a, trace):
    """Recursive rank-0 reduction; returns the list of steps (unnormalized)."""
    if a.is_zero():
        return []
    inv = system_invariants(a)
    q, k = inv.poincare_rank, inv.radiality_index
    if q == 0 or k == q:
        return []
    if a.relative_order < inv.determinacy_order:
        raise PrecisionError(
            "rank-0 reduction needs the determinacy-order truncation",
            required=inv.determinacy_order,
            available=a.relative_order,
        )
    ak = a.coefficient(k)
    a, ak, factors = _single_factor_eigenvalue(a, ak)
    n = a.n
    if len(factors) > 1:
        # distinct spectral parts: constant split + splitting lemma + recurse
        p1 = factors[0][0] ** factors[0][1]
        p2 = FieldPolynomial.from_scalars([1], a.field)
        for f, mult in factors[1:]:
            p2 = p2 * f**mult
        t0, m1, m2 = coprime_split(ak, p1, p2)
        n1, n2 = m1.nrows, m2.nrows
        if trace is not None:
            trace.append({"event": "split", "n": n, "sizes": (n1, n2)})
        step_t, b = splitting_lemma(a, t0, (n1, n2), inv.determinacy_order)
        steps = [constant_step(t0), step_t]
        b1 = b.block(range(n1))
        b2 = b.block(range(n1, n))
        sub1 = normalize_chain(TransformChain(_reduce0(b1, trace)))
        sub2 = normalize_chain(TransformChain(_reduce0(b2, trace)))
        r1 = sub1.ramification_index()
        r2 = sub2.ramification_index()
        if r1 * r2 > 1:
            steps.append(ramification_step(r1 * r2))
        for g in sub1:
            if g.kind == "ramification":
                continue
            steps.append(_embed_step(push_through_ramification(g, r2), 0, n))
        for g in sub2:
            if g.kind == "ramification":
                continue
            steps.append(_embed_step(push_through_ramification(g, r1), n1, n))
        return steps
    # single eigenvalue in the (possibly widened) field
    lam = -factors[0][0].coefficient(0)
    jd = jordan_single_eigen(ak, lam)
    if trace is not None:
        trace.append(
            {
                "event": "single-eigen",
                "n": n,
                "measure": tuple(gamma_invariants(ak)) + (q - k,),
            }
        )
    steps = [constant_step(jd.conjugator)]
    a = gauge_transform(a, steps[0])
    step_p, a = specialize_coefficients(a, jd.block_sizes, inv.determinacy_order)
    steps.append(step_p)
    sh = shearing_order(a)
    if trace is not None:
        trace[-1]["shearing"] = (sh.h, sh.r)
    if sh.r > 1:
        steps.append(ramification_step(sh.r))
        a = ramify(a, sh.r)
    step_s, a = shear(a, sh.h)
    if step_s is not None:
        steps.append(step_s)
    return steps + _reduce0(a, trace)


def trs_rank0(a, trace=None):
    """Theorem-(i) reduction: returns (chain, NormalForm of degree 0).

    The chain is normalized to at most one leading ramification followed by
    constant/regular-polynomial/diagonal-monomial gauge steps; replaying it
    on the input reproduces nf.reduced_system exactly.
    """
    if a.is_zero():
        chain = TransformChain()
        return chain, carve_normal_form(a)
    inv = system_invariants(a)
    needed = inv.determinacy_order
    if a.relative_order < needed:
        raise PrecisionError(
            "rank-0 reduction needs the determinacy-order truncation",
            required=needed,
            available=a.relative_order,
        )
    if a.order == ORDER_INF:
        a = a.restrict_relative(needed)
    steps = _reduce0(a, trace)
    chain = normalize_chain(TransformChain(steps))
    reduced = replay(a, chain)
    nf = carve_normal_form(reduced, ramification=chain.ramification_index())
    return chain, nf


# -- tail elimination -------------------------------------------------------------


def _diag_groups(polys):
    """Indices grouped by equal diagonal polynomial, first-occurrence order."""
    groups = []
    seen = {}
    for i, p in enumerate(polys):
        key = p.key()
        if key in seen:
            groups[seen[key]].append(i)
        else:
            seen[key] = len(groups)
            groups.append([i])
    return groups


def _block_split_gauge(system, upto_abs):
    """Kill the off-(finer-block)-diagonal part of every coefficient at
    absolute degrees <= upto_abs.  Finer blocks are the maximal index groups
    with equal exponential-part polynomials; recursion on the Poincare rank
    splits by the constant values first (Sylvester steps need distinct
    constants).

    Returns (p, transformed): p a polynomial matrix with p(0) = I.
    """
    field = system.field
    n = system.n
    v = system.valuation()
    ident = _poly_identity(n, field)
    if v is None or upto_abs < 0:
        return ident, system
    q = max(-v - 1, 0)
    if q == 0:
        return ident, system
    d0 = system.matrix_at(-(q + 1))
    values = [d0[i, i] for i in range(n)]
    coarse = _diag_groups([FieldPolynomial.constant(c) for c in values])
    if len(coarse) == 1:
        # single constant head: strip it and recurse on the lower-rank rest
        shift = values[0]
        rows = [
            [
                jet - LaurentJet.monomial(shift, -(q + 1))
                if i == j
                else jet
                for j, jet in enumerate(row)
            ]
            for i, row in enumerate(system.entries)
        ]
        shifted = SystemJet(field, rows, system.order)
        p, _ = _block_split_gauge(shifted, upto_abs)
        b = gauge_transform(system, polynomial_step(p)) if not _is_poly_identity(p) else system
        return p, b
    # permutation grouping equal constants contiguously
    order_idx = [i for grp in coarse for i in grp]
    perm = _permutation_matrix(order_idx, field)
    permuted = gauge_transform(system, constant_step(perm))
    sizes = [len(g) for g in coarse]
    offsets = [0]
    for s in sizes:
        offsets.append(offsets[-1] + s)
    blocks = [d0[i, i] for i in order_idx]
    cur = permuted
    payload = _poly_identity(n, field)
    for d in range(0, int(upto_abs) + 1):
        w = cur.matrix_at(d)
        t = [[zero_of(field)] * n for _ in range(n)]
        touched = False
        for bu in range(len(sizes)):
            for bv in range(len(sizes)):
                if bu == bv:
                    continue
                au = blocks[offsets[bu]]
                av = blocks[offsets[bv]]
                denom = au - av
                for i in range(offsets[bu], offsets[bu + 1]):
                    for j in range(offsets[bv], offsets[bv + 1]):
                        c = w[i, j]
                        if not c.is_zero():
                            t[i][j] = -c / denom
                            touched = True
        if touched:
            # the new contribution of I + x^s T at coefficient s is [D(0), T],
            # so killing absolute degree d needs s = q + 1 + d
            factor = _poly_identity(n, field) + _poly_of_matrix(Matrix(t), q + 1 + d)
            cur = gauge_transform(cur, polynomial_step(factor))
            payload = payload * factor
    # recurse inside each coarse block with its constant removed
    for bu in range(len(sizes)):
        rng = range(offsets[bu], offsets[bu + 1])
        sub = cur.block(rng)
        shift = blocks[offsets[bu]]
        rows = [
            [
                jet - LaurentJet.monomial(shift, -(q + 1)) if i == j else jet
                for j, jet in enumerate(row)
            ]
            for i, row in enumerate(sub.entries)
        ]
        shifted = SystemJet(field, rows, sub.order)
        if shifted.is_zero():
            continue
        p_sub, _ = _block_split_gauge(shifted, upto_abs)
        if _is_poly_identity(p_sub):
            continue
        embedded = _embed_poly(p_sub, offsets[bu], n, field)
        cur = gauge_transform(cur, polynomial_step(embedded))
        payload = payload * embedded
    # undo the permutation: total = perm * payload * perm^{-1}
    perm_poly = perm.map(lambda c: FieldPolynomial.constant(c))
    perm_inv_poly = perm.transpose().map(lambda c: FieldPolynomial.constant(c))
    total = perm_poly * payload * perm_inv_poly
    b = gauge_transform(system, polynomial_step(total)) if not _is_poly_identity(total) else system
    return total, b


def _is_poly_identity(p):
    n = p.nrows
    for i in range(n):
        for j in range(n):
            entry = p[i, j]
            if i == j:
                if entry.degree != 0 or not (entry.coefficient(0) == 1):
                    return False
            elif not entry.is_zero():
                return False
    return True


def _permutation_matrix(order_idx, field):
    n = len(order_idx)
    rows = [[zero_of(field)] * n for _ in range(n)]
    # column j of the permutation sends basis vector e_{order_idx[j]} first
    for new_pos, old in enumerate(order_idx):
        rows[old][new_pos] = one_of(field)
    return Matrix(rows)


def _embed_poly(p, offset, total, field):
    ident = _poly_identity(total, field)
    rows = [list(r) for r in ident.rows]
    for i in range(p.nrows):
        for j in range(p.ncols):
            rows[offset + i][offset + j] = p[i, j]
    return Matrix(rows)


def eliminate_tail(a, mu):
    """Theorem-(ii): kill the tail through degree mu by one regular
    polynomial gauge P with P(0) = I and degree <= q + mu.

    Uses all coefficients the input can certify (beyond the stated minimum
    q + mu) so that longer runs agree: J_{q+mu} P^{mu'} = J_{q+mu} P^{mu}.
    """
    nf = carve_normal_form(a)
    q = nf.rank
    _, m_value = factor_resonance_classes(nf.residual_matrix)
    if m_value > 0:
        raise ResonantResidualError(
            f"residual matrix is resonant (m = {m_value})"
        )
    if a.relative_order < q + mu:
        raise PrecisionError(
            "tail elimination needs more coefficients",
            required=q + mu,
            available=a.relative_order,
        )
    if a.order == ORDER_INF:
        a = a.restrict_relative(2 * q + mu)
    field = a.field
    n = a.n
    mu_ext = min(q + mu, int(a.relative_order - q))
    upto_abs = mu_ext - 1
    p1, cur = _block_split_gauge(a, upto_abs)
    groups = _diag_groups(nf.exponential_part)
    payload = p1
    for d in range(0, upto_abs + 1):
        w = cur.matrix_at(d)
        touched = False
        t = [[zero_of(field)] * n for _ in range(n)]
        for grp in groups:
            wg = w.submatrix(grp, grp)
            if wg.is_zero():
                continue
            cg = nf.residual_matrix.submatrix(grp, grp)
            shift = Matrix.identity(len(grp), field).scaled(
                FieldElement.of(d + 1, field)
            )
            x = sylvester_solve(cg, cg + shift, -wg)
            touched = True
            for ii, gi in enumerate(grp):
                for jj, gj in enumerate(grp):
                    t[gi][gj] = x[ii, jj]
        if touched:
            factor = _poly_identity(n, field) + _poly_of_matrix(Matrix(t), d + 1)
            cur = gauge_transform(cur, polynomial_step(factor))
            payload = payload * factor
    payload = payload.map(lambda p: _poly_truncate(p, q + mu))
    step = polynomial_step(payload)
    b = gauge_transform(a, step)
    return step, b


# -- deresonation ------------------------------------------------------------------


def factor_resonance_classes(matrix):
    """Integer-difference structure of the spectrum at the level of
    irreducible characteristic factors (no root extraction).

    Two factors are related iff one is an integer shift of the other:
    p2(x) = p1(x - k) pairs every root of p1 with a root of p2 at offset k.
    Returns (classes, m): classes is a list of lists of (factor, offset,
    multiplicity) sorted by descending offset; m is the resonance measure
    sum over classes of degree * (max offset - min offset).
    """
    chi = charpoly(matrix)
    classes = []  # list of [(factor, offset int, mult)]
    for f, mult in factor_poly(chi):
        d = f.degree
        placed = False
        for cls in classes:
            base = cls[0][0]
            if base.degree != d:
                continue
            rel = (base.coefficient(d - 1) - f.coefficient(d - 1)) / FieldElement.of(
                d, f.field
            )
            if not rel.is_rational():
                continue
            rel_q = rel.rational_value()
            if rel_q.denominator != 1:
                continue
            k = int(rel_q.numerator)
            shift = FieldPolynomial.from_scalars([-k, 1], f.field)
            if base.compose(shift) == f:
                cls.append((f, k, mult))
                placed = True
                break
        if not placed:
            classes.append([(f, 0, mult)])
    m_value = 0
    out = []
    for cls in classes:
        cls.sort(key=lambda item: -item[1])
        if len(cls) > 1:
            m_value += cls[0][0].degree * (cls[0][1] - cls[-1][1])
        out.append(cls)
    out.sort(key=lambda cls: cls[0][0].key())
    return out, m_value


def _factor_multiplicity(chi, factor):
    mult = 0
    while True:
        quo, rem = divmod(chi, factor)
        if not rem.is_zero():
            return mult, chi
        mult += 1
        chi = quo


def deresonate(a, trace=None):
    """Theorem-(iii): lower the resonance measure m(C) to zero, one unit per
    round, preserving the exponential part.  Each round is one constant
    regular step (eigen-block split, block-diagonal with respect to the
    exponential structure) followed by one diagonal monomial step
    x I_t (+) I_{n-t} supported on the spectral block of the leading
    eigenvalue of the first resonant class.
    """
    nf = carve_normal_form(a)
    q = nf.rank
    field = a.field
    _, m_total = factor_resonance_classes(nf.residual_matrix)
    if m_total == 0:
        return TransformChain(), a
    if a.relative_order < q + 2 * m_total:
        raise PrecisionError(
            "deresonation needs q + 2m coefficients",
            required=q + 2 * m_total,
            available=a.relative_order,
        )
    if a.order == ORDER_INF:
        a = a.restrict_relative(q + 2 * m_total)
    steps = []
    cur = a
    groups = _diag_groups(nf.exponential_part)
    if len(groups) > 1:
        p_split, cur = _block_split_gauge(a, m_total - 1)
        p_split = p_split.map(lambda p: _poly_truncate(p, q + m_total))
        step = polynomial_step(p_split)
        cur = gauge_transform(a, step)
        steps.append(step)
    rounds = 0
    while True:
        residual = cur.matrix_at(-1)
        field = cur.field
        classes, m_now = factor_resonance_classes(residual)
        if m_now == 0:
            break
        target_class = next(cls for cls in classes if len(cls) > 1)
        top_factor = target_class[0][0]
        # per-exponential-group constant split: the top-offset spectral block
        # comes first inside its group, then the rest
        groups = _diag_groups(carve_normal_form(cur).exponential_part)
        conj = Matrix.identity(cur.n, field)
        exps = [0] * cur.n
        for grp in groups:
            cg = residual.submatrix(grp, grp)
            chi_g = charpoly(cg)
            mult, rest = _factor_multiplicity(chi_g, top_factor)
            if mult == 0:
                continue
            top_part = top_factor**mult
            if rest.degree >= 1:
                t_g, blocks = split_by_factors(cg, [top_part, rest])
                t_size = blocks[0].nrows
            else:
                t_g = Matrix.identity(len(grp), field)
                t_size = len(grp)
            conj_rows = [list(r) for r in conj.rows]
            for ii, gi in enumerate(grp):
                for jj, gj in enumerate(grp):
                    conj_rows[gi][gj] = t_g[ii, jj]
            conj = Matrix(conj_rows)
            for idx in grp[:t_size]:
                exps[idx] = 1
        step_c = constant_step(conj)
        cur = gauge_transform(cur, step_c)
        steps.append(step_c)
        step_m = monomial_step(exps)
        cur = gauge_transform(cur, step_m)
        steps.append(step_m)
        rounds += 1
        if trace is not None:
            trace.append({"event": "deresonation-round", "m": m_now})
        if rounds > 2 * m_total + 1:
            raise TurrittinError("deresonation failed to descend")
    return TransformChain(steps), cur


# -- formal normal form ----------------------------------------------------------


def formal_normal_form(a, precision):
    """Full pipeline: rank-0 reduction, deresonation, tail elimination.

    Returns (chain, q_payload, nf, solution_text): chain the polynomial and
    monomial steps with a single leading ramification, q_payload the regular
    formal gauge J_{q~+precision}(P) with P(0) = I, nf the zero-tail normal
    form, and a structural rendering of a fundamental matrix of formal
    solutions.
    """
    inv = system_invariants(a)
    n_det = inv.determinacy_order
    chain0, nf0 = trs_rank0(a)
    _, m_est = factor_resonance_classes(nf0.residual_matrix)
    margin = 2 * m_est + nf0.rank + precision + 1
    if a.relative_order != ORDER_INF and a.relative_order < n_det + margin:
        raise PrecisionError(
            "formal normal form needs more coefficients",
            required=n_det + margin,
            available=a.relative_order,
        )
    work = a.restrict_relative(min(a.relative_order, n_det + margin))
    chain0, nf0 = trs_rank0(work)
    sys0 = nf0.reduced_system
    chain1, sys1 = deresonate(sys0)
    step_q, sys2 = eliminate_tail(sys1, precision)
    chain = chain0 + chain1
    nf = carve_normal_form(
        sys2, ramification=chain.ramification_index(), degree=precision,
        zero_tail=True,
    )
    return chain, step_q, nf, render_formal_solution(nf)


def render_formal_solution(nf):
    """Structural rendering of P(x^{1/r}) exp(int D/x^{q+1}) x^{C/r}."""
    from .text import render_polynomial, render_scalar

    r = nf.ramification
    q = nf.rank
    lines = []
    arg = "x" if r == 1 else f"x^(1/{r})"
    lines.append(f"Z(x) = P({arg}) * E({arg}) * {arg}^C")
    if q == 0:
        lines.append("E(t) = I")
    else:
        entries = []
        for p in nf.exponential_part:
            terms = []
            for j, c in enumerate(p.coeffs):
                if c.is_zero():
                    continue
                power = j - q  # antiderivative exponent of t^{j-q-1}
                coeff = c / FieldElement.of(power, c.field)
                ctxt = render_scalar(coeff)
                if "+" in ctxt[1:] or "-" in ctxt[1:]:
                    ctxt = f"({ctxt})"
                terms.append(f"{ctxt}*t^{power}")
            entries.append("exp(" + (" + ".join(terms) if terms else "0") + ")")
        lines.append("E(t) = diag(" + ", ".join(entries) + ")")
    c_rows = "; ".join(
        ", ".join(render_scalar(nf.residual_matrix[i, j]) for j in range(nf.residual_matrix.ncols))
        for i in range(nf.residual_matrix.nrows)
    )
    lines.append(f"C = [{c_rows}]")
    return "\n".join(lines)
