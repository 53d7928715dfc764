"""Real reduction pipeline: all transformations carry entries in the real
tower, outputs are in real Turrittin-Ramis-Sibuya form D1 (+) D2 +
x^q (C1 (+) C2) with D1, C1 real and D2, C2 complex 2x2-block matrices.

Case dispatch follows the real rank-0 proof: trivial radial head via the
real canonical form; several non-conjugate spectral parts via real
splitting; a lone conjugate pair via complex-structure propagation,
extraction, the complex pipeline, and Theta-pushed payloads; a lone real
eigenvalue via real shearing.  A final constant signed-permutation step
puts the output into the canonical layout (real blocks first, complex
pairs sign-normalized and sorted).
"""

from .constmat import (
    c_completion,
    is_c_matrix,
    matrix_spectrum,
    quadratic_roots,
    real_canonical_form,
    resonance_data,
    split_by_factors,
    sylvester_solve,
    theta_embed,
    theta_extract,
    theta_extract_system,
    theta_scalar,
)
from .errors import (
    PrecisionError,
    ResonantResidualError,
    SpectrumMismatchError,
    TurrittinError,
    UnsupportedTowerError,
    WrongSpectrumError,
)
from .factor import factor_poly
from .field import FieldElement, complex_pair, join, one_of, zero_of
from .jets import LaurentJet, ORDER_INF
from .matrix import Matrix, charpoly, commutator, direct_sum
from .poly import FieldPolynomial, poly_gcd
from .rationals import QQ
from .reduce_complex import (
    _block_split_gauge,
    _diag_groups,
    _embed_step,
    _poly_identity,
    _poly_of_matrix,
    _poly_truncate,
    shear,
    shearing_order,
    specialize_coefficients,
    splitting_lemma,
    trs_rank0,
)
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
from .constmat import jordan_single_eigen, gamma_invariants, coprime_split


class RealNormalForm:
    """An (RTRS) certificate over the real tower."""

    __slots__ = (
        "rank",
        "degree",
        "ramification",
        "n1",
        "n2",
        "real_exponentials",
        "complex_exponentials",
        "c1",
        "c2",
        "principal_part",
        "tail",
        "reduced_system",
        "field",
    )

    def __init__(self, **kw):
        for name in self.__slots__:
            object.__setattr__(self, name, kw[name])

    def __setattr__(self, *args):
        raise AttributeError("RealNormalForm is immutable")

    @property
    def exponential_part(self):
        """All diagonal data: real entries then underlying complex entries."""
        return tuple(self.real_exponentials) + tuple(self.complex_exponentials)

    def __repr__(self):
        return (
            f"<real-normal-form q~={self.rank} mu={self.degree} "
            f"r={self.ramification} n1={self.n1} n2={self.n2}>"
        )


def _scan_units(system, rank):
    """Split coordinates into units: ('real', [i]) or ('pair', [i, i+1]).

    A pair is a 2x2 Lambda block in the exponential region with non-real
    content somewhere (real-content Lambda blocks are diagonal and fall
    into singles).  Raises TurrittinError when the jet has neither shape.
    """
    n = system.n
    d_mats = [system.matrix_at(t - rank - 1) for t in range(rank)]
    units = []
    i = 0
    while i < n:
        clean = all(
            m[i, j].is_zero() and m[j, i].is_zero()
            for m in d_mats
            for j in range(n)
            if j != i
        )
        if clean:
            units.append(("real", [i]))
            i += 1
            continue
        if i + 1 >= n:
            raise TurrittinError(f"coordinate {i} has no real/pair unit shape")
        nonreal = False
        for m in d_mats:
            a, nb = m[i, i], m[i, i + 1]
            b, a2 = m[i + 1, i], m[i + 1, i + 1]
            if a != a2 or nb != -b:
                raise TurrittinError(f"exponential block at ({i},{i+1}) not Lambda-shaped")
            for j in range(n):
                if j not in (i, i + 1) and not (
                    m[i, j].is_zero()
                    and m[j, i].is_zero()
                    and m[i + 1, j].is_zero()
                    and m[j, i + 1].is_zero()
                ):
                    raise TurrittinError(f"pair ({i},{i+1}) couples outside itself")
            if not b.is_zero():
                nonreal = True
        if not nonreal:
            raise TurrittinError(f"pair ({i},{i+1}) carries real content only")
        units.append(("pair", [i, i + 1]))
        i += 2
    return units, d_mats


def _unit_poly(system, rank, unit):
    """The unit's exponential data: a real polynomial for singles, the
    underlying complex polynomial for pairs."""
    kind, idx = unit
    field = system.field
    if kind == "real":
        coeffs = [system.matrix_at(t - rank - 1)[idx[0], idx[0]] for t in range(rank)]
        return FieldPolynomial(field, coeffs)
    i = idx[0]
    cfield = field.complexification()
    coeffs = []
    for t in range(rank):
        m = system.matrix_at(t - rank - 1)
        coeffs.append(complex_pair(m[i, i], m[i + 1, i]))
    return FieldPolynomial(cfield, coeffs)


def carve_real_normal_form(system, ramification=1, degree=0, zero_tail=False):
    field = system.field
    n = system.n
    v = system.valuation()
    rank = 0 if v is None else max(-v - 1, 0)
    units, d_mats = _scan_units(system, rank)
    # canonical layout: all real units before all pairs
    seen_pair = False
    for kind, _ in units:
        if kind == "pair":
            seen_pair = True
        elif seen_pair:
            raise TurrittinError("real unit after a complex pair; not in canonical layout")
    residual = system.matrix_at(-1)
    n1 = sum(1 for kind, _ in units if kind == "real")
    n2 = (n - n1) // 2
    real_polys = [
        _unit_poly(system, rank, u) for u in units if u[0] == "real"
    ]
    pair_polys = [
        _unit_poly(system, rank, u) for u in units if u[0] == "pair"
    ]
    for g in pair_polys:
        if g.is_real():
            raise TurrittinError("complex exponential entry has real content only")
    c1 = residual.submatrix(range(n1), range(n1)) if n1 else None
    c2 = residual.submatrix(range(n1, n), range(n1, n)) if n1 < n else None
    for i in range(n1):
        for j in range(n1, n):
            if not (residual[i, j].is_zero() and residual[j, i].is_zero()):
                raise TurrittinError("residual couples the real and complex parts")
    if c2 is not None and not is_c_matrix(c2):
        raise TurrittinError("complex residual block fails the C-matrix test")
    for t, m in enumerate(d_mats):
        if not commutator(m, residual).is_zero():
            raise TurrittinError("exponential part does not commute with the residual")
    dmats_principal = d_mats + [residual]
    principal = SystemJet.from_coefficients(field, -(rank + 1), dmats_principal)
    if zero_tail:
        tail = SystemJet.zero(field, n)
        reduced = principal
    else:
        reduced = system
        rows = [
            [x - y for x, y in zip(ra, rb)]
            for ra, rb in zip(system.entries, principal.entries)
        ]
        tail = SystemJet(field, rows, system.order)
    return RealNormalForm(
        rank=rank,
        degree=degree,
        ramification=ramification,
        n1=n1,
        n2=n2,
        real_exponentials=tuple(real_polys),
        complex_exponentials=tuple(pair_polys),
        c1=c1,
        c2=c2,
        principal_part=principal,
        tail=tail,
        reduced_system=reduced,
        field=field,
    )


def is_rtrs_form(system, rank, degree):
    try:
        nf = carve_real_normal_form(system)
    except TurrittinError:
        return False
    if nf.rank != rank:
        return False
    for d in range(0, degree):
        if not system.matrix_at(d).is_zero():
            return False
    return True


# -- Theta on steps -----------------------------------------------------------


def _theta_poly_matrix(pmat):
    """Entrywise 2x2 embedding of a complex polynomial matrix."""
    field = pmat[0, 0].field.real_subfield()
    m = pmat.nrows
    rows = [[None] * (2 * m) for _ in range(2 * m)]
    for i in range(m):
        for j in range(m):
            p = pmat[i, j]
            pr = FieldPolynomial(field, [c.real_part() for c in p.coeffs])
            pi = FieldPolynomial(field, [c.imag_part() for c in p.coeffs])
            rows[2 * i][2 * j] = pr
            rows[2 * i][2 * j + 1] = -pi
            rows[2 * i + 1][2 * j] = pi
            rows[2 * i + 1][2 * j + 1] = pr
    return Matrix(rows)


def theta_push_step(step):
    """Real image of a complex gauge/ramification step (eq. Theta o Psi)."""
    if step.kind == "ramification":
        return step
    if step.kind == "diagonal-monomial":
        exps = []
        for e in step.payload:
            exps.extend([e, e])
        return monomial_step(exps)
    if step.kind == "constant-regular":
        return constant_step(theta_embed(step.payload))
    return polynomial_step(_theta_poly_matrix(step.payload))


# -- complex-structure propagation ---------------------------------------------


def _lambda_head_shape(ak):
    """Decompose a real canonical head Lambda + H; returns (lam, eps) with
    lam the 2x2 Lambda block and eps the superdiagonal 0/1 couplings, or
    None when ak is not of that shape."""
    n = ak.nrows
    if n % 2:
        return None
    m = n // 2
    lam = ak.submatrix(range(2), range(2))
    field = ak[0, 0].field
    ident = Matrix.identity(2, field)
    zero = Matrix.zero(2, 2, field)
    eps = []
    for u in range(m):
        for w in range(m):
            blk = ak.submatrix(range(2 * u, 2 * u + 2), range(2 * w, 2 * w + 2))
            if w == u:
                if blk != lam:
                    return None
            elif w == u + 1:
                if blk == ident:
                    eps.append(1)
                elif blk.is_zero():
                    eps.append(0)
                else:
                    return None
            elif not blk.is_zero():
                return None
    return lam, eps


def propagate_c_structure(a, mu):
    """Make every coefficient through order mu a C-matrix by a real regular
    gauge (the key real proposition).  Returns (steps, b): the constant
    canonical-form move (when needed) and the polynomial move with
    P(0) = I, plus the transformed system."""
    inv = system_invariants(a)
    q, k = inv.poincare_rank, inv.radiality_index
    if not k < q:
        raise WrongSpectrumError("complex-structure propagation needs k < q")
    if a.relative_order < mu:
        raise PrecisionError(
            "complex-structure propagation needs more coefficients",
            required=mu,
            available=a.relative_order,
        )
    ak = a.coefficient(k)
    chi = charpoly(ak)
    factors = factor_poly(chi)
    if len(factors) != 1 or factors[0][0].degree != 2:
        raise WrongSpectrumError(
            "leading coefficient must carry a single conjugate eigenvalue pair"
        )
    steps = []
    shape = _lambda_head_shape(ak)
    if shape is None:
        t0, c0, n1 = real_canonical_form(ak)
        if n1 != 0:
            raise WrongSpectrumError("conjugate-pair head has real spectrum")
        step0 = constant_step(t0)
        steps.append(step0)
        a = gauge_transform(a, step0)
        ak = a.coefficient(k)
        shape = _lambda_head_shape(ak)
        if shape is None:
            raise WrongSpectrumError("real canonical form did not produce Lambda + H")
    lam, eps = shape
    lam_c = theta_extract(lam)[0, 0]
    if lam_c.imag_part().is_zero():
        raise WrongSpectrumError("head eigenvalue pair is real")
    field = a.field
    n = a.n
    m = n // 2
    cur = a
    payload = _poly_identity(n, field)
    for j in range(1, int(mu) - k + 1):
        w = cur.coefficient(k + j)
        if is_c_matrix(w):
            continue
        tj = [[None] * m for _ in range(m)]
        zero2 = Matrix.zero(2, 2, field)
        for vcol in range(m):
            for u in range(m - 1, -1, -1):
                s_blk = w.submatrix(
                    range(2 * u, 2 * u + 2), range(2 * vcol, 2 * vcol + 2)
                )
                if u < m - 1 and eps[u]:
                    s_blk = s_blk + tj[u + 1][vcol]
                if vcol >= 1 and eps[vcol - 1]:
                    s_blk = s_blk - tj[u][vcol - 1]
                tj[u][vcol] = c_completion(lam, s_blk)
        t_full = Matrix.from_blocks(tj)
        factor = _poly_identity(n, field) + _poly_of_matrix(t_full, j)
        cur = gauge_transform(cur, polynomial_step(factor))
        payload = payload * factor
    payload = payload.map(lambda p: _poly_truncate(p, int(mu) - k))
    step = polynomial_step(payload)
    b = gauge_transform(a, step)
    steps.append(step)
    return steps, b


# -- the real rank-0 reduction ---------------------------------------------------


def _reduce0_real(a, trace):
    if a.is_zero():
        return []
    inv = system_invariants(a)
    q, k = inv.poincare_rank, inv.radiality_index
    n = a.n
    if q == 0 or k == q:
        # trivial case: real canonical form of the significant coefficient
        try:
            aq = a.coefficient(q)
            t0, _, _ = real_canonical_form(aq)
        except UnsupportedTowerError:
            return []
        ident = Matrix.identity(n, a.field)
        if t0.map(lambda c: c.coerce(t0[0, 0].field)) == ident.map(
            lambda c: c.coerce(t0[0, 0].field)
        ):
            return []
        return [constant_step(t0)]
    if a.relative_order < inv.determinacy_order:
        raise PrecisionError(
            "rank-0 reduction needs the determinacy-order truncation",
            required=inv.determinacy_order,
            available=a.relative_order,
        )
    ak = a.coefficient(k)
    factors = factor_poly(charpoly(ak))
    if len(factors) > 1:
        p1 = factors[0][0] ** factors[0][1]
        p2 = FieldPolynomial.from_scalars([1], a.field)
        for f, mult in factors[1:]:
            p2 = p2 * f**mult
        t0, m1, m2 = coprime_split(ak, p1, p2)
        n1 = m1.nrows
        if trace is not None:
            trace.append({"event": "split", "n": n, "sizes": (n1, n - n1)})
        step_t, b = splitting_lemma(a, t0, (n1, n - n1), inv.determinacy_order)
        steps = [constant_step(t0), step_t]
        sub1 = normalize_chain(TransformChain(_reduce0_real(b.block(range(n1)), trace)))
        sub2 = normalize_chain(TransformChain(_reduce0_real(b.block(range(n1, n)), trace)))
        r1, r2 = sub1.ramification_index(), sub2.ramification_index()
        if r1 * r2 > 1:
            steps.append(ramification_step(r1 * r2))
        for g in sub1:
            if g.kind != "ramification":
                steps.append(_embed_step(push_through_ramification(g, r2), 0, n))
        for g in sub2:
            if g.kind != "ramification":
                steps.append(_embed_step(push_through_ramification(g, r1), n1, n))
        return steps
    factor, _ = factors[0]
    if factor.degree == 1:
        # Case 2: single real eigenvalue; real shearing loop
        lam = -factor.coefficient(0)
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
        return steps + _reduce0_real(a, trace)
    if factor.degree != 2:
        raise UnsupportedTowerError(
            f"irreducible spectral factor of degree {factor.degree}"
        )
    # Case 1: a single conjugate pair; go complex through Theta
    if trace is not None:
        trace.append({"event": "conjugate-pair", "n": n})
    n_det = inv.determinacy_order
    steps, b = propagate_c_structure(a, n_det)
    extracted = theta_extract_system(b.truncate(n_det))
    chain_c, _ = trs_rank0(extracted)
    for st in chain_c:
        steps.append(theta_push_step(st))
    return steps


def _canonical_layout_step(system):
    """Constant signed permutation: complex pairs sign-normalized (leading
    imaginary coefficient positive) and units sorted with real blocks first;
    None when the system is already canonical."""
    v = system.valuation()
    if v is None:
        return None
    rank = max(-v - 1, 0)
    if rank == 0:
        return None
    units, _ = _scan_units(system, rank)
    field = system.field
    keyed = []
    flips = {}
    for pos, unit in enumerate(units):
        poly = _unit_poly(system, rank, unit)
        if unit[0] == "pair":
            imag_sign = 0
            for c in poly.coeffs:
                im = c.imag_part()
                if not im.is_zero():
                    imag_sign = im.sign()
                    break
            if imag_sign < 0:
                flips[pos] = True
                poly = poly.conjugate()
            keyed.append((1, poly.key(), pos, unit))
        else:
            keyed.append((0, poly.key(), pos, unit))
    keyed.sort(key=lambda item: (item[0], item[1], item[2]))
    new_cols = []
    for _, _, pos, unit in keyed:
        idx = unit[1]
        if unit[0] == "pair" and flips.get(pos):
            new_cols.append((idx[0], 1))
            new_cols.append((idx[1], -1))
        else:
            for i in idx:
                new_cols.append((i, 1))
    n = system.n
    if all(col == (j, 1) for j, col in enumerate(new_cols)):
        return None
    rows = [[zero_of(field)] * n for _ in range(n)]
    for new_pos, (old, sign) in enumerate(new_cols):
        rows[old][new_pos] = FieldElement.of(sign, field)
    return constant_step(Matrix(rows))


def rtrs_rank0(a, trace=None):
    """Real theorem-(i) reduction: all payloads real, output in canonical
    (RTRS) layout of degree 0."""
    if a.field.kind == "complexified":
        raise UnsupportedTowerError("the real pipeline needs a real base field")
    if a.is_zero():
        chain = TransformChain()
        return chain, carve_real_normal_form(a)
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
    steps = _reduce0_real(a, trace)
    chain = normalize_chain(TransformChain(steps))
    reduced = replay(a, chain)
    canon = _canonical_layout_step(reduced)
    if canon is not None:
        chain = chain + [canon]
        reduced = gauge_transform(reduced, canon)
    nf = carve_real_normal_form(reduced, ramification=chain.ramification_index())
    return chain, nf


# -- real tail elimination ----------------------------------------------------------


def _unit_groups(system, rank):
    """Finer structure: units grouped by equal exponential data.

    Returns a list of (kind, [unit indices lists], poly)."""
    units, _ = _scan_units(system, rank)
    groups = []
    seen = {}
    for unit in units:
        poly = _unit_poly(system, rank, unit)
        key = (unit[0], poly.key())
        if key in seen:
            groups[seen[key]][1].append(unit[1])
        else:
            seen[key] = len(groups)
            groups.append((unit[0], [unit[1]], poly))
    return groups


def _real_block_split_gauge(system, upto_abs):
    """Real analogue of the finer-block splitting: returns (p, b) with
    P(0) = I killing every cross-unit-group entry at absolute degrees
    <= upto_abs; inside complex-radial groups the coefficients through
    upto_abs are additionally made C-matrices."""
    field = system.field
    n = system.n
    ident = _poly_identity(n, field)
    v = system.valuation()
    if v is None or upto_abs < 0:
        return ident, system
    q = max(-v - 1, 0)
    if q == 0:
        return ident, system
    units, _ = _scan_units(system, rank=q)
    d0 = system.matrix_at(-(q + 1))
    # coarse groups by the leading unit value: real scalar a or pair a+bi
    coarse = []
    seen = {}
    for unit in units:
        i = unit[1][0]
        if unit[0] == "real":
            key = ("real", d0[i, i].key())
        else:
            val = complex_pair(d0[i, i], d0[i + 1, i])
            if val.imag_part().is_zero():
                key = ("real", val.real_part().key())
            else:
                key = ("pair", val.key())
        if key in seen:
            coarse[seen[key]][1].append(unit)
        else:
            seen[key] = len(coarse)
            coarse.append((key, [unit]))
    if len(coarse) == 1:
        key, members = coarse[0]
        if key[0] == "real":
            a_val = d0[members[0][1][0], members[0][1][0]]
            rows = [
                [
                    jet - LaurentJet.monomial(a_val, -(q + 1)) if i == j else jet
                    for j, jet in enumerate(row)
                ]
                for i, row in enumerate(system.entries)
            ]
            shifted = SystemJet(field, rows, system.order)
            if shifted.is_zero():
                return ident, system
            p, _ = _real_block_split_gauge(shifted, upto_abs)
            if _poly_is_identity(p):
                return ident, system
            b = gauge_transform(system, polynomial_step(p))
            return p, b
        # complex-radial coarse group: propagate C-structure, extract, recurse
        steps, b = propagate_c_structure(system, q + 1 + int(upto_abs))
        payload = ident
        for st in steps:
            if st.kind == "constant-regular":
                raise TurrittinError(
                    "complex-radial block was not in canonical Lambda form"
                )
            payload = payload * st.payload
        extracted = theta_extract_system(b.restrict_relative(q + 1 + int(upto_abs)))
        p_c, _ = _block_split_gauge(extracted, upto_abs)
        payload = payload * _theta_poly_matrix(p_c)
        payload = payload.map(lambda f: _poly_truncate(f, q + 1 + int(upto_abs)))
        if _poly_is_identity(payload):
            return ident, system
        b = gauge_transform(system, polynomial_step(payload))
        return payload, b
    # several coarse groups: permutation, cross-kill, recurse per group
    order_idx = []
    for _, members in coarse:
        for unit in members:
            order_idx.extend(unit[1])
    perm = _permutation(order_idx, field)
    permuted = gauge_transform(system, constant_step(perm))
    sizes = [sum(len(u[1]) for u in members) for _, members in coarse]
    offsets = [0]
    for s in sizes:
        offsets.append(offsets[-1] + s)
    d0p = permuted.matrix_at(-(q + 1))
    blocks = [
        d0p.submatrix(range(offsets[t], offsets[t + 1]), range(offsets[t], offsets[t + 1]))
        for t in range(len(sizes))
    ]
    cur = permuted
    payload = ident
    for d in range(0, int(upto_abs) + 1):
        w = cur.matrix_at(d)
        t = [[zero_of(field)] * n for _ in range(n)]
        touched = False
        for bu in range(len(sizes)):
            for bv in range(len(sizes)):
                if bu == bv:
                    continue
                wb = w.submatrix(
                    range(offsets[bu], offsets[bu + 1]),
                    range(offsets[bv], offsets[bv + 1]),
                )
                if wb.is_zero():
                    continue
                x = sylvester_solve(blocks[bu], blocks[bv], -wb)
                touched = True
                for ii in range(x.nrows):
                    for jj in range(x.ncols):
                        t[offsets[bu] + ii][offsets[bv] + jj] = x[ii, jj]
        if touched:
            factor = _poly_identity(n, field) + _poly_of_matrix(Matrix(t), q + 1 + d)
            cur = gauge_transform(cur, polynomial_step(factor))
            payload = payload * factor
    for bu in range(len(sizes)):
        rng = list(range(offsets[bu], offsets[bu + 1]))
        sub = cur.block(rng)
        p_sub, _ = _real_block_split_gauge_sub(sub, coarse[bu][0], upto_abs)
        if p_sub is None or _poly_is_identity(p_sub):
            continue
        embedded = _embed_poly_at(p_sub, rng, n, field)
        cur = gauge_transform(cur, polynomial_step(embedded))
        payload = payload * embedded
    perm_poly = perm.map(lambda c: FieldPolynomial.constant(c))
    perm_inv = perm.transpose().map(lambda c: FieldPolynomial.constant(c))
    total = perm_poly * payload * perm_inv
    if _poly_is_identity(total):
        return ident, system
    b = gauge_transform(system, polynomial_step(total))
    return total, b


def _real_block_split_gauge_sub(sub, key, upto_abs):
    """Recursion helper: within a coarse group, strip the real scalar head
    (it commutes with everything) or hand a complex-radial block to the
    single-group path."""
    field = sub.field
    v = sub.valuation()
    if v is None:
        return None, sub
    q = max(-v - 1, 0)
    if key[0] == "real":
        d0 = sub.matrix_at(-(q + 1))
        a_val = d0[0, 0]
        rows = [
            [
                jet - LaurentJet.monomial(a_val, -(q + 1)) if i == j else jet
                for j, jet in enumerate(row)
            ]
            for i, row in enumerate(sub.entries)
        ]
        shifted = SystemJet(field, rows, sub.order)
        if shifted.is_zero():
            return None, sub
        return _real_block_split_gauge(shifted, upto_abs)
    return _real_block_split_gauge(sub, upto_abs)


def _poly_is_identity(p):
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


def _permutation(order_idx, field):
    n = len(order_idx)
    rows = [[zero_of(field)] * n for _ in range(n)]
    for new_pos, old in enumerate(order_idx):
        rows[old][new_pos] = one_of(field)
    return Matrix(rows)


def _embed_poly_at(p, indices, total, field):
    ident = _poly_identity(total, field)
    rows = [list(r) for r in ident.rows]
    for ii, gi in enumerate(indices):
        for jj, gj in enumerate(indices):
            rows[gi][gj] = p[ii, jj]
    return Matrix(rows)


def _is_nonresonant_real(nf):
    """Both C1 and the extracted complex residual must be non-resonant."""
    if nf.c1 is not None and nf.c1.nrows:
        if resonance_data(nf.c1).is_resonant:
            return False
    if nf.c2 is not None and nf.c2.nrows:
        g2 = theta_extract(nf.c2)
        if resonance_data(g2).is_resonant:
            return False
    return True


def real_eliminate_tail(a, mu):
    """Real theorem-(ii): one regular polynomial real gauge with P(0) = I
    killing the tail through degree mu, principal part unchanged."""
    nf = carve_real_normal_form(a)
    q = nf.rank
    if not _is_nonresonant_real(nf):
        raise ResonantResidualError("residual matrix is resonant")
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
    p1, cur = _real_block_split_gauge(a, upto_abs)
    payload = p1
    groups = _unit_groups(a, q)
    for d in range(0, upto_abs + 1):
        w = cur.matrix_at(d)
        t = [[zero_of(field)] * n for _ in range(n)]
        touched = False
        for kind, unit_lists, _ in groups:
            idx = [i for unit in unit_lists for i in unit]
            wg = w.submatrix(idx, idx)
            if wg.is_zero():
                continue
            cg = cur.matrix_at(-1).submatrix(idx, idx)
            if kind == "real":
                shift = Matrix.identity(len(idx), field).scaled(
                    FieldElement.of(d + 1, field)
                )
                x = sylvester_solve(cg, cg + shift, -wg)
            else:
                # complex-radial block: solve within C-matrices
                gc = theta_extract(cg)
                wgc = theta_extract(wg)
                shift = Matrix.identity(gc.nrows, gc[0, 0].field).scaled(
                    FieldElement.of(d + 1, gc[0, 0].field)
                )
                x = theta_embed(sylvester_solve(gc, gc + shift, -wgc))
            touched = True
            for ii, gi in enumerate(idx):
                for jj, gj in enumerate(idx):
                    t[gi][gj] = x[ii, jj]
        if touched:
            factor = _poly_identity(n, field) + _poly_of_matrix(Matrix(t), d + 1)
            cur = gauge_transform(cur, polynomial_step(factor))
            payload = payload * factor
    payload = payload.map(lambda p: _poly_truncate(p, q + mu))
    step = polynomial_step(payload)
    b = gauge_transform(a, step)
    return step, b


# -- real deresonation ----------------------------------------------------------------


def _real_resonance_m(nf):
    total = 0
    if nf.c1 is not None and nf.c1.nrows:
        total += resonance_data(nf.c1).m_value
    if nf.c2 is not None and nf.c2.nrows:
        total += resonance_data(theta_extract(nf.c2)).m_value
    return total


def real_deresonate(a, trace=None):
    """Real theorem-(iii): rounds of (constant block split, diagonal
    monomial shift), all payloads real; complex-radial groups run the
    complex radial descent through Theta."""
    nf = carve_real_normal_form(a)
    q = nf.rank
    m_total = _real_resonance_m(nf)
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
    groups = _unit_groups(a, q)
    if len(groups) > 1:
        p_split, _ = _real_block_split_gauge(a, 2 * m_total - 1)
        p_split = p_split.map(lambda p: _poly_truncate(p, q + 2 * m_total))
        step = polynomial_step(p_split)
        cur = gauge_transform(a, step)
        steps.append(step)
    else:
        kind = groups[0][0]
        if kind == "pair":
            p_split, _ = _real_block_split_gauge(a, 2 * m_total - 1)
            p_split = p_split.map(lambda p: _poly_truncate(p, q + 2 * m_total))
            if not _poly_is_identity(p_split):
                step = polynomial_step(p_split)
                cur = gauge_transform(a, step)
                steps.append(step)
    guard = 0
    while True:
        nf_cur = carve_real_normal_form(cur)
        m_now = _real_resonance_m(nf_cur)
        if m_now == 0:
            break
        guard += 1
        if guard > 2 * m_total + 2:
            raise TurrittinError("real deresonation failed to descend")
        round_steps, cur = _real_deresonation_round(cur, nf_cur, trace)
        steps.extend(round_steps)
    return TransformChain(steps), cur


def _real_deresonation_round(cur, nf, trace):
    """One descent round on the first resonant unit group."""
    field = cur.field
    n = cur.n
    q = nf.rank
    groups = _unit_groups(cur, q)
    residual = cur.matrix_at(-1)
    for kind, unit_lists, _ in groups:
        idx = [i for unit in unit_lists for i in unit]
        cg = residual.submatrix(idx, idx)
        if kind == "real":
            rd = resonance_data(cg)
            if not rd.is_resonant:
                continue
            target = next(cls for cls in rd.classes if len(cls) > 1)
            lam_top = target[0]
            tops = {lam_top, lam_top.conjugate()}
            chi = charpoly(cg)
            fac_top = FieldPolynomial.from_scalars([1], field)
            minimal = FieldPolynomial.x_minus(lam_top)
            if not lam_top.is_real():
                minimal = (
                    FieldPolynomial.x_minus(lam_top)
                    * FieldPolynomial.x_minus(lam_top.conjugate())
                )
            minimal = _real_poly(minimal, field)
            mult = 0
            rem = chi
            while True:
                quo, r = divmod(rem, minimal)
                if not r.is_zero():
                    break
                mult += 1
                rem = quo
            fac_top = minimal**mult
            rest = rem
            if rest.degree >= 1:
                t_g, blocks = split_by_factors(cg, [fac_top, rest])
                t_size = blocks[0].nrows
            else:
                t_g = Matrix.identity(len(idx), field)
                t_size = len(idx)
            conj = _embed_const_at(t_g, idx, n, field)
            exps = [0] * n
            for i in idx[:t_size]:
                exps[i] = 1
            step_c = constant_step(conj)
            after_c = gauge_transform(cur, step_c)
            step_m = monomial_step(exps)
            after = gauge_transform(after_c, step_m)
            if trace is not None:
                trace.append({"event": "real-deresonation-round", "kind": "real"})
            return [step_c, step_m], after
        # complex pair group
        gc = theta_extract(cg)
        rd = resonance_data(gc)
        if not rd.is_resonant:
            continue
        target = next(cls for cls in rd.classes if len(cls) > 1)
        lam_top = target[0]
        cfield = gc[0, 0].field
        chi = charpoly(gc)
        fac = FieldPolynomial.x_minus(lam_top.coerce(cfield))
        mult = 0
        rem = chi
        while True:
            quo, r = divmod(rem, fac)
            if not r.is_zero():
                break
            mult += 1
            rem = quo
        if rem.degree >= 1:
            t_g, blocks = split_by_factors(gc, [fac**mult, rem])
            t_size = blocks[0].nrows
        else:
            t_g = Matrix.identity(gc.nrows, cfield)
            t_size = gc.nrows
        t_real = theta_embed(t_g)
        conj = _embed_const_at(t_real, idx, n, field)
        exps = [0] * n
        for i in idx[: 2 * t_size]:
            exps[i] = 1
        step_c = constant_step(conj)
        after_c = gauge_transform(cur, step_c)
        step_m = monomial_step(exps)
        after = gauge_transform(after_c, step_m)
        if trace is not None:
            trace.append({"event": "real-deresonation-round", "kind": "pair"})
        return [step_c, step_m], after
    raise TurrittinError("no resonant unit group found during descent")


def _real_poly(p, field):
    coeffs = []
    for c in p.coeffs:
        if not c.is_real():
            raise TurrittinError("expected a real polynomial")
        coeffs.append(c.real_part().coerce(field))
    return FieldPolynomial(field, coeffs)


def _embed_const_at(m, indices, total, field):
    ident = Matrix.identity(total, field)
    rows = [list(r) for r in ident.rows]
    for ii, gi in enumerate(indices):
        for jj, gj in enumerate(indices):
            rows[gi][gj] = m[ii, jj].coerce(field)
    return Matrix(rows)


# -- real formal normal form --------------------------------------------------------


def real_formal_normal_form(a, precision):
    """Full real pipeline; returns (chain, q_payload, nf) with nf zero-tail."""
    inv = system_invariants(a)
    n_det = inv.determinacy_order
    chain0, nf0 = rtrs_rank0(a)
    m_est = _real_resonance_m(nf0)
    margin = 2 * m_est + nf0.rank + precision + 1
    if a.relative_order != ORDER_INF and a.relative_order < n_det + margin:
        raise PrecisionError(
            "real formal normal form needs more coefficients",
            required=n_det + margin,
            available=a.relative_order,
        )
    work = a.restrict_relative(min(a.relative_order, n_det + margin))
    chain0, nf0 = rtrs_rank0(work)
    sys0 = nf0.reduced_system
    chain1, sys1 = real_deresonate(sys0)
    step_q, sys2 = real_eliminate_tail(sys1, precision)
    chain = chain0 + chain1
    nf = carve_real_normal_form(
        sys2,
        ramification=chain.ramification_index(),
        degree=precision,
        zero_tail=True,
    )
    return chain, step_q, nf
