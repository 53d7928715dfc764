"""Exact linear algebra for constant matrices over the tower: spectral
splittings, Jordan and real canonical forms, Sylvester solving, gamma
invariants (determinantal divisors), the 2x2-block complex embedding, and
resonance data of residual matrices.
"""

from itertools import combinations

from .errors import (
    BZeroError,
    CommonEigenvalueError,
    DegreeMismatchError,
    NotAComplexMatrixError,
    NotCoprimeError,
    SpectrumMismatchError,
    UnsupportedTowerError,
)
from .factor import factor_poly
from .field import (
    COMPLEXIFIED,
    FieldDescriptor,
    FieldElement,
    REAL_QUADRATIC,
    complex_pair,
    join,
    one_of,
    sqrt_in_field,
    zero_of,
)
from .jets import LaurentJet
from .matrix import (
    Matrix,
    charpoly,
    evaluate_poly_at_matrix,
    inverse,
    nullspace,
    rank,
    rref,
    solve,
)
from .poly import FieldPolynomial, poly_gcd
from .rationals import QQ, as_integer, is_integer


# -- widening the tower by one square root ---------------------------------


def _squarefree_kernel(q):
    """Write a positive rational q as s^2 * k with k a squarefree integer;
    returns (k, s)."""
    num, den = int(q.numerator), int(q.denominator)
    n = num * den  # q = n / den^2
    s_num, s_den = 1, den
    k = 1
    i = 2
    while i * i <= n:
        e = 0
        while n % i == 0:
            n //= i
            e += 1
        if e // 2:
            s_num *= i ** (e // 2)
        if e % 2:
            k *= i
        i += 1
    k *= n
    return k, QQ(s_num, s_den)


def extend_with_real_sqrt(field, value):
    """Return (field', sqrt(value)) for a positive real tower element,
    widening the quadratic layer if needed and possible."""
    root = sqrt_in_field(value)
    if root is not None:
        return field, root
    if not value.is_rational():
        raise UnsupportedTowerError(
            f"sqrt({value}) needs a nested radical beyond the tower"
        )
    q = value.rational_value()
    if q <= 0:
        raise UnsupportedTowerError("real square root of a non-positive value")
    kernel, scale = _squarefree_kernel(q)
    if field.d is not None:
        raise UnsupportedTowerError(
            f"sqrt({q}) needs a second quadratic extension (already have sqrt({field.d}))"
        )
    if field.kind == COMPLEXIFIED:
        wide = FieldDescriptor(COMPLEXIFIED, kernel)
    else:
        wide = FieldDescriptor(REAL_QUADRATIC, kernel)
    coords = [QQ(0)] * wide.width
    coords[1] = scale
    return wide, FieldElement(wide, tuple(coords))


def quadratic_roots(p, allow_complex):
    """Roots of a monic irreducible quadratic, widening the tower if needed.

    Returns (field', [root1, root2]); complex roots require allow_complex
    (they land in the complexification).  Raises UnsupportedTowerError when
    the roots live outside every reachable tower member.
    """
    field = p.field
    b, c = p.coefficient(1), p.coefficient(0)
    disc = b * b - c * FieldElement.of(4, field)
    half = FieldElement.of(QQ(1, 2), field)
    if field.kind == COMPLEXIFIED:
        root = sqrt_in_field(disc)
        if root is None and disc.is_real():
            real_disc = disc.real_part()
            sign = real_disc.sign()
            wide_real, mag = extend_with_real_sqrt(
                field.real_subfield(), real_disc if sign > 0 else -real_disc
            )
            wide = wide_real.complexification()
            root = mag.coerce(wide)
            if sign < 0:
                from .field import i_of

                root = root * i_of(wide)
            field = wide
            b, c, half = b.coerce(wide), c.coerce(wide), half.coerce(wide)
        elif root is None:
            raise UnsupportedTowerError(
                "quadratic discriminant has no square root in the tower"
            )
    else:
        sign = disc.sign()
        if sign >= 0:
            field, root = extend_with_real_sqrt(field, disc)
        else:
            if not allow_complex:
                raise UnsupportedTowerError(
                    "complex eigenvalues outside the real tower"
                )
            wide_real, mag = extend_with_real_sqrt(field, -disc)
            field = wide_real.complexification()
            from .field import i_of

            root = mag.coerce(field) * i_of(field)
        b, c, half = b.coerce(field), c.coerce(field), half.coerce(field)
    r1 = (-b + root) * half
    r2 = (-b - root) * half
    return field, [r1, r2]


def matrix_spectrum(m, allow_complex=True):
    """Eigenvalues with multiplicities, widening the tower when a quadratic
    factor requires it.  Returns (field', [(eigenvalue, multiplicity)]).

    Raises UnsupportedTowerError on irreducible factors of degree > 2 or
    quadratics whose roots need unavailable radicals.
    """
    field = m[0, 0].field
    chi = charpoly(m)
    pairs = []
    for factor, mult in factor_poly(chi):
        if factor.degree == 1:
            pairs.append((-factor.coefficient(0), mult))
        elif factor.degree == 2:
            field, roots = quadratic_roots(factor, allow_complex)
            pairs = [(ev.coerce(field), mu) for ev, mu in pairs]
            pairs.extend((r, mult) for r in roots)
        else:
            raise UnsupportedTowerError(
                f"irreducible spectral factor of degree {factor.degree}"
            )
    pairs = [(ev.coerce(field), mu) for ev, mu in pairs]
    pairs.sort(key=lambda p: p[0].key())
    return field, pairs


# -- spectral splitting ------------------------------------------------------


def coprime_split(m, p1, p2):
    """Block-diagonalize m by a pair of coprime characteristic factors.

    Returns (T, M1, M2) with T^{-1} m T = M1 (+) M2, char_poly(Mi) = pi.
    """
    field = join(join(m[0, 0].field, p1.field), p2.field)
    m = m.map(lambda c: c.coerce(field))
    p1, p2 = p1.coerce(field), p2.coerce(field)
    if p1.degree < 1 or p2.degree < 1:
        raise DegreeMismatchError("both factors must have positive degree")
    chi = charpoly(m)
    if (p1 * p2).monic() != chi.monic():
        raise DegreeMismatchError("factors do not multiply to the characteristic polynomial")
    if poly_gcd(p1, p2).degree != 0:
        raise NotCoprimeError("characteristic factors are not coprime")
    cols = []
    sizes = []
    for p in (p1, p2):
        kernel = nullspace(evaluate_poly_at_matrix(p, m))
        if len(kernel) != p.degree:
            raise NotCoprimeError("kernel dimension mismatch in coprime splitting")
        cols.extend(kernel)
        sizes.append(len(kernel))
    t = Matrix([[cols[j][i, 0] for j in range(len(cols))] for i in range(m.nrows)])
    conj = inverse(t) * m * t
    n1 = sizes[0]
    n = m.nrows
    m1 = conj.submatrix(range(n1), range(n1))
    m2 = conj.submatrix(range(n1, n), range(n1, n))
    return t, m1, m2


def split_by_factors(m, factor_groups):
    """Iterated coprime splitting by a partition of char-poly factors.

    factor_groups: list of polynomials (pairwise coprime, product = char
    poly up to the leading unit).  Returns (T, [blocks]) in group order.
    """
    if len(factor_groups) == 1:
        return Matrix.identity(m.nrows, m[0, 0].field), [m]
    head = factor_groups[0]
    tail = factor_groups[1]
    for p in factor_groups[2:]:
        tail = tail * p
    t, m1, m2 = coprime_split(m, head, tail)
    t2, blocks = split_by_factors(m2, factor_groups[1:])
    n1, n2 = m1.nrows, m2.nrows
    field = t[0, 0].field
    lift = Matrix.from_blocks(
        [
            [Matrix.identity(n1, field), Matrix.zero(n1, n2, field)],
            [Matrix.zero(n2, n1, field), t2],
        ]
    )
    return t * lift, [m1] + blocks


# -- Jordan form for a single eigenvalue -------------------------------------


class JordanData:
    __slots__ = ("eigenvalue", "block_sizes", "conjugator")

    def __init__(self, eigenvalue, block_sizes, conjugator):
        object.__setattr__(self, "eigenvalue", eigenvalue)
        object.__setattr__(self, "block_sizes", tuple(block_sizes))
        object.__setattr__(self, "conjugator", conjugator)

    def __setattr__(self, *args):
        raise AttributeError("JordanData is immutable")

    def __repr__(self):
        return f"<jordan lambda={self.eigenvalue} sigma={list(self.block_sizes)}>"


def shifting_matrix(n, field):
    """H: ones on the superdiagonal."""
    z, o = zero_of(field), one_of(field)
    return Matrix(
        [[o if j == i + 1 else z for j in range(n)] for i in range(n)]
    )


def jordan_block(eigenvalue, size):
    field = eigenvalue.field
    return (
        Matrix.identity(size, field).scaled(eigenvalue)
        + shifting_matrix(size, field)
    )


def jordan_single_eigen(m, eigenvalue):
    """Jordan data of a matrix whose only eigenvalue is ``eigenvalue``.

    Chains of generalized eigenvectors are chosen canonically (candidates
    scanned in kernel-basis order, lowest column index first); block sizes
    come out ascending.
    """
    field = join(m[0, 0].field, eigenvalue.field)
    m = m.map(lambda c: c.coerce(field))
    n = m.nrows
    eigenvalue = eigenvalue.coerce(field)
    nil = m - Matrix.identity(n, field).scaled(eigenvalue)
    chi = charpoly(m)
    if chi != FieldPolynomial.x_minus(eigenvalue) ** n:
        raise SpectrumMismatchError(
            f"{eigenvalue} is not the unique eigenvalue of the matrix"
        )
    powers = [Matrix.identity(n, field)]
    while not powers[-1].is_zero():
        powers.append(powers[-1] * nil)
    s = len(powers) - 1  # nilpotency index
    kernels = [nullspace(powers[j]) for j in range(s + 1)]
    dims = [len(k) for k in kernels]

    chains = []  # list of (top_vector, height)
    # Working span: columns gathered so far for the independence tests.
    for j in range(s, 0, -1):
        span_cols = [vec.column(0) for vec in kernels[j - 1]]
        for top, h in chains:
            pushed = powers[h - j] * top if h > j else None
            if pushed is not None:
                span_cols.append(pushed.column(0))
        needed = dims[j] - dims[j - 1] - sum(1 for _, h in chains if h > j)
        if needed <= 0:
            continue
        for cand in kernels[j]:
            if needed == 0:
                break
            trial = span_cols + [cand.column(0)]
            mat = Matrix(trial).transpose()
            if rank(mat) == len(trial):
                chains.append((cand, j))
                span_cols.append(cand.column(0))
                needed -= 1
        if needed:
            raise SpectrumMismatchError("jordan chain construction failed")
    chains.sort(key=lambda ch: ch[1])
    cols = []
    sizes = []
    for top, h in chains:
        sizes.append(h)
        for e in range(h - 1, -1, -1):
            vec = powers[e] * top
            cols.append(vec.column(0))
    t = Matrix(cols).transpose()
    return JordanData(eigenvalue, sizes, t)


# -- real canonical form ------------------------------------------------------


def real_canonical_form(m):
    """Real canonical form over the real tower.

    Returns (T, C, n1) with T^{-1} m T = C = C1 (+) C2: C1 (size n1) the
    real-spectrum Jordan part, C2 built from 2x2 rotation-scaling blocks
    (one Lambda per conjugate eigenvalue pair) with identity couplings.
    """
    field = m[0, 0].field
    if field.kind == COMPLEXIFIED:
        raise UnsupportedTowerError("real canonical form needs a real field")
    chi = charpoly(m)
    real_parts = []  # (eigenvalue, factor, mult)
    complex_parts = []  # (factor, mult)
    for factor, mult in factor_poly(chi):
        if factor.degree == 1:
            real_parts.append((-factor.coefficient(0), factor, mult))
        elif factor.degree == 2:
            complex_parts.append((factor, mult))
        else:
            raise UnsupportedTowerError(
                f"irreducible spectral factor of degree {factor.degree}"
            )
    # Widen once so that every conjugate pair a+-ib has a, b in the field.
    wide = field
    enriched = []
    for factor, mult in complex_parts:
        cfield, roots = quadratic_roots(factor.coerce(wide), allow_complex=True)
        wide = cfield.real_subfield()
        lam = roots[0]
        if lam.imag_part().sign() < 0:
            lam = roots[1]
        enriched.append((lam, factor, mult))
    field = wide
    m = m.map(lambda c: c.coerce(field))
    real_parts = [(ev.coerce(field), f.coerce(field), mu) for ev, f, mu in real_parts]
    real_parts.sort(key=lambda item: item[0].key())
    enriched.sort(key=lambda item: item[0].key())

    n = m.nrows
    cols = []
    n1 = 0
    for ev, factor, mult in real_parts:
        primary = nullspace(evaluate_poly_at_matrix(factor**mult, m))
        basis = Matrix([[vec[i, 0] for vec in primary] for i in range(n)])
        local = solve(basis, m * basis)
        jd = jordan_single_eigen(local, ev)
        block_basis = basis * jd.conjugator
        for j in range(block_basis.ncols):
            cols.append(block_basis.column(j))
        n1 += len(primary)
    cfield = field.complexification()
    mc = m.map(lambda c: c.coerce(cfield))
    for lam, factor, mult in enriched:
        lam_c = lam.coerce(cfield)
        shifted = mc - Matrix.identity(n, cfield).scaled(lam_c)
        primary = nullspace(_matrix_power(shifted, mult))
        basis = Matrix([[vec[i, 0] for vec in primary] for i in range(n)])
        local = solve(basis, mc * basis)
        jd = jordan_single_eigen(local, lam_c)
        chain_basis = basis * jd.conjugator
        for j in range(chain_basis.ncols):
            w = chain_basis.column(j)
            cols.append([c.imag_part().coerce(field) for c in w])
            cols.append([c.real_part().coerce(field) for c in w])
    t = Matrix(cols).transpose()
    c = inverse(t) * m * t
    return t, c, n1


def _matrix_power(m, e):
    out = Matrix.identity(m.nrows, m[0, 0].field)
    for _ in range(e):
        out = out * m
    return out


# -- Sylvester equation -------------------------------------------------------


def sylvester_solve(r, s, m):
    """Solve R X - X S = M exactly; spectra of R and S must be disjoint."""
    field = join(join(r[0, 0].field, s[0, 0].field), m[0, 0].field)
    r = r.map(lambda c: c.coerce(field))
    s = s.map(lambda c: c.coerce(field))
    m = m.map(lambda c: c.coerce(field))
    if poly_gcd(charpoly(r), charpoly(s)).degree != 0:
        raise CommonEigenvalueError(
            "R and S share an eigenvalue; the Sylvester map is singular"
        )
    n, k = r.nrows, s.nrows
    if m.shape != (n, k):
        raise DegreeMismatchError("right-hand side shape mismatch")
    size = n * k
    rows = []
    rhs = []
    for i in range(n):
        for j in range(k):
            row = [zero_of(field)] * size
            for t in range(n):
                row[t * k + j] = row[t * k + j] + r[i, t]
            for t in range(k):
                row[i * k + t] = row[i * k + t] - s[t, j]
            rows.append(row)
            rhs.append([m[i, j]])
    x = solve(Matrix(rows), Matrix(rhs))
    return Matrix([[x[i * k + j, 0] for j in range(k)] for i in range(n)])


# -- gamma invariants ---------------------------------------------------------


def _char_matrix(m):
    """m - lambda*I as a polynomial matrix (in the variable lambda)."""
    field = m[0, 0].field
    x = FieldPolynomial.x(field)
    rows = []
    for i in range(m.nrows):
        row = []
        for j in range(m.ncols):
            p = FieldPolynomial.constant(m[i, j])
            if i == j:
                p = p - x
            row.append(p)
        rows.append(row)
    return rows


def _poly_det(rows, field):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    acc = FieldPolynomial(field, [])
    for j in range(n):
        if rows[0][j].is_zero():
            continue
        minor = [[rows[i][t] for t in range(n) if t != j] for i in range(1, n)]
        term = rows[0][j] * _poly_det(minor, field)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def gamma_invariants(m):
    """Degrees of the gcds of i x i minors of the characteristic matrix.

    Symbolic minors for n <= 4, Smith-style elimination above.
    """
    n = m.nrows
    if n <= 4:
        return _gamma_by_minors(m)
    return _gamma_by_smith(m)


def _gamma_by_minors(m):
    field = m[0, 0].field
    rows = _char_matrix(m)
    n = m.nrows
    out = []
    for size in range(1, n + 1):
        g = FieldPolynomial(field, [])
        for rsel in combinations(range(n), size):
            for csel in combinations(range(n), size):
                sub = [[rows[i][j] for j in csel] for i in rsel]
                g = poly_gcd(g, _poly_det(sub, field))
                if g.degree == 0:
                    break
            if g.degree == 0:
                break
        out.append(g.degree if not g.is_zero() else 0)
    return tuple(out)


def _gamma_by_smith(m):
    field = m[0, 0].field
    rows = [[p for p in row] for row in _char_matrix(m)]
    n = len(rows)
    degrees = []
    offset = 0
    work = rows
    invariant_degrees = []
    size = n
    while size > 0:
        # find the minimal-degree nonzero entry, canonically
        best = None
        for i in range(size):
            for j in range(size):
                p = work[i][j]
                if not p.is_zero() and (best is None or p.degree < best[2]):
                    best = (i, j, p.degree)
        if best is None:
            invariant_degrees.extend([None] * size)
            break
        bi, bj, _ = best
        work[0], work[bi] = work[bi], work[0]
        for row in work:
            row[0], row[bj] = row[bj], row[0]
        while True:
            reduced = True
            while reduced:
                reduced = False
                pivot = work[0][0]
                for i in range(1, size):
                    if work[i][0].is_zero():
                        continue
                    q = work[i][0] // pivot
                    work[i] = [a - q * b for a, b in zip(work[i], work[0])]
                    if not work[i][0].is_zero():
                        work[0], work[i] = work[i], work[0]
                        reduced = True
                pivot = work[0][0]
                for j in range(1, size):
                    if work[0][j].is_zero():
                        continue
                    q = work[0][j] // pivot
                    for i in range(size):
                        work[i][j] = work[i][j] - q * work[i][0]
                    if not work[0][j].is_zero():
                        for i in range(size):
                            work[i][0], work[i][j] = work[i][j], work[i][0]
                        reduced = True
            # divisibility fix-up so the diagonal comes out in chain order
            pivot = work[0][0]
            violator = None
            for i in range(1, size):
                for j in range(1, size):
                    if not (work[i][j] % pivot).is_zero():
                        violator = i
                        break
                if violator is not None:
                    break
            if violator is None:
                break
            work[0] = [a + b for a, b in zip(work[0], work[violator])]
        invariant_degrees.append(work[0][0].degree)
        work = [row[1:] for row in work[1:]]
        size -= 1
    out = []
    acc = 0
    for k in range(n):
        d = invariant_degrees[k] if k < len(invariant_degrees) else None
        acc += d if d is not None else 0
        out.append(acc)
    return tuple(out)


# -- the complex-block embedding Theta ---------------------------------------


def theta_scalar(c):
    """2x2 real block [[a,-b],[b,a]] of a complexified scalar a+bi."""
    a, b = c.real_part(), c.imag_part()
    return Matrix([[a, -b], [b, a]])


def theta_embed(m):
    """Entrywise 2x2-block embedding of a complexified matrix (or jet
    matrix / system) into double-size real data."""
    if isinstance(m, Matrix):
        grid = [
            [theta_scalar(m[i, j]) for j in range(m.ncols)]
            for i in range(m.nrows)
        ]
        return Matrix.from_blocks(grid)
    raise TypeError("theta_embed expects a Matrix; use theta_embed_system for systems")


def theta_extract(m):
    """Inverse of theta_embed; raises NotAComplexMatrixError when a 2x2
    block is not of the [[a,-b],[b,a]] shape."""
    if m.nrows % 2 or m.ncols % 2:
        raise NotAComplexMatrixError("odd dimension")
    rows = []
    for i in range(m.nrows // 2):
        row = []
        for j in range(m.ncols // 2):
            a, nb = m[2 * i, 2 * j], m[2 * i, 2 * j + 1]
            b, a2 = m[2 * i + 1, 2 * j], m[2 * i + 1, 2 * j + 1]
            if a != a2 or nb != -b:
                raise NotAComplexMatrixError(
                    f"block ({i},{j}) is not of Lambda shape"
                )
            row.append(complex_pair(a, b))
        rows.append(row)
    return Matrix(rows)


def is_c_matrix(m):
    try:
        theta_extract(m)
        return True
    except NotAComplexMatrixError:
        return False


def _jet_parts(jet):
    """Split a complexified jet into (real, imaginary) real-field jets."""
    field = jet.field.real_subfield()
    re = {}
    im = {}
    for d, c in jet.items():
        re[d] = c.real_part()
        im[d] = c.imag_part()
    from .jets import _from_sparse

    return _from_sparse(field, re, jet.order), _from_sparse(field, im, jet.order)


def theta_embed_system(system):
    """Theta on systems: each complexified jet entry becomes a 2x2 real
    jet block; dimension doubles, Poincare rank is preserved."""
    from .systems import SystemJet

    field = system.field.real_subfield()
    n = system.n
    rows = [[None] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            re, im = _jet_parts(system.entries[i][j].coerce(system.field.complexification()))
            rows[2 * i][2 * j] = re
            rows[2 * i][2 * j + 1] = -im
            rows[2 * i + 1][2 * j] = im
            rows[2 * i + 1][2 * j + 1] = re
    return SystemJet(field, rows, system.order)


def theta_extract_system(system):
    from .systems import SystemJet
    from .jets import _from_sparse

    if system.n % 2:
        raise NotAComplexMatrixError("odd dimension")
    cfield = system.field.complexification()
    n = system.n // 2
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            a = system.entries[2 * i][2 * j]
            nb = system.entries[2 * i][2 * j + 1]
            b = system.entries[2 * i + 1][2 * j]
            a2 = system.entries[2 * i + 1][2 * j + 1]
            if not (a.same_series(a2) and nb.same_series(-b)):
                raise NotAComplexMatrixError(
                    f"jet block ({i},{j}) is not of Lambda shape"
                )
            order = min(a.order, a2.order, b.order, nb.order)
            sparse = {}
            for d, c in a.items():
                if d <= order:
                    sparse[d] = complex_pair(c, zero_of(c.field))
            for d, c in b.items():
                if d <= order:
                    prev = sparse.get(d, zero_of(cfield))
                    sparse[d] = prev + complex_pair(zero_of(c.field), c)
            row.append(_from_sparse(cfield, sparse, order))
        rows.append(row)
    return SystemJet(cfield, rows, system.order)


def is_c_system(system, upto=None):
    """True when every coefficient through ``upto`` (absolute degree,
    default: the guaranteed order) passes the C-matrix test."""
    limit = system.order if upto is None else upto
    v = system.valuation()
    if v is None:
        return True
    d = v
    while d <= limit:
        if not is_c_matrix(system.matrix_at(d)):
            return False
        d += 1
    return True


def c_completion(lam, s):
    """Given Lambda = theta(a+bi) with b != 0 and an arbitrary real 2x2 S,
    produce X with Lambda X - X Lambda + S a C-matrix.

    Solves -u + s11 = u + s22 and v + s12 = -(v + s21) for u, v and takes
    the canonical minimal-support gauge x21 = x22 = 0, x12 = u/b, x11 = v/b.
    """
    lam_c = theta_extract(lam)[0, 0]
    b = lam_c.imag_part()
    if b.is_zero():
        raise BZeroError("c_completion needs a non-real diagonal value")
    field = s[0, 0].field
    two = FieldElement.of(2, field)
    u = (s[0, 0] - s[1, 1]) / two
    v = -(s[0, 1] + s[1, 0]) / two
    b = b.coerce(field)
    z = zero_of(field)
    return Matrix([[v / b, u / b], [z, z]])


# -- resonance ----------------------------------------------------------------


class ResonanceData:
    """Integer-difference partition of a spectrum and the descent measure.

    classes: tuple of tuples of distinct eigenvalues, each sorted by
    descending integer offset; m_value: sum over multi-member classes of
    (largest - smallest), a non-negative integer.
    """

    __slots__ = ("classes", "m_value")

    def __init__(self, classes, m_value):
        object.__setattr__(self, "classes", tuple(tuple(c) for c in classes))
        object.__setattr__(self, "m_value", int(m_value))

    def __setattr__(self, *args):
        raise AttributeError("ResonanceData is immutable")

    @property
    def is_resonant(self):
        return self.m_value > 0

    def __repr__(self):
        return f"<resonance m={self.m_value} classes={self.classes!r}>"


def _integer_offset(a, b):
    """a - b as a Python int when it is one, else None."""
    diff = a - b
    if not diff.is_rational():
        return None
    q = diff.rational_value()
    if not is_integer(q):
        return None
    return as_integer(q)


def resonance_data(c):
    """Resonance partition of the spectrum of a constant matrix."""
    _, pairs = matrix_spectrum(c)
    distinct = [ev for ev, _ in pairs]
    classes = []
    for ev in distinct:
        for cls in classes:
            if _integer_offset(ev, cls[0]) is not None:
                cls.append(ev)
                break
        else:
            classes.append([ev])
    ordered = []
    m_value = 0
    for cls in classes:
        base = cls[0]
        keyed = sorted(
            cls, key=lambda ev: -_integer_offset(ev, base)
        )
        ordered.append(keyed)
        if len(keyed) > 1:
            m_value += _integer_offset(keyed[0], keyed[-1])
    ordered.sort(key=lambda cls: cls[0].key())
    return ResonanceData(ordered, m_value)
