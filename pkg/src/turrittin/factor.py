"""Univariate polynomial factorization over the field tower.

Over Q: squarefree decomposition, rational-root extraction, then modular
factorization (Berlekamp mod a small prime) with Hensel lifting and
subset recombination.  Over Q(sqrt(d)), Q(i) and Q(sqrt(d))(i): Trager-style
norm descent to the subfield.

Degree caps keep the search desk-sized: 16 over Q, 8 over extensions
(the norm doubles degrees).  TURRITTIN_MAX_DEGREE overrides the cap.
"""

import os
from itertools import combinations
from math import ceil, gcd as int_gcd, isqrt, log2

from .errors import DegreeCapExceededError, UnsupportedTowerError
from .field import (
    COMPLEXIFIED,
    FieldElement,
    RATIONAL,
    REAL_QUADRATIC,
    i_of,
    sqrt_d_of,
    zero_of,
)
from .poly import FieldPolynomial, poly_gcd, squarefree_decomposition
from .rationals import QQ, qq

RATIONAL_DEGREE_CAP = 16
EXTENSION_DEGREE_CAP = 8


def _degree_caps():
    env = os.environ.get("TURRITTIN_MAX_DEGREE")
    if env:
        try:
            cap = int(env)
        except ValueError:
            cap = RATIONAL_DEGREE_CAP
        return max(cap, 1), max(cap // 2, 1)
    return RATIONAL_DEGREE_CAP, EXTENSION_DEGREE_CAP


# -- dense polynomial arithmetic mod p (low degree first int lists) -------


def _gf_strip(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _gf_add(f, g, p):
    n = max(len(f), len(g))
    return _gf_strip(
        [((f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0)) % p for i in range(n)]
    )


def _gf_sub(f, g, p):
    n = max(len(f), len(g))
    return _gf_strip(
        [((f[i] if i < len(f) else 0) - (g[i] if i < len(g) else 0)) % p for i in range(n)]
    )


def _gf_mul(f, g, p):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return _gf_strip(out)


def _gf_divmod(f, g, p):
    f = list(f)
    dg = len(g) - 1
    inv = pow(g[-1], -1, p)
    quo = [0] * max(len(f) - dg, 0)
    for k in range(len(f) - 1, dg - 1, -1):
        c = f[k] % p
        if c:
            q = (c * inv) % p
            quo[k - dg] = q
            for j in range(dg + 1):
                f[k - dg + j] = (f[k - dg + j] - q * g[j]) % p
    return _gf_strip(quo), _gf_strip(f[:dg])


def _gf_monic(f, p):
    if not f:
        return []
    inv = pow(f[-1], -1, p)
    return [(c * inv) % p for c in f]


def _gf_gcd(f, g, p):
    while g:
        f, g = g, _gf_divmod(f, g, p)[1]
    return _gf_monic(f, p)


def _gf_gcdex(f, g, p):
    """Returns (s, t, h) with s f + t g = h = monic gcd."""
    r0, r1 = list(f), list(g)
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = _gf_divmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, _gf_sub(s0, _gf_mul(q, s1, p), p)
        t0, t1 = t1, _gf_sub(t0, _gf_mul(q, t1, p), p)
    if not r0:
        return s0, t0, r0
    inv = pow(r0[-1], -1, p)
    scale = lambda h: _gf_strip([(c * inv) % p for c in h])
    return scale(s0), scale(t0), scale(r0)


def _gf_pow_mod(f, n, g, p):
    result = [1]
    base = _gf_divmod(f, g, p)[1]
    while n:
        if n & 1:
            result = _gf_divmod(_gf_mul(result, base, p), g, p)[1]
        base = _gf_divmod(_gf_mul(base, base, p), g, p)[1]
        n >>= 1
    return result


def _berlekamp(f, p):
    """Irreducible factors of a monic squarefree f mod p (deterministic)."""
    n = len(f) - 1
    if n == 1:
        return [f]
    # Q matrix: rows are x^(p*i) mod f
    rows = []
    xp = _gf_pow_mod([0, 1], p, f, p)
    cur = [1]
    for i in range(n):
        rows.append([cur[j] if j < len(cur) else 0 for j in range(n)])
        cur = _gf_divmod(_gf_mul(cur, xp, p), f, p)[1]
    # kernel of (Q - I)^T: vectors v with v(x)^p = v(x) mod f
    mat = [[(rows[i][j] - (1 if i == j else 0)) % p for i in range(n)] for j in range(n)]
    basis = _gf_nullspace(mat, p)
    r = len(basis)
    factors = [f]
    if r == 1:
        return factors
    for vec in basis:
        v = _gf_strip(list(vec))
        if len(v) <= 1:
            continue
        next_factors = []
        for g in factors:
            if len(g) - 1 == 1:
                next_factors.append(g)
                continue
            pieces = []
            rem = g
            for s in range(p):
                h = _gf_gcd(rem, _gf_sub(v, [s], p), p)
                if 0 < len(h) - 1 < len(rem) - 1:
                    pieces.append(h)
                    rem = _gf_divmod(rem, h, p)[0]
                if len(rem) - 1 == 0:
                    break
            if len(rem) - 1 > 0:
                pieces.append(_gf_monic(rem, p))
            next_factors.extend(pieces)
        factors = next_factors
        if len(factors) == r:
            break
    return sorted(factors)


def _gf_nullspace(mat, p):
    """Nullspace basis over GF(p) of a square matrix (row-major)."""
    n = len(mat)
    m = [row[:] for row in mat]
    pivots = {}
    r = 0
    for c in range(n):
        pivot = None
        for i in range(r, n):
            if m[i][c] % p:
                pivot = i
                break
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [(x * inv) % p for x in m[r]]
        for i in range(n):
            if i != r and m[i][c] % p:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        pivots[c] = r
        r += 1
    basis = []
    for c in range(n):
        if c in pivots:
            continue
        vec = [0] * n
        vec[c] = 1
        for pc, pr in pivots.items():
            vec[pc] = (-m[pr][c]) % p
        basis.append(vec)
    return basis


# -- Hensel lifting -------------------------------------------------------


def _trunc_sym(f, m):
    out = []
    half = m // 2
    for c in f:
        c %= m
        if c > half:
            c -= m
        out.append(c)
    return _int_strip(out)


def _int_strip(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _int_mul(f, g):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return _int_strip(out)


def _int_add(f, g):
    n = max(len(f), len(g))
    return _int_strip(
        [(f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0) for i in range(n)]
    )


def _int_sub(f, g):
    n = max(len(f), len(g))
    return _int_strip(
        [(f[i] if i < len(f) else 0) - (g[i] if i < len(g) else 0) for i in range(n)]
    )


def _int_divmod_monic(f, g):
    """Division by a monic integer polynomial (exact over Z)."""
    f = list(f)
    dg = len(g) - 1
    quo = [0] * max(len(f) - dg, 0)
    for k in range(len(f) - 1, dg - 1, -1):
        c = f[k]
        if c:
            quo[k - dg] = c
            for j in range(dg + 1):
                f[k - dg + j] -= c * g[j]
    return _int_strip(quo), _int_strip(f[:dg])


def _hensel_step(m, f, g, h, s, t):
    """One quadratic Hensel step: from f = g h (mod m) to (mod m^2).

    Requires h monic, s g + t h = 1 (mod m).  Returns (G, H, S, T).
    """
    M = m * m
    e = _trunc_sym(_int_sub(f, _int_mul(g, h)), M)
    q, r = _int_divmod_monic(_int_mul(s, e), h)
    q, r = _trunc_sym(q, M), _trunc_sym(r, M)
    G = _trunc_sym(_int_add(_int_add(g, _int_mul(t, e)), _int_mul(q, g)), M)
    H = _trunc_sym(_int_add(h, r), M)
    b = _trunc_sym(_int_sub(_int_add(_int_mul(s, G), _int_mul(t, H)), [1]), M)
    c, d = _int_divmod_monic(_int_mul(s, b), H)
    c, d = _trunc_sym(c, M), _trunc_sym(d, M)
    S = _trunc_sym(_int_sub(s, d), M)
    T = _trunc_sym(_int_sub(_int_sub(t, _int_mul(t, b)), _int_mul(c, G)), M)
    return G, H, S, T


def _hensel_lift(p, f, factors_mod_p, l):
    """Lift f = lc * prod(factors) (mod p) to (mod p^l); factors monic mod p.

    Returns integer polynomials congruent to the factors mod p^l
    (symmetric residues), the first one carrying lc(f).
    """
    r = len(factors_mod_p)
    lc = f[-1]
    if r == 1:
        inv = pow(lc, -1, p**l)
        return [_trunc_sym([c * inv % (p**l) for c in f], p**l)]
    k = r // 2
    d = ceil(log2(l)) if l > 1 else 1
    g = [lc % p]
    for fi in factors_mod_p[:k]:
        g = _gf_mul(g, fi, p)
    h = factors_mod_p[k]
    for fi in factors_mod_p[k + 1 :]:
        h = _gf_mul(h, fi, p)
    s, t, _ = _gf_gcdex(g, h, p)
    g = _trunc_sym(g, p)
    h = _trunc_sym(h, p)
    s = _trunc_sym(s, p)
    t = _trunc_sym(t, p)
    m = p
    for _ in range(d):
        if m >= p**l:
            break
        g, h, s, t = _hensel_step(m, f, g, h, s, t)
        m = m * m
    g = _trunc_sym(g, p**l)
    h = _trunc_sym(h, p**l)
    return _hensel_lift(p, g, factors_mod_p[:k], l) + _hensel_lift(
        p, h, factors_mod_p[k:], l
    )


# -- factorization over Z / Q ----------------------------------------------


_SMALL_PRIMES = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61]


def _next_primes():
    yield from _SMALL_PRIMES
    candidate = _SMALL_PRIMES[-1] + 2
    while True:
        if all(candidate % q for q in range(3, isqrt(candidate) + 1, 2)):
            yield candidate
        candidate += 2


def _integer_poly(p):
    """Clear denominators: returns (int coefficient list, content QQ) with
    poly = content * int_poly and int_poly primitive."""
    den = 1
    for c in p.coeffs:
        q = c.rational_value()
        den = den * q.denominator // int_gcd(den, int(q.denominator))
    ints = [int(c.rational_value() * den) for c in p.coeffs]
    content = 0
    for c in ints:
        content = int_gcd(content, abs(c))
    content = content or 1
    ints = [c // content for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
        content = -content
    return ints, QQ(content, den)


def _rational_roots(ints):
    """Rational roots of a primitive integer polynomial (with multiplicity 1
    assumed; caller works on squarefree parts)."""
    if not ints:
        return []
    roots = []
    # x = 0
    k = 0
    while k < len(ints) and ints[k] == 0:
        k += 1
    if k:
        roots.append(QQ(0))
        ints = ints[k:]
    a0, an = abs(ints[0]), abs(ints[-1])
    if a0 == 0:
        return roots
    num_divs = _divisors(a0)
    den_divs = _divisors(an)
    seen = set()
    for num in num_divs:
        for den in den_divs:
            if int_gcd(num, den) != 1:
                continue
            for cand in (QQ(num, den), QQ(-num, den)):
                if cand in seen:
                    continue
                seen.add(cand)
                acc = QQ(0)
                for c in reversed(ints):
                    acc = acc * cand + c
                if acc == 0:
                    roots.append(cand)
    return sorted(roots)


def _divisors(n):
    out = []
    i = 1
    while i * i <= n:
        if n % i == 0:
            out.append(i)
            if i != n // i:
                out.append(n // i)
        i += 1
    return sorted(out)


def _zassenhaus(ints):
    """Irreducible factors over Z of a primitive squarefree integer
    polynomial with positive leading coefficient, as integer lists."""
    n = len(ints) - 1
    if n == 1:
        return [ints]
    lc = ints[-1]
    # Mignotte-style bound on factor coefficients
    max_abs = max(abs(c) for c in ints)
    bound = isqrt(n + 1) + 1
    bound = bound * (2**n) * max_abs * abs(lc)
    for p in _next_primes():
        if lc % p == 0:
            continue
        fp = _gf_monic([c % p for c in ints], p)
        if not fp or len(fp) - 1 != n:
            continue
        deriv = _gf_strip([(k * c) % p for k, c in enumerate(fp)][1:])
        if len(_gf_gcd(fp, deriv, p)) - 1 != 0:
            continue
        break
    modular = _berlekamp(fp, p)
    if len(modular) == 1:
        return [ints]
    l = max(ceil(log2(2 * bound + 1) / log2(p)), 1)
    lifted = _hensel_lift(p, ints, modular, l)
    pl = p**l
    # subset recombination
    current = ints
    indices = list(range(len(lifted)))
    result = []
    size = 1
    while 2 * size <= len(indices):
        found = False
        for combo in combinations(indices, size):
            cand = [current[-1]]
            for idx in combo:
                cand = _int_mul(cand, lifted[idx])
            cand = _trunc_sym(cand, pl)
            cand = _primitive_int(cand)
            quo, rem = _int_pseudo_div(current, cand)
            if quo is not None and not rem:
                result.append(cand)
                current = quo
                indices = [i for i in indices if i not in combo]
                found = True
                break
        if not found:
            size += 1
    if len(current) - 1 >= 1:
        result.append(_primitive_int(current))
    return sorted(result)


def _primitive_int(f):
    g = 0
    for c in f:
        g = int_gcd(g, abs(c))
    g = g or 1
    out = [c // g for c in f]
    if out and out[-1] < 0:
        out = [-c for c in out]
    return out


def _int_pseudo_div(f, g):
    """Exact division over Q of integer polys; returns (int quotient, rem)
    with quotient scaled primitive... here: returns (quo, []) iff g | f over
    Q with integer primitive quotient, else (None, [1])."""
    fq = [QQ(c) for c in f]
    dg = len(g) - 1
    if dg < 0 or len(f) - 1 < dg:
        return None, [1]
    quo = [QQ(0)] * (len(f) - dg)
    lead = QQ(g[-1])
    for k in range(len(fq) - 1, dg - 1, -1):
        c = fq[k]
        if c != 0:
            q = c / lead
            quo[k - dg] = q
            for j in range(dg + 1):
                fq[k - dg + j] -= q * g[j]
    if any(c != 0 for c in fq[:dg]):
        return None, [1]
    if any(c.denominator != 1 for c in quo):
        return None, [1]
    return _int_strip([int(c) for c in quo]), []


def _factor_rational_squarefree(poly):
    """Monic irreducible factors over Q of a monic squarefree polynomial."""
    field = poly.field
    ints, _ = _integer_poly(poly)
    factors = []
    remaining = ints
    for root in _rational_roots(ints):
        factors.append(
            FieldPolynomial.from_scalars([-root, 1], field)
        )
        remaining, _ = _int_pseudo_div(
            remaining, [int(-root * root.denominator), int(root.denominator)]
        )
    if remaining is None:
        raise AssertionError("root division failed")
    if len(remaining) - 1 >= 1:
        for f in _zassenhaus(remaining):
            factors.append(
                FieldPolynomial.from_scalars([QQ(c) for c in f], field).monic()
            )
    return sorted(factors, key=lambda f: f.key())


# -- Trager descent over the quadratic layers ------------------------------


def _alpha_split(coeff, field):
    """Write a coefficient of the top layer K(alpha) as (p, q) with
    coeff = p + alpha*q, p and q in the subfield K."""
    if field.kind == COMPLEXIFIED:
        return coeff.real_part(), coeff.imag_part()
    # real-quadratic descends to Q
    a, b = coeff.coords
    return FieldElement.of(a), FieldElement.of(b)


def _alpha_of(field):
    if field.kind == COMPLEXIFIED:
        return i_of(field), FieldElement.of(-1, field.real_subfield())
    return sqrt_d_of(field), FieldElement.of(field.d)


def _norm_to_subfield(poly, field):
    """Norm of a polynomial over K(alpha) down to K[x]: P^2 - c*Q^2 where
    poly = P + alpha*Q and alpha^2 = c."""
    from .field import RATIONALS

    base = field.real_subfield() if field.kind == COMPLEXIFIED else RATIONALS
    _, c = _alpha_of(field)
    ps, qs = [], []
    for coeff in poly.coeffs:
        p_part, q_part = _alpha_split(coeff, field)
        ps.append(p_part.coerce(base))
        qs.append(q_part.coerce(base))
    P = FieldPolynomial(base, ps)
    Q = FieldPolynomial(base, qs)
    return P * P - Q * Q * FieldPolynomial.constant(c.coerce(base))


def _factor_extension_squarefree(poly, field):
    """Trager descent: monic squarefree poly over K(alpha)."""
    alpha, _ = _alpha_of(field)
    x = FieldPolynomial.x(field)
    for s in range(0, 40):
        shift = x - FieldPolynomial.constant(alpha * FieldElement.of(s, field))
        shifted = poly.compose(shift)
        norm = _norm_to_subfield(shifted, field)
        if poly_gcd(norm, norm.derivative()).degree == 0:
            break
    else:  # pragma: no cover - s search is tiny in practice
        raise UnsupportedTowerError("no squarefree norm found in Trager descent")
    sub_factors = _factor_squarefree(norm.monic())
    out = []
    back = x + FieldPolynomial.constant(alpha * FieldElement.of(s, field))
    for g in sub_factors:
        h = poly_gcd(poly, g.coerce(field).compose(back))
        if h.degree >= 1:
            out.append(h.monic())
    return sorted(out, key=lambda f: f.key())


def _factor_squarefree(poly):
    field = poly.field
    if field.kind == RATIONAL:
        return _factor_rational_squarefree(poly)
    return _factor_extension_squarefree(poly, field)


def factor_poly(poly):
    """Factor a polynomial over its field into monic irreducibles.

    Returns a list of (factor, multiplicity), canonically sorted; the
    product of factor^multiplicity times poly's leading coefficient
    reproduces poly exactly.
    """
    if poly.is_zero():
        raise DegreeCapExceededError("cannot factor the zero polynomial")
    field = poly.field
    rational_cap, extension_cap = _degree_caps()
    cap = rational_cap if field.kind == RATIONAL else extension_cap
    if poly.degree > cap:
        raise DegreeCapExceededError(
            f"degree {poly.degree} exceeds the factorization cap {cap} over {field!r}",
            degree=poly.degree,
            cap=cap,
        )
    if field.kind not in (RATIONAL, REAL_QUADRATIC, COMPLEXIFIED):
        raise UnsupportedTowerError(f"unsupported field {field!r}")
    out = []
    for part, mult in squarefree_decomposition(poly):
        for f in _factor_squarefree(part.monic()):
            out.append((f, mult))
    out.sort(key=lambda fm: (fm[0].key(), fm[1]))
    return out
