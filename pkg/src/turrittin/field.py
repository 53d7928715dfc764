"""Exact scalar arithmetic in a small tower of computable fields.

The tower consists of Q, one real quadratic extension Q(sqrt(d)) with a
chosen real embedding, and the i-adjunctions Q(i) and Q(sqrt(d))(i).
Elements are kept in fully reduced coordinates over Q; all operations are
pure and all values immutable, so they can be shared freely.

Canonical text forms (used bit-exactly by the document formats):

    "p/q"                           rational
    "p/q+r/s*sqrt(d)"               real quadratic
    "<real>+<real>*i"               complexified, compound parts in "(...)"
"""

from .errors import (
    DivisionByZeroError,
    IncompatibleDescriptorsError,
    InvalidFieldDescriptorError,
    SignOfComplexError,
)
from .rationals import QQ, ZERO, ONE, qq, rational_sqrt, sign_of

RATIONAL = "rationals"
REAL_QUADRATIC = "real-quadratic"
COMPLEXIFIED = "complexified"

_KINDS = (RATIONAL, REAL_QUADRATIC, COMPLEXIFIED)


class FieldDescriptor:
    """Identifies a member of the tower.

    kind: one of "rationals", "real-quadratic", "complexified".
    d: the (positive, non-square) radicand of the real quadratic layer,
       or None when that layer is absent.
    embedding_sign: which real root of x^2 - d the symbol sqrt(d) denotes.
    """

    __slots__ = ("kind", "d", "embedding_sign", "_hash")

    def __init__(self, kind, d=None, embedding_sign=1):
        if kind not in _KINDS:
            raise InvalidFieldDescriptorError(f"unknown field kind {kind!r}")
        if d is not None:
            d = qq(d)
            if d <= 0:
                raise InvalidFieldDescriptorError("radicand must be positive")
            if rational_sqrt(d) is not None:
                raise InvalidFieldDescriptorError(
                    f"radicand {d} is a perfect square; x^2-{d} is reducible"
                )
        if kind == RATIONAL and d is not None:
            raise InvalidFieldDescriptorError("rationals carry no radicand")
        if kind == REAL_QUADRATIC and d is None:
            raise InvalidFieldDescriptorError("real-quadratic needs a radicand")
        if embedding_sign not in (1, -1):
            raise InvalidFieldDescriptorError("embedding_sign must be +1 or -1")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "embedding_sign", embedding_sign if d is not None else 1)
        object.__setattr__(self, "_hash", hash((kind, d, self.embedding_sign)))

    def __setattr__(self, *args):
        raise AttributeError("FieldDescriptor is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, FieldDescriptor)
            and self.kind == other.kind
            and self.d == other.d
            and self.embedding_sign == other.embedding_sign
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if self.kind == RATIONAL:
            return "Q"
        if self.kind == REAL_QUADRATIC:
            return f"Q(sqrt({self.d}))"
        return f"Q(sqrt({self.d}))(i)" if self.d is not None else "Q(i)"

    @property
    def is_real(self):
        return self.kind != COMPLEXIFIED

    @property
    def width(self):
        """Number of rational coordinates of an element."""
        n = 1 if self.d is None else 2
        return n * (2 if self.kind == COMPLEXIFIED else 1)

    def real_subfield(self):
        """The fixed field of conjugation."""
        if self.kind != COMPLEXIFIED:
            return self
        if self.d is None:
            return RATIONALS
        return FieldDescriptor(REAL_QUADRATIC, self.d, self.embedding_sign)

    def complexification(self):
        if self.kind == COMPLEXIFIED:
            return self
        return FieldDescriptor(COMPLEXIFIED, self.d, self.embedding_sign)

    def minimal_polynomial_text(self):
        """Monic degree-2 relation of the outermost generator, if any."""
        if self.kind == COMPLEXIFIED:
            return "x^2+1"
        if self.kind == REAL_QUADRATIC:
            return f"x^2-{self.d}"
        return None


RATIONALS = FieldDescriptor(RATIONAL)
GAUSSIAN = FieldDescriptor(COMPLEXIFIED)


def join(f1, f2):
    """Smallest tower member containing both descriptors."""
    if f1 is f2 or f1 == f2:
        return f1
    d = f1.d
    if f2.d is not None:
        if d is None:
            d = f2.d
            sign = f2.embedding_sign
        elif d != f2.d or f1.embedding_sign != f2.embedding_sign:
            raise IncompatibleDescriptorsError(
                f"cannot mix {f1!r} and {f2!r}: distinct quadratic layers"
            )
        else:
            sign = f1.embedding_sign
    else:
        sign = f1.embedding_sign
    if f1.kind == COMPLEXIFIED or f2.kind == COMPLEXIFIED:
        return FieldDescriptor(COMPLEXIFIED, d, sign)
    if d is not None:
        return FieldDescriptor(REAL_QUADRATIC, d, sign)
    return RATIONALS


def _widen_coords(coords, src, dst):
    """Rewrite coordinates of an element of src as coordinates over dst."""
    if src == dst:
        return coords
    # Real part layout over dst's real subfield.
    real_width = 1 if dst.d is None else 2
    if src.kind == RATIONAL:
        re = (coords[0],) + (ZERO,) * (real_width - 1)
        im = ()
    elif src.kind == REAL_QUADRATIC:
        re = coords
        im = ()
    else:
        half = len(coords) // 2
        re, im = coords[:half], coords[half:]
        if len(re) < real_width:
            re = re + (ZERO,) * (real_width - len(re))
            im = im + (ZERO,) * (real_width - len(im))
    if dst.kind == COMPLEXIFIED:
        if not im:
            im = (ZERO,) * real_width
        return re + im
    if im and any(c != 0 for c in im):
        raise IncompatibleDescriptorsError("cannot narrow a non-real element")
    return re


class FieldElement:
    """An exact scalar of the tower: immutable, hashable, operator-complete."""

    __slots__ = ("field", "coords")

    def __init__(self, field, coords):
        coords = tuple(qq(c) for c in coords)
        if len(coords) != field.width:
            raise InvalidFieldDescriptorError(
                f"expected {field.width} coordinates for {field!r}, got {len(coords)}"
            )
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coords", coords)

    def __setattr__(self, *args):
        raise AttributeError("FieldElement is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def of(value, field=RATIONALS):
        """Build an element of ``field`` from a rational-like value."""
        c = (qq(value),) + (ZERO,) * (field.width - 1)
        return FieldElement(field, c)

    def coerce(self, field):
        if field == self.field:
            return self
        return FieldElement(field, _widen_coords(self.coords, self.field, field))

    # -- predicates ---------------------------------------------------

    def is_zero(self):
        return all(c == 0 for c in self.coords)

    def is_rational(self):
        return all(c == 0 for c in self.coords[1:])

    def is_real(self):
        if self.field.kind != COMPLEXIFIED:
            return True
        half = len(self.coords) // 2
        return all(c == 0 for c in self.coords[half:])

    def rational_value(self):
        if not self.is_rational():
            raise IncompatibleDescriptorsError(f"{self} is not rational")
        return self.coords[0]

    # -- ring structure ----------------------------------------------

    def _binary(self, other):
        if isinstance(other, FieldElement):
            if other.field == self.field:
                return self, other
            f = join(self.field, other.field)
            return self.coerce(f), other.coerce(f)
        if isinstance(other, (int, type(ZERO))):
            return self, FieldElement.of(other, self.field)
        return self, NotImplemented

    def __add__(self, other):
        a, b = self._binary(other)
        if b is NotImplemented:
            return NotImplemented
        return FieldElement(a.field, tuple(x + y for x, y in zip(a.coords, b.coords)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, tuple(-x for x in self.coords))

    def __sub__(self, other):
        a, b = self._binary(other)
        if b is NotImplemented:
            return NotImplemented
        return FieldElement(a.field, tuple(x - y for x, y in zip(a.coords, b.coords)))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        a, b = self._binary(other)
        if b is NotImplemented:
            return NotImplemented
        return FieldElement(a.field, _mul_coords(a.field, a.coords, b.coords))

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise DivisionByZeroError("inversion of zero")
        return FieldElement(self.field, _inv_coords(self.field, self.coords))

    def __truediv__(self, other):
        a, b = self._binary(other)
        if b is NotImplemented:
            return NotImplemented
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = FieldElement.of(1, self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- conjugation, parts, order -------------------------------------

    def conjugate(self):
        """Complex conjugation; fixes the real sub-tower."""
        if self.field.kind != COMPLEXIFIED:
            return self
        half = len(self.coords) // 2
        return FieldElement(
            self.field, self.coords[:half] + tuple(-c for c in self.coords[half:])
        )

    def real_part(self):
        if self.field.kind != COMPLEXIFIED:
            return self
        half = len(self.coords) // 2
        return FieldElement(self.field.real_subfield(), self.coords[:half])

    def imag_part(self):
        if self.field.kind != COMPLEXIFIED:
            return FieldElement.of(0, self.field)
        half = len(self.coords) // 2
        return FieldElement(self.field.real_subfield(), self.coords[half:])

    def sign(self):
        """Sign under the real embedding; defined on real kinds only."""
        if self.field.kind == COMPLEXIFIED:
            raise SignOfComplexError("sign of a complexified element")
        if self.field.kind == RATIONAL:
            return sign_of(self.coords[0])
        a, b = self.coords
        b = b * self.field.embedding_sign
        if b == 0:
            return sign_of(a)
        if a == 0:
            return sign_of(b)
        sa, sb = sign_of(a), sign_of(b)
        if sa == sb:
            return sa
        # a and b*sqrt(d) compete; compare squares exactly.
        return sa if a * a > b * b * self.field.d else sb

    def __lt__(self, other):
        a, b = self._binary(other)
        if b is NotImplemented:
            return NotImplemented
        return (a - b).sign() < 0

    def __le__(self, other):
        a, b = self._binary(other)
        if b is NotImplemented:
            return NotImplemented
        return (a - b).sign() <= 0

    def __gt__(self, other):
        return not self.__le__(other)

    def __ge__(self, other):
        return not self.__lt__(other)

    # -- equality / hashing / text -------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, type(ZERO))):
            other = FieldElement.of(other, self.field)
        if not isinstance(other, FieldElement):
            return NotImplemented
        try:
            a, b = self._binary(other)
        except IncompatibleDescriptorsError:
            return False
        return a.coords == b.coords

    def __hash__(self):
        # Hash must agree across coercions: strip trailing zero layers.
        if self.is_rational():
            return hash(self.coords[0])
        return hash(self.coords)

    def key(self):
        """Deterministic sort key (not the field order; for canonical layout)."""
        w = self.coords
        return tuple((int(c.numerator), int(c.denominator)) for c in w)

    def __repr__(self):
        return f"<{render_scalar(self)}>"

    def __str__(self):
        return render_scalar(self)


def _mul_coords(field, x, y):
    if field.kind == RATIONAL:
        return (x[0] * y[0],)
    if field.kind == REAL_QUADRATIC:
        d = field.d
        return (x[0] * y[0] + x[1] * y[1] * d, x[0] * y[1] + x[1] * y[0])
    half = len(x) // 2
    sub = field.real_subfield()
    if sub.kind == RATIONAL:
        a, b, c, e = x[0], x[1], y[0], y[1]
        return (a * c - b * e, a * e + b * c)
    xr, xi, yr, yi = x[:half], x[half:], y[:half], y[half:]
    rr = _mul_coords(sub, xr, yr)
    ii = _mul_coords(sub, xi, yi)
    ri = _mul_coords(sub, xr, yi)
    ir = _mul_coords(sub, xi, yr)
    return tuple(p - q for p, q in zip(rr, ii)) + tuple(p + q for p, q in zip(ri, ir))


def _inv_coords(field, x):
    if field.kind == RATIONAL:
        return (1 / x[0],)
    if field.kind == REAL_QUADRATIC:
        a, b = x
        # (a + b sqrt d)(a - b sqrt d) = a^2 - d b^2, nonzero since d is not a square
        n = a * a - b * b * field.d
        return (a / n, -b / n)
    half = len(x) // 2
    sub = field.real_subfield()
    xr, xi = x[:half], x[half:]
    # 1/(u+vi) = (u - vi)/(u^2+v^2)
    norm = tuple(
        p + q
        for p, q in zip(_mul_coords(sub, xr, xr), _mul_coords(sub, xi, xi))
    )
    inv_norm = _inv_coords(sub, norm)
    re = _mul_coords(sub, xr, inv_norm)
    im = _mul_coords(sub, tuple(-c for c in xi), inv_norm)
    return re + im


def sqrt_in_field(a):
    """Exact square root of ``a`` within its own field, or None.

    For real kinds the returned root is the one that is non-negative under
    the embedding.  For complexified elements, a root is returned when one
    exists in the same tower member.
    """
    field = a.field
    if a.is_zero():
        return a
    if field.kind == RATIONAL:
        r = rational_sqrt(a.coords[0])
        return None if r is None else FieldElement(field, (r,))
    if field.kind == REAL_QUADRATIC:
        if a.sign() < 0:
            return None
        s, t = a.coords
        if t == 0:
            r = rational_sqrt(s)
            if r is not None:
                root = FieldElement(field, (r, ZERO))
            else:
                # b^2 d = s
                r = rational_sqrt(s / field.d)
                root = None if r is None else FieldElement(field, (ZERO, r))
        else:
            # (p + q sqrt d)^2 = s + t sqrt d  => 4p^4 - 4sp^2 + t^2 d = 0
            disc = rational_sqrt(s * s - t * t * field.d)
            root = None
            if disc is not None:
                for branch in (s + disc, s - disc):
                    p2 = branch / 2
                    p = rational_sqrt(p2) if p2 >= 0 else None
                    if p is not None and p != 0:
                        q = t / (2 * p)
                        cand = FieldElement(field, (p, q))
                        if cand * cand == a:
                            root = cand
                            break
        if root is None:
            return None
        return root if root.sign() >= 0 else -root
    # Complexified: sqrt(u + vi) with u, v in the real subfield.
    u, v = a.real_part(), a.imag_part()
    if v.is_zero():
        r = sqrt_in_field(u) if u.sign() >= 0 else sqrt_in_field(-u)
        if r is None:
            return None
        r = r.coerce(field)
        if u.sign() >= 0:
            return r
        return r * i_of(field)
    w = sqrt_in_field(u * u + v * v)
    if w is None:
        return None
    for branch in (u + w, u - w):
        half = branch / FieldElement.of(2, branch.field)
        p = sqrt_in_field(half) if half.sign() >= 0 else None
        if p is not None and not p.is_zero():
            q = v / (p * FieldElement.of(2, p.field))
            cand = p.coerce(field) + q.coerce(field) * i_of(field)
            if cand * cand == a:
                return cand
    return None


def zero_of(field):
    return FieldElement.of(0, field)


def one_of(field):
    return FieldElement.of(1, field)


def i_of(field):
    """The imaginary unit of a complexified descriptor."""
    if field.kind != COMPLEXIFIED:
        raise InvalidFieldDescriptorError("i lives in a complexified field")
    half = field.width // 2
    coords = (ZERO,) * half + (ONE,) + (ZERO,) * (half - 1)
    return FieldElement(field, coords)


def sqrt_d_of(field):
    """The generator sqrt(d) of the quadratic layer."""
    if field.d is None:
        raise InvalidFieldDescriptorError("field has no quadratic layer")
    coords = [ZERO] * field.width
    coords[1] = ONE
    return FieldElement(field, tuple(coords))


def complex_pair(re, im):
    """Assemble re + im*i from two real-tower elements."""
    f = join(re.field, im.field).complexification()
    return re.coerce(f) + im.coerce(f) * i_of(f)


# -- canonical text rendering ------------------------------------------


def _render_rational(q):
    return str(q)


def _needs_parens(text):
    depth = 0
    for ch in text[1:]:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0:
            return True
    return False


def _render_real(field, coords):
    if field.kind == RATIONAL or len(coords) == 1:
        return _render_rational(coords[0])
    a, b = coords
    d = field.d
    dtxt = str(d)
    if b == 0:
        return _render_rational(a)
    if b == 1:
        bterm = f"sqrt({dtxt})"
    elif b == -1:
        bterm = f"-sqrt({dtxt})"
    else:
        bterm = f"{_render_rational(b)}*sqrt({dtxt})"
    if a == 0:
        return bterm
    joiner = "" if bterm.startswith("-") else "+"
    return f"{_render_rational(a)}{joiner}{bterm}"


def render_scalar(x):
    """Canonical text form of a field element."""
    field = x.field
    if field.kind != COMPLEXIFIED:
        return _render_real(field, x.coords)
    sub = field.real_subfield()
    half = len(x.coords) // 2
    re_txt = _render_real(sub, x.coords[:half])
    im = x.coords[half:]
    if all(c == 0 for c in im):
        return re_txt
    im_txt = _render_real(sub, im)
    if im_txt == "1":
        iterm = "i"
    elif im_txt == "-1":
        iterm = "-i"
    elif _needs_parens(im_txt):
        iterm = f"({im_txt})*i"
    else:
        iterm = f"{im_txt}*i"
    if all(c == 0 for c in x.coords[:half]):
        return iterm
    if _needs_parens(re_txt):
        re_txt = f"({re_txt})"
    joiner = "" if iterm.startswith("-") else "+"
    return f"{re_txt}{joiner}{iterm}"
