"""Canonical text forms for scalars, polynomials and Laurent jets.

The grammar is deliberately strict: what render_* emits is exactly what
parse_* accepts (plus harmless whitespace), so documents round-trip
bit-exactly.

    scalar      1/2   -3   1/2+3/4*sqrt(2)   (1-sqrt(2))+2*i
    polynomial  1 + 1/2*x - x^3 + (1+i)*x^2
    jet         x^-2*(1 + 1/2*x) @order 5     0 @order 3
"""

from .errors import ParseError
from .field import (
    COMPLEXIFIED,
    FieldElement,
    i_of,
    render_scalar,
    sqrt_d_of,
    zero_of,
    one_of,
)
from .poly import FieldPolynomial
from .rationals import QQ


# -- tokenizer ----------------------------------------------------------

_SYMBOLS = "+-*/^()@"


def _tokenize(text):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _SYMBOLS:
            tokens.append((ch, ch, i))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("int", text[i:j], i))
            i = j
            continue
        if ch.isalpha():
            j = i
            while j < n and text[j].isalnum():
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", column=i + 1)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    """Parses expressions in Q[.., sqrt(d), i][x, x^-1] into sparse dicts."""

    def __init__(self, text, field):
        self.text = text
        self.field = field
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(
                f"expected {kind!r}, found {tok[1]!r}", column=tok[2] + 1
            )
        return tok

    def fail(self, message):
        tok = self.peek()
        raise ParseError(message, column=tok[2] + 1)

    # dicts map x-power -> FieldElement

    def parse_expression(self):
        sign = 1
        if self.peek()[0] in "+-":
            sign = -1 if self.next()[0] == "-" else 1
        acc = self._scaled(self.parse_term(), sign)
        while self.peek()[0] in "+-":
            sign = -1 if self.next()[0] == "-" else 1
            term = self.parse_term()
            for k, v in term.items():
                v = -v if sign < 0 else v
                acc[k] = acc.get(k, zero_of(self.field)) + v
        return acc

    def _scaled(self, d, sign):
        if sign >= 0:
            return d
        return {k: -v for k, v in d.items()}

    def parse_term(self):
        acc = self.parse_factor()
        while self.peek()[0] == "*":
            self.next()
            rhs = self.parse_factor()
            out = {}
            for ka, va in acc.items():
                for kb, vb in rhs.items():
                    k = ka + kb
                    prod = va * vb
                    out[k] = out.get(k, zero_of(self.field)) + prod
            acc = out
        return acc

    def parse_factor(self):
        kind, value, col = self.peek()
        if kind == "int":
            self.next()
            num = int(value)
            if self.peek()[0] == "/":
                self.next()
                den = self.expect("int")
                q = QQ(num, int(den[1]))
            else:
                q = QQ(num)
            return {0: FieldElement.of(q, self.field)}
        if kind == "(":
            self.next()
            inner = self.parse_expression()
            self.expect(")")
            return inner
        if kind == "name":
            if value == "sqrt":
                self.next()
                self.expect("(")
                tok = self.expect("int")
                num = int(tok[1])
                if self.peek()[0] == "/":
                    self.next()
                    den = self.expect("int")
                    radicand = QQ(num, int(den[1]))
                else:
                    radicand = QQ(num)
                self.expect(")")
                if self.field.d is None or radicand != self.field.d:
                    raise ParseError(
                        f"sqrt({radicand}) is not in the declared field",
                        column=col + 1,
                    )
                return {0: sqrt_d_of(self.field)}
            if value == "i":
                self.next()
                if self.field.kind != COMPLEXIFIED:
                    raise ParseError("i is not in the declared field", column=col + 1)
                return {0: i_of(self.field)}
            if value == "x":
                self.next()
                power = 1
                if self.peek()[0] == "^":
                    self.next()
                    sign = 1
                    if self.peek()[0] == "-":
                        self.next()
                        sign = -1
                    tok = self.expect("int")
                    power = sign * int(tok[1])
                return {power: one_of(self.field)}
            self.fail(f"unknown symbol {value!r}")
        self.fail(f"unexpected token {value!r}")

    def at_end(self):
        return self.peek()[0] == "end"


def _parse_sparse(text, field, stop_at_order=False):
    parser = _Parser(text, field)
    sparse = parser.parse_expression()
    order = None
    if stop_at_order and parser.peek()[0] == "@":
        parser.next()
        tok = parser.expect("name")
        if tok[1] != "order":
            raise ParseError("expected 'order' after '@'", column=tok[2] + 1)
        sign = 1
        if parser.peek()[0] == "-":
            parser.next()
            sign = -1
        order = sign * int(parser.expect("int")[1])
    if not parser.at_end():
        parser.fail("trailing input")
    sparse = {k: v for k, v in sparse.items() if not v.is_zero()}
    return sparse, order


def parse_scalar(text, field):
    """Parse a canonical scalar text form into a FieldElement."""
    sparse, _ = _parse_sparse(text, field)
    if any(k != 0 for k in sparse):
        raise ParseError("scalar expected, found powers of x")
    return sparse.get(0, zero_of(field))


def parse_polynomial(text, field):
    sparse, _ = _parse_sparse(text, field)
    if any(k < 0 for k in sparse):
        raise ParseError("polynomial expected, found negative powers of x")
    degree = max(sparse, default=-1)
    coeffs = [sparse.get(k, zero_of(field)) for k in range(degree + 1)]
    return FieldPolynomial(field, coeffs)


def parse_jet(text, field, default_order=None):
    """Parse a Laurent jet text form; returns a LaurentJet.

    The guaranteed order is taken from a trailing "@order N" or, failing
    that, from ``default_order`` (None meaning exact).
    """
    from .jets import LaurentJet, ORDER_INF

    sparse, order = _parse_sparse(text, field, stop_at_order=True)
    if order is None:
        order = ORDER_INF if default_order is None else default_order
    if sparse:
        val = min(sparse)
        top = max(sparse)
        if top > order:
            raise ParseError(
                f"coefficient at degree {top} lies beyond declared order {order}"
            )
        coeffs = [sparse.get(k, zero_of(field)) for k in range(val, top + 1)]
        return LaurentJet(field, val, coeffs, order)
    return LaurentJet(field, None, (), order)


# -- rendering ----------------------------------------------------------


def _render_term(coeff_txt, power, compound):
    if power == 0:
        return f"({coeff_txt})" if compound else coeff_txt
    xpart = "x" if power == 1 else f"x^{power}"
    if coeff_txt == "1":
        return xpart
    if coeff_txt == "-1":
        return f"-{xpart}"
    if compound:
        return f"({coeff_txt})*{xpart}"
    return f"{coeff_txt}*{xpart}"


def _sparse_to_text(pairs):
    """pairs: iterable of (power, FieldElement) in emission order."""
    parts = []
    for power, coeff in pairs:
        if coeff.is_zero():
            continue
        txt = render_scalar(coeff)
        compound = _has_toplevel_sign(txt)
        term = _render_term(txt, power, compound)
        if not parts:
            parts.append(term)
        elif term.startswith("-"):
            parts.append(" - " + term[1:])
        else:
            parts.append(" + " + term)
    return "".join(parts) if parts else "0"


def _has_toplevel_sign(text):
    depth = 0
    for ch in text[1:]:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0:
            return True
    return False


def render_polynomial(p):
    return _sparse_to_text(enumerate(p.coeffs))


def render_jet(jet, with_order=True):
    """Canonical jet text "x^v*(c0 + c1*x + ...) @order N"."""
    from .jets import ORDER_INF

    if jet.valuation is None:
        body = "0"
    else:
        inner = _sparse_to_text(enumerate(jet.coeffs))
        if jet.valuation == 0:
            body = inner if len(jet.coeffs) == 1 and "+" not in inner and " - " not in inner else f"({inner})"
        else:
            body = f"x^{jet.valuation}*({inner})"
    if with_order and jet.order != ORDER_INF:
        return f"{body} @order {jet.order}"
    return body
