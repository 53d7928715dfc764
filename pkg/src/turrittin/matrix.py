"""Dense exact matrices.

The Matrix container is generic over any ring element supporting +, -, *
(FieldElement, FieldPolynomial, LaurentJet).  The field-specific solvers
(rref, inverse, kernel, characteristic polynomial) assume FieldElement
entries.  All choices (pivoting, kernel bases) are canonical so identical
inputs give identical outputs.
"""

from .errors import LinalgError
from .field import FieldElement, one_of, zero_of
from .poly import FieldPolynomial


class Matrix:
    __slots__ = ("rows",)

    def __init__(self, rows):
        rows = tuple(tuple(r) for r in rows)
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise LinalgError("matrix rows must be non-empty and rectangular")
        object.__setattr__(self, "rows", rows)

    def __setattr__(self, *args):
        raise AttributeError("Matrix is immutable")

    # -- construction ---------------------------------------------------

    @staticmethod
    def identity(n, field):
        one, zero = one_of(field), zero_of(field)
        return Matrix([[one if i == j else zero for j in range(n)] for i in range(n)])

    @staticmethod
    def zero(n, m, field):
        z = zero_of(field)
        return Matrix([[z] * m for _ in range(n)])

    @staticmethod
    def diagonal(values):
        n = len(values)
        zero = zero_of(values[0].field)
        return Matrix(
            [[values[i] if i == j else zero for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def from_blocks(grid):
        """Assemble from a 2D grid of Matrix blocks."""
        rows = []
        for block_row in grid:
            height = block_row[0].nrows
            for i in range(height):
                row = []
                for block in block_row:
                    row.extend(block.rows[i])
                rows.append(row)
        return Matrix(rows)

    # -- shape / access ---------------------------------------------------

    @property
    def nrows(self):
        return len(self.rows)

    @property
    def ncols(self):
        return len(self.rows[0])

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, key):
        i, j = key
        return self.rows[i][j]

    def submatrix(self, row_range, col_range):
        return Matrix(
            [[self.rows[i][j] for j in col_range] for i in row_range]
        )

    def column(self, j):
        return [self.rows[i][j] for i in range(self.nrows)]

    def transpose(self):
        return Matrix(
            [[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)]
        )

    def map(self, fn):
        return Matrix([[fn(x) for x in row] for row in self.rows])

    def entries(self):
        for i, row in enumerate(self.rows):
            for j, x in enumerate(row):
                yield i, j, x

    # -- ring operations --------------------------------------------------

    def __add__(self, other):
        return Matrix(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ]
        )

    def __sub__(self, other):
        return Matrix(
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ]
        )

    def __neg__(self):
        return self.map(lambda x: -x)

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise LinalgError("matrix product shape mismatch")
            cols = other.transpose().rows
            out = []
            for row in self.rows:
                out_row = []
                for col in cols:
                    acc = row[0] * col[0]
                    for a, b in zip(row[1:], col[1:]):
                        acc = acc + a * b
                    out_row.append(acc)
                out.append(out_row)
            return Matrix(out)
        return self.map(lambda x: x * other)

    def scaled(self, s):
        return self.map(lambda x: x * s)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        return all(
            a == b for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb)
        )

    def __hash__(self):
        return hash(self.rows)

    def is_zero(self):
        return all(x.is_zero() for row in self.rows for x in row)

    def __repr__(self):
        body = "; ".join(
            " ".join(str(x) for x in row) for row in self.rows
        )
        return f"<matrix [{body}]>"


def commutator(a, b):
    return a * b - b * a


def direct_sum(blocks):
    """Block-diagonal assembly of square matrices."""
    field = blocks[0].rows[0][0].field
    total = sum(b.nrows for b in blocks)
    grid = []
    offset = 0
    for b in blocks:
        row = []
        before = offset
        after = total - offset - b.nrows
        if before:
            row.append(Matrix.zero(b.nrows, before, field))
        row.append(b)
        if after:
            row.append(Matrix.zero(b.nrows, after, field))
        grid.append(row)
        offset += b.nrows
    return Matrix.from_blocks(grid)


def is_scalar_matrix(m):
    """True when m = c*I for some scalar c."""
    if m.nrows != m.ncols:
        return False
    c = m[0, 0]
    for i in range(m.nrows):
        for j in range(m.ncols):
            x = m[i, j]
            if i == j:
                if x != c:
                    return False
            elif not x.is_zero():
                return False
    return True


def is_diagonal_matrix(m):
    return all(x.is_zero() for i, j, x in m.entries() if i != j)


# -- field solvers (FieldElement entries) --------------------------------


def _field_of(m):
    return m.rows[0][0].field


def rref(m):
    """Reduced row echelon form.  Returns (R, pivot column indices).

    Pivot choice is canonical: first nonzero entry scanning down each
    column in order.
    """
    rows = [list(r) for r in m.rows]
    nr, nc = m.nrows, m.ncols
    pivots = []
    r = 0
    for c in range(nc):
        pivot = None
        for i in range(r, nr):
            if not rows[i][c].is_zero():
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(nr):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return Matrix(rows), pivots


def rank(m):
    return len(rref(m)[1])


def inverse(m):
    if m.nrows != m.ncols:
        raise LinalgError("inverse of a non-square matrix")
    n = m.nrows
    field = _field_of(m)
    aug = Matrix([list(m.rows[i]) + list(Matrix.identity(n, field).rows[i]) for i in range(n)])
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise LinalgError("matrix is singular")
    return red.submatrix(range(n), range(n, 2 * n))


def det(m):
    if m.nrows != m.ncols:
        raise LinalgError("determinant of a non-square matrix")
    rows = [list(r) for r in m.rows]
    n = m.nrows
    field = _field_of(m)
    acc = one_of(field)
    for c in range(n):
        pivot = None
        for i in range(c, n):
            if not rows[i][c].is_zero():
                pivot = i
                break
        if pivot is None:
            return zero_of(field)
        if pivot != c:
            rows[c], rows[pivot] = rows[pivot], rows[c]
            acc = -acc
        acc = acc * rows[c][c]
        inv = rows[c][c].inverse()
        for i in range(c + 1, n):
            if not rows[i][c].is_zero():
                f = rows[i][c] * inv
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[c])]
    return acc


def solve(m, rhs):
    """Solve m X = rhs exactly (rhs a Matrix); raises if inconsistent.

    Underdetermined systems get the canonical solution with free
    variables set to zero.
    """
    field = _field_of(m)
    nr, nc = m.shape
    k = rhs.ncols
    aug = Matrix([list(m.rows[i]) + list(rhs.rows[i]) for i in range(nr)])
    red, pivots = rref(aug)
    if any(p >= nc for p in pivots):
        raise LinalgError("inconsistent linear system")
    sol = [[zero_of(field)] * k for _ in range(nc)]
    for r, c in enumerate(pivots):
        for j in range(k):
            sol[c][j] = red[r, nc + j]
    return Matrix(sol)


def nullspace(m):
    """Canonical kernel basis (columns), from the rref free variables."""
    field = _field_of(m)
    red, pivots = rref(m)
    nc = m.ncols
    free = [c for c in range(nc) if c not in pivots]
    basis = []
    for fc in free:
        vec = [zero_of(field)] * nc
        vec[fc] = one_of(field)
        for r, pc in enumerate(pivots):
            vec[pc] = -red[r, fc]
        basis.append(vec)
    return [Matrix([[x] for x in vec]) for vec in basis]


def charpoly(m):
    """Monic characteristic polynomial det(xI - m), by Faddeev-LeVerrier."""
    if m.nrows != m.ncols:
        raise LinalgError("characteristic polynomial of a non-square matrix")
    n = m.nrows
    field = _field_of(m)
    coeffs = [one_of(field)]  # leading
    mk = m
    ident = Matrix.identity(n, field)
    ck = zero_of(field)
    for k in range(1, n + 1):
        if k > 1:
            mk = m * (mk + ident.scaled(ck))
        trace = mk[0, 0]
        for i in range(1, n):
            trace = trace + mk[i, i]
        ck = -trace * FieldElement.of(1, field) / FieldElement.of(k, field)
        coeffs.append(ck)
    return FieldPolynomial(field, list(reversed(coeffs)))


def evaluate_poly_at_matrix(p, m):
    n = m.nrows
    field = _field_of(m)
    acc = Matrix.zero(n, n, field)
    ident = Matrix.identity(n, field)
    for c in reversed(p.coeffs):
        acc = acc * m + ident.scaled(c)
    return acc
