"""Dense exact linear algebra over the package's scalar fields.

Matrices act on column vectors.  Entries are Fractions or Quad scalars;
integer inputs are normalized to Fractions at construction so that no
int/int division can ever produce a float.  Elimination is plain Gaussian
elimination over the field, which is exact here.
"""

from __future__ import annotations

from fractions import Fraction

from .exceptions import IncompatibleShapes


def _norm(x):
    return Fraction(x) if isinstance(x, int) else x


class Matrix:
    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows, ncols=None):
        rows = [[_norm(x) for x in row] for row in rows]
        self.rows = rows
        self.nrows = len(rows)
        if rows:
            self.ncols = len(rows[0])
            if any(len(r) != self.ncols for r in rows):
                raise IncompatibleShapes("ragged rows")
            if ncols is not None and ncols != self.ncols:
                raise IncompatibleShapes("ncols mismatch")
        else:
            self.ncols = 0 if ncols is None else ncols

    # -- constructors ----------------------------------------------------------

    @classmethod
    def zeros(cls, nrows, ncols):
        z = Fraction(0)
        return cls([[z] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, n):
        z, o = Fraction(0), Fraction(1)
        return cls([[o if i == j else z for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, cols, nrows):
        if not cols:
            return cls.zeros(nrows, 0)
        return cls([[col[i] for col in cols] for i in range(nrows)], len(cols))

    def copy(self):
        return Matrix([row[:] for row in self.rows], self.ncols)

    # -- basic structure --------------------------------------------------------

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j):
        return [row[j] for row in self.rows]

    def columns(self):
        return [self.column(j) for j in range(self.ncols)]

    def transpose(self):
        return Matrix([[self.rows[i][j] for i in range(self.nrows)]
                       for j in range(self.ncols)], self.nrows)

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.nrows == other.nrows
                and self.ncols == other.ncols and self.rows == other.rows)

    def __hash__(self):
        return hash((self.nrows, self.ncols,
                     tuple(tuple(r) for r in self.rows)))

    def is_zero(self):
        return all(x == 0 for row in self.rows for x in row)

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols})"

    # -- arithmetic --------------------------------------------------------------

    def __add__(self, other):
        if self.nrows != other.nrows or self.ncols != other.ncols:
            raise IncompatibleShapes(f"{self!r} + {other!r}")
        return Matrix([[a + b for a, b in zip(r1, r2)]
                       for r1, r2 in zip(self.rows, other.rows)], self.ncols)

    def __sub__(self, other):
        if self.nrows != other.nrows or self.ncols != other.ncols:
            raise IncompatibleShapes(f"{self!r} - {other!r}")
        return Matrix([[a - b for a, b in zip(r1, r2)]
                       for r1, r2 in zip(self.rows, other.rows)], self.ncols)

    def __neg__(self):
        return Matrix([[-a for a in row] for row in self.rows], self.ncols)

    def scale(self, c):
        c = _norm(c)
        return Matrix([[c * a for a in row] for row in self.rows], self.ncols)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise IncompatibleShapes(f"{self!r} @ {other!r}")
            ot = other.transpose().rows
            out = []
            for row in self.rows:
                out.append([_dot(row, col) for col in ot])
            return Matrix(out, other.ncols)
        # column vector as list
        if self.ncols != len(other):
            raise IncompatibleShapes(f"{self!r} @ vector[{len(other)}]")
        other = [_norm(x) for x in other]
        return [_dot(row, other) for row in self.rows]

    def hstack(self, other):
        if self.nrows != other.nrows:
            raise IncompatibleShapes("hstack row mismatch")
        return Matrix([r1 + r2 for r1, r2 in zip(self.rows, other.rows)],
                      self.ncols + other.ncols)

    def vstack(self, other):
        if self.ncols != other.ncols:
            raise IncompatibleShapes("vstack column mismatch")
        return Matrix([row[:] for row in self.rows]
                      + [row[:] for row in other.rows], self.ncols)

    # -- elimination ---------------------------------------------------------------

    def rref(self):
        """Reduced row echelon form; returns (matrix, pivot column list)."""
        m = [row[:] for row in self.rows]
        nr, nc = self.nrows, self.ncols
        pivots = []
        r = 0
        for c in range(nc):
            if r >= nr:
                break
            p = None
            for i in range(r, nr):
                if m[i][c] != 0:
                    p = i
                    break
            if p is None:
                continue
            m[r], m[p] = m[p], m[r]
            pv = m[r][c]
            if pv != 1:
                m[r] = [x / pv for x in m[r]]
            for i in range(nr):
                if i != r and m[i][c] != 0:
                    f = m[i][c]
                    mi, mr = m[i], m[r]
                    for j in range(c, nc):
                        if mr[j] != 0:
                            mi[j] = mi[j] - f * mr[j]
            pivots.append(c)
            r += 1
        return Matrix(m, nc), pivots

    def rank(self):
        return len(self.rref()[1])

    def kernel(self):
        """Basis of the null space, as a list of column vectors."""
        red, pivots = self.rref()
        free = [c for c in range(self.ncols) if c not in pivots]
        basis = []
        for fc in free:
            v = [Fraction(0)] * self.ncols
            v[fc] = Fraction(1)
            for r, pc in enumerate(pivots):
                v[pc] = -red.rows[r][fc]
            basis.append(v)
        return basis

    def kernel_matrix(self):
        return Matrix.from_columns(self.kernel(), self.ncols)

    def solve(self, b):
        """One solution x of self @ x = b, or None if inconsistent."""
        sol = self.solve_many(Matrix.from_columns([b], self.nrows))
        return None if sol is None else sol.column(0)

    def solve_many(self, B):
        """Solve self @ X = B columnwise; None if any column is inconsistent."""
        if B.nrows != self.nrows:
            raise IncompatibleShapes("solve shape mismatch")
        aug = self.hstack(B)
        red, pivots = aug.rref()
        n = self.ncols
        # consistency: no pivot in the augmented block
        for c in pivots:
            if c >= n:
                return None
        cols = []
        for k in range(B.ncols):
            x = [Fraction(0)] * n
            for r, pc in enumerate(pivots):
                x[pc] = red.rows[r][n + k]
            cols.append(x)
        return Matrix.from_columns(cols, n)

    def inverse(self):
        if self.nrows != self.ncols:
            raise IncompatibleShapes("inverse of non-square matrix")
        inv = self.solve_many(Matrix.identity(self.nrows))
        if inv is None:
            raise IncompatibleShapes("matrix not invertible")
        return inv

    def det(self):
        if self.nrows != self.ncols:
            raise IncompatibleShapes("det of non-square matrix")
        m = [row[:] for row in self.rows]
        n = self.nrows
        d = Fraction(1)
        for c in range(n):
            p = None
            for i in range(c, n):
                if m[i][c] != 0:
                    p = i
                    break
            if p is None:
                return Fraction(0)
            if p != c:
                m[c], m[p] = m[p], m[c]
                d = -d
            d = d * m[c][c]
            pv = m[c][c]
            for i in range(c + 1, n):
                if m[i][c] != 0:
                    f = m[i][c] / pv
                    for j in range(c, n):
                        m[i][j] = m[i][j] - f * m[c][j]
        return d

    def column_space_pivots(self):
        """Indices of a maximal independent subset of columns."""
        return self.rref()[1]


def _dot(xs, ys):
    tot = None
    for x, y in zip(xs, ys):
        if x == 0 or y == 0:
            continue
        tot = x * y if tot is None else tot + x * y
    return Fraction(0) if tot is None else tot


# -- vector helpers ---------------------------------------------------------------

def vec(xs):
    return [_norm(x) for x in xs]

def vadd(u, v):
    return [a + b for a, b in zip(u, v)]

def vsub(u, v):
    return [a - b for a, b in zip(u, v)]

def vscale(c, u):
    c = _norm(c)
    return [c * a for a in u]

def vdot(u, v):
    return _dot([_norm(x) for x in u], [_norm(y) for y in v])

def vzero(u):
    return all(x == 0 for x in u)


def complement_pivots(span_cols, dim):
    """Greedy standard-basis completion of a subspace.

    Returns the lexicographically first indices i such that the standard
    vectors e_i complete span(span_cols) to the full space.
    """
    cols = list(span_cols)
    chosen = []
    base_rank = Matrix.from_columns(cols, dim).rank() if cols else 0
    for i in range(dim):
        e = [Fraction(0)] * dim
        e[i] = Fraction(1)
        test = Matrix.from_columns(cols + [e], dim)
        if test.rank() > base_rank:
            cols.append(e)
            chosen.append(i)
            base_rank += 1
        if base_rank == dim:
            break
    return chosen
