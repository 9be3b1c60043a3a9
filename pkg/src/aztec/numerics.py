"""Exact arithmetic: Gaussian rationals and dense rational matrices.

All combinatorial identities in this package are checked exactly, so the
linear algebra layer works over Q(i) rather than floats.  Entries of an
ExactMatrix may be int, fractions.Fraction, or GaussianRational; the three
types mix freely because GaussianRational implements the full reflected
operator set.  Floating point never enters here.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DimensionError, SingularMatrixError

_RATIONAL = (int, Fraction)


class GaussianRational:
    """A complex number re + im*i with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}*i"

    # -- coercion -----------------------------------------------------------

    @staticmethod
    def _coerce(value):
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, _RATIONAL):
            return GaussianRational(value)
        return None

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(
            (self.re * o.re + self.im * o.im) / d,
            (self.im * o.re - self.re * o.im) / d,
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return 1 / (self ** (-k))
        out = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    # -- comparison and structure -------------------------------------------

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def abs2(self):
        """Squared modulus, as an exact Fraction."""
        return self.re * self.re + self.im * self.im

    def exact_abs(self):
        """Exact modulus for numbers on the real or imaginary axis.

        The determinants arising from planar dimer matrices are always a
        fourth root of unity times a positive rational, so this covers
        every case the package produces.  Raises ValueError when the
        modulus would be irrational.
        """
        if self.im == 0:
            return abs(self.re)
        if self.re == 0:
            return abs(self.im)
        raise ValueError(f"modulus of {self} is irrational")

    def __complex__(self):
        return complex(float(self.re), float(self.im))


I_UNIT = GaussianRational(0, 1)


def i_pow(k: int) -> GaussianRational:
    """i**k for any integer k, reduced mod 4."""
    return (GaussianRational(1), I_UNIT, GaussianRational(-1), -I_UNIT)[k % 4]


def as_fraction(value) -> Fraction:
    """Coerce an exact scalar to Fraction, rejecting nonreal values."""
    if isinstance(value, GaussianRational):
        if value.im != 0:
            raise ValueError(f"{value} has a nonzero imaginary part")
        return value.re
    return Fraction(value)


def exact_abs(value) -> Fraction:
    """|value| for exact scalars lying on the real or imaginary axis."""
    if isinstance(value, GaussianRational):
        return value.exact_abs()
    return abs(Fraction(value))


def _div(a, b):
    # int / int would fall back to float division; everything else stays exact
    if isinstance(a, int) and isinstance(b, int):
        return Fraction(a, b)
    return a / b


class ExactMatrix:
    """Dense matrix over exact scalars (int, Fraction, GaussianRational).

    Rows are stored as nested lists.  The class keeps arithmetic simple
    and transparent; everything here is small enough that cubic
    elimination with exact pivoting is the right tool.
    """

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows):
        rows = [list(r) for r in rows]
        if not rows:
            raise DimensionError("matrix needs at least one row")
        width = len(rows[0])
        if width == 0:
            raise DimensionError("matrix needs at least one column")
        if any(len(r) != width for r in rows):
            raise DimensionError("ragged rows")
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = width

    # -- constructors ---------------------------------------------------

    @classmethod
    def identity(cls, n):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, nrows, ncols=None):
        if ncols is None:
            ncols = nrows
        return cls([[0] * ncols for _ in range(nrows)])

    @classmethod
    def diagonal(cls, entries):
        entries = list(entries)
        n = len(entries)
        out = cls.zeros(n)
        for i, e in enumerate(entries):
            out.rows[i][i] = e
        return out

    @classmethod
    def block(cls, grid):
        """Assemble from a 2d grid of conforming ExactMatrix blocks."""
        rows = []
        for band in grid:
            height = band[0].nrows
            if any(b.nrows != height for b in band):
                raise DimensionError("block heights differ within a band")
            for i in range(height):
                row = []
                for b in band:
                    row.extend(b.rows[i])
                rows.append(row)
        return cls(rows)

    # -- access -----------------------------------------------------------

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, key):
        i, j = key
        return self.rows[i][j]

    def __setitem__(self, key, value):
        i, j = key
        self.rows[i][j] = value

    def copy(self):
        return ExactMatrix([list(r) for r in self.rows])

    def submatrix(self, row_indices, col_indices):
        row_indices = list(row_indices)
        col_indices = list(col_indices)
        return ExactMatrix(
            [[self.rows[i][j] for j in col_indices] for i in row_indices]
        )

    def transpose(self):
        return ExactMatrix(
            [[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)]
        )

    def map(self, fn):
        return ExactMatrix([[fn(e) for e in row] for row in self.rows])

    def __iter__(self):
        return iter(self.rows)

    def __repr__(self):
        body = ",\n             ".join(
            "[" + ", ".join(str(e) for e in row) + "]" for row in self.rows
        )
        return f"ExactMatrix([{body}])"

    # -- arithmetic ---------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        return all(
            self.rows[i][j] == other.rows[i][j]
            for i in range(self.nrows)
            for j in range(self.ncols)
        )

    def __add__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")
        return ExactMatrix(
            [
                [self.rows[i][j] + other.rows[i][j] for j in range(self.ncols)]
                for i in range(self.nrows)
            ]
        )

    def __sub__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")
        return ExactMatrix(
            [
                [self.rows[i][j] - other.rows[i][j] for j in range(self.ncols)]
                for i in range(self.nrows)
            ]
        )

    def __neg__(self):
        return self.map(lambda e: -e)

    def scale(self, scalar):
        return self.map(lambda e: scalar * e)

    def __matmul__(self, other):
        return self.__mul__(other)

    def __mul__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.ncols != other.nrows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        for i in range(self.nrows):
            srow = self.rows[i]
            orow = []
            for j in range(other.ncols):
                acc = 0
                for k in range(self.ncols):
                    s = srow[k]
                    if s == 0:
                        continue
                    acc = acc + s * other.rows[k][j]
                orow.append(acc)
            out.append(orow)
        return ExactMatrix(out)

    def trace(self):
        if self.nrows != self.ncols:
            raise DimensionError("trace of a nonsquare matrix")
        acc = 0
        for i in range(self.nrows):
            acc = acc + self.rows[i][i]
        return acc

    # -- elimination ---------------------------------------------------------

    def det(self):
        """Exact determinant by Gaussian elimination with row swaps."""
        if self.nrows != self.ncols:
            raise DimensionError("determinant of a nonsquare matrix")
        n = self.nrows
        work = [list(r) for r in self.rows]
        sign = 1
        for col in range(n):
            pivot_row = None
            for i in range(col, n):
                if work[i][col] != 0:
                    pivot_row = i
                    break
            if pivot_row is None:
                return Fraction(0)
            if pivot_row != col:
                work[col], work[pivot_row] = work[pivot_row], work[col]
                sign = -sign
            pivot = work[col][col]
            for i in range(col + 1, n):
                factor = work[i][col]
                if factor == 0:
                    continue
                ratio = _div(factor, pivot)
                row = work[i]
                base = work[col]
                for j in range(col, n):
                    row[j] = row[j] - ratio * base[j]
        out = Fraction(sign)
        for i in range(n):
            out = out * work[i][i]
        return out

    def inverse(self):
        """Exact inverse by Gauss-Jordan elimination."""
        if self.nrows != self.ncols:
            raise DimensionError("inverse of a nonsquare matrix")
        n = self.nrows
        work = [list(self.rows[i]) + [1 if j == i else 0 for j in range(n)] for i in range(n)]
        for col in range(n):
            pivot_row = None
            for i in range(col, n):
                if work[i][col] != 0:
                    pivot_row = i
                    break
            if pivot_row is None:
                raise SingularMatrixError(f"matrix is singular (rank < {n})")
            if pivot_row != col:
                work[col], work[pivot_row] = work[pivot_row], work[col]
            pivot = work[col][col]
            base = work[col]
            for j in range(col, 2 * n):
                base[j] = _div(base[j], pivot)
            for i in range(n):
                if i == col:
                    continue
                factor = work[i][col]
                if factor == 0:
                    continue
                row = work[i]
                for j in range(col, 2 * n):
                    row[j] = row[j] - factor * base[j]
        return ExactMatrix([row[n:] for row in work])

    def is_lower_triangular(self):
        return all(
            self.rows[i][j] == 0
            for i in range(self.nrows)
            for j in range(i + 1, self.ncols)
        )

    def is_upper_triangular(self):
        return all(
            self.rows[i][j] == 0
            for i in range(self.nrows)
            for j in range(min(i, self.ncols))
        )

    def triangular_inverse(self):
        """Inverse of a triangular matrix by exact substitution.

        Detects the orientation itself; diagonal matrices take the lower
        branch.  Substitution keeps the triangular shape, which the
        windowed operator layer relies on.
        """
        if self.nrows != self.ncols:
            raise DimensionError("inverse of a nonsquare matrix")
        n = self.nrows
        if self.is_lower_triangular():
            lower = True
        elif self.is_upper_triangular():
            lower = False
        else:
            raise DimensionError("matrix is not triangular")
        for i in range(n):
            if self.rows[i][i] == 0:
                raise SingularMatrixError("zero on the diagonal of a triangular matrix")
        inv = ExactMatrix.zeros(n)
        if lower:
            for j in range(n):
                inv.rows[j][j] = _div(1, self.rows[j][j])
                for i in range(j + 1, n):
                    acc = 0
                    for k in range(j, i):
                        acc = acc + self.rows[i][k] * inv.rows[k][j]
                    inv.rows[i][j] = _div(-acc, self.rows[i][i])
        else:
            for j in range(n - 1, -1, -1):
                inv.rows[j][j] = _div(1, self.rows[j][j])
                for i in range(j - 1, -1, -1):
                    acc = 0
                    for k in range(i + 1, j + 1):
                        acc = acc + self.rows[i][k] * inv.rows[k][j]
                    inv.rows[i][j] = _div(-acc, self.rows[i][i])
        return inv
