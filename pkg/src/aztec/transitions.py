"""Windowed integer-indexed operators and the path transition calculus.

The path picture turns each column strip into a doubly infinite matrix:
even strips are lower bidiagonal with the a's on the diagonal and the
b's below, odd strips are the lower all-ones matrix.  Everything here
is computed on a finite index window with an explicit exactness flag
telling whether the windowed entries coincide with those of the
infinite operator.  For products the flag follows a band-containment
rule; products of lower-triangular factors are always certified, which
is what the transition products need.

The finite-size correlation kernel lives here too.  Its indicator term
is carried by the pair ordering with the earlier column first,
K(m1, x1, m2, x2) containing -[m1 < m2] (M_{m1} ... M_{m2-1})(x1, x2);
the determinantal property of this convention is pinned against
brute-force enumeration in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import CapacityError, ConfigError, DimensionError, DomainError, ExtentError
from .numerics import ExactMatrix
from .weights import WeightField


@dataclass(frozen=True)
class IndexWindow:
    """Inclusive integer interval [lo, hi] indexing operator rows/cols."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.hi < self.lo:
            raise ExtentError(f"empty index window [{self.lo}, {self.hi}]")

    @property
    def size(self):
        return self.hi - self.lo + 1

    def indices(self):
        return range(self.lo, self.hi + 1)

    def __contains__(self, j):
        return self.lo <= j <= self.hi

    def position(self, j):
        if j not in self:
            raise ExtentError(f"index {j} outside window [{self.lo}, {self.hi}]")
        return j - self.lo


def _lookup(row, j):
    return row(j) if callable(row) else row[j]


class WindowedOperator:
    """A finite window of a doubly infinite matrix.

    dmin and dmax bound the diagonal structure: entries vanish unless
    dmin <= col - row <= dmax, with None meaning unbounded on that
    side.  exact records whether the windowed entries agree with the
    infinite operator; binary operations propagate it.
    """

    def __init__(self, window: IndexWindow, entries: ExactMatrix, dmin, dmax, exact=True):
        if entries.shape != (window.size, window.size):
            raise DimensionError("entry matrix does not match the window")
        self.window = window
        self.entries = entries
        self.dmin = dmin
        self.dmax = dmax
        self.exact = exact

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_rule(cls, window: IndexWindow, rule, dmin, dmax, exact=True):
        entries = ExactMatrix(
            [[rule(j, k) for k in window.indices()] for j in window.indices()]
        )
        return cls(window, entries, dmin, dmax, exact)

    @classmethod
    def identity(cls, window: IndexWindow):
        return cls(window, ExactMatrix.identity(window.size), 0, 0)

    # -- access ---------------------------------------------------------

    def entry(self, j, k):
        return self.entries[self.window.position(j), self.window.position(k)]

    @property
    def structure(self):
        if self.dmin is None and self.dmax is None:
            return "general"
        if self.dmin is None:
            return "lower" if self.dmax <= 0 else "general"
        if self.dmax is None:
            return "upper" if self.dmin >= 0 else "general"
        return f"banded[{self.dmin},{self.dmax}]"

    def restrict(self, window: IndexWindow) -> "WindowedOperator":
        if window.lo < self.window.lo or window.hi > self.window.hi:
            raise ExtentError("restriction window exceeds the parent window")
        idx = [self.window.position(j) for j in window.indices()]
        return WindowedOperator(
            window, self.entries.submatrix(idx, idx), self.dmin, self.dmax, self.exact
        )

    def to_matrix(self) -> ExactMatrix:
        return self.entries.copy()

    def __eq__(self, other):
        return (
            isinstance(other, WindowedOperator)
            and self.window == other.window
            and self.entries == other.entries
        )

    # -- algebra ----------------------------------------------------------

    def _require_same_window(self, other):
        if self.window != other.window:
            raise ExtentError("operators live on different windows")

    def __add__(self, other):
        self._require_same_window(other)
        dmin = None if self.dmin is None or other.dmin is None else min(self.dmin, other.dmin)
        dmax = None if self.dmax is None or other.dmax is None else max(self.dmax, other.dmax)
        return WindowedOperator(
            self.window,
            self.entries + other.entries,
            dmin,
            dmax,
            self.exact and other.exact,
        )

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return WindowedOperator(self.window, -self.entries, self.dmin, self.dmax, self.exact)

    def __mul__(self, other):
        if not isinstance(other, WindowedOperator):
            return NotImplemented
        self._require_same_window(other)
        certified = self.exact and other.exact
        if certified:
            certified = self._product_certified(other)
        dmin = None if self.dmin is None or other.dmin is None else self.dmin + other.dmin
        dmax = None if self.dmax is None or other.dmax is None else self.dmax + other.dmax
        return WindowedOperator(
            self.window, self.entries * other.entries, dmin, dmax, certified
        )

    def _product_certified(self, other) -> bool:
        """Band containment: every needed summation index lies in-window.

        The (j, k) entry of the product sums over m with
        j + dminA <= m <= j + dmaxA and k - dmaxB <= m <= k - dminB;
        the entry is exact when that range (if nonempty) sits inside
        the window.  Unbounded ranges can never be certified.
        """
        lo, hi = self.window.lo, self.window.hi
        for j in self.window.indices():
            for k in self.window.indices():
                lower = None
                if self.dmin is not None:
                    lower = j + self.dmin
                if other.dmax is not None:
                    cand = k - other.dmax
                    lower = cand if lower is None else max(lower, cand)
                upper = None
                if self.dmax is not None:
                    upper = j + self.dmax
                if other.dmin is not None:
                    cand = k - other.dmin
                    upper = cand if upper is None else min(upper, cand)
                if lower is None or upper is None:
                    return False
                if lower > upper:
                    continue
                if lower < lo or upper > hi:
                    return False
        return True


def phi_operator(a_row, b_row, window: IndexWindow) -> WindowedOperator:
    """Even-strip transition D(a) + D(b)S: a_j on the diagonal, b_j below."""

    def rule(j, k):
        if k == j:
            return _lookup(a_row, j)
        if k == j - 1:
            return _lookup(b_row, j)
        return Fraction(0)

    return WindowedOperator.from_rule(window, rule, -1, 0)


def psi_operator(window: IndexWindow) -> WindowedOperator:
    """Odd-strip transition: ones on and below the diagonal."""
    return WindowedOperator.from_rule(
        window, lambda j, k: Fraction(1 if k <= j else 0), None, 0
    )


def psi_inverse_operator(window: IndexWindow) -> WindowedOperator:
    """I - S, the two-band inverse of the all-ones lower triangle."""
    return WindowedOperator.from_rule(
        window,
        lambda j, k: Fraction(1 if k == j else (-1 if k == j - 1 else 0)),
        -1,
        0,
    )


def shift_operator(window: IndexWindow, power: int = 1) -> WindowedOperator:
    """S^power with S(j, k) = [k = j - 1]; negative powers shift upward."""
    return WindowedOperator.from_rule(
        window, lambda j, k: Fraction(1 if k == j - power else 0), -power, -power
    )


def diagonal_operator(values, window: IndexWindow) -> WindowedOperator:
    return WindowedOperator.from_rule(
        window, lambda j, k: _lookup(values, j) if k == j else Fraction(0), 0, 0
    )


class TransitionFamily:
    """The 2n alternating strip transitions of a weight field."""

    def __init__(self, field: WeightField, n: int):
        if n < 1:
            raise ConfigError(f"need at least one even strip, got n={n}")
        self.field = field
        self.n = n

    def even_operator(self, i: int, window: IndexWindow) -> WindowedOperator:
        return phi_operator(
            lambda j: self.field.a(i, j), lambda j: self.field.b(i, j), window
        )

    def factor(self, m: int, window: IndexWindow) -> WindowedOperator:
        if not 0 <= m < 2 * self.n:
            raise DimensionError(f"strip index {m} outside 0..{2 * self.n - 1}")
        if m % 2 == 0:
            return self.even_operator(m // 2, window)
        return psi_operator(window)

    def product(self, m_from: int, m_to: int, window: IndexWindow) -> WindowedOperator:
        out = WindowedOperator.identity(window)
        for m in range(m_from, m_to):
            out = out * self.factor(m, window)
        return out

    def v_product(self, window: IndexWindow) -> WindowedOperator:
        return self.product(0, 2 * self.n, window)

    def g_operator(self, window: IndexWindow) -> WindowedOperator:
        """G = V S^{-n}, realized as a column shift of V on a padded window."""
        padded = IndexWindow(window.lo - self.n, window.hi)
        v = self.v_product(padded)
        entries = ExactMatrix(
            [
                [v.entry(j, k - self.n) for k in window.indices()]
                for j in window.indices()
            ]
        )
        return WindowedOperator(window, entries, None, self.n, v.exact)


def product_v(family: TransitionFamily, window: IndexWindow) -> WindowedOperator:
    """V = M_0 Psi M_2 Psi ... , the full left-to-right strip product."""
    return family.v_product(window)


def default_w_window(n: int, p: int) -> IndexWindow:
    return IndexWindow(-(n + p) - 1, n)


def extract_w(v: WindowedOperator, n: int, p: int) -> ExactMatrix:
    """The (n+p)-square matrix W(r,s) = V(n-r, -s) of bridge entries."""
    if not v.exact:
        raise ExtentError("bridge extraction needs certified entries")
    window = v.window
    if n - (n + p) < window.lo or n - 1 > window.hi or -(n + p) < window.lo:
        raise ExtentError(
            f"window [{window.lo},{window.hi}] misses bridge indices for p={p}"
        )
    return ExactMatrix(
        [
            [v.entry(n - r, -s) for s in range(1, n + p + 1)]
            for r in range(1, n + p + 1)
        ]
    )


class DeterminantalKernel:
    """Correlation kernel of a fixed-boundary transition chain.

    factors is the ordered list of strip transitions on one shared
    window; starts and ends fix the entrance and exit heights.  The
    bridge matrix W(r, s) = (product)(starts[r], ends[s]) must be
    invertible.  All factors must be certified lower operators so that
    every windowed product entry is exact.
    """

    def __init__(self, factors, starts, ends):
        if not factors:
            raise DimensionError("at least one transition factor required")
        if len(starts) != len(ends):
            raise DimensionError("starts and ends must pair up")
        self.window = factors[0].window
        for f in factors:
            if f.window != self.window:
                raise ExtentError("kernel factors on mismatched windows")
            if not f.exact or f.dmax is None or f.dmax > 0:
                raise CapacityError("kernel factors must be certified lower operators")
        self.factors = list(factors)
        self.starts = list(starts)
        self.ends = list(ends)
        m = len(factors)
        prefix = [WindowedOperator.identity(self.window)]
        for f in self.factors:
            prefix.append(prefix[-1] * f)
        suffix = [WindowedOperator.identity(self.window)]
        for f in reversed(self.factors):
            suffix.append(f * suffix[-1])
        self.prefix = prefix  # prefix[m] = M_0 ... M_{m-1}
        self.suffix = list(reversed(suffix))  # suffix[m] = M_m ... M_{M-1}
        self.w_matrix = ExactMatrix(
            [[self.prefix[m].entry(r, s) for s in self.ends] for r in self.starts]
        )
        self.w_inverse = self.w_matrix.inverse()
        self._between = {}

    @property
    def columns(self):
        return len(self.factors) + 1

    def _transition(self, m_from, m_to):
        key = (m_from, m_to)
        if key not in self._between:
            out = WindowedOperator.identity(self.window)
            for m in range(m_from, m_to):
                out = out * self.factors[m]
            self._between[key] = out
        return self._between[key]

    def __call__(self, m1, x1, m2, x2) -> Fraction:
        last = len(self.factors)
        if not (0 <= m1 <= last and 0 <= m2 <= last):
            raise DomainError(f"columns must lie in 0..{last}")
        count = len(self.starts)
        left = self.suffix[m1]
        right = self.prefix[m2]
        total = Fraction(0)
        for s in range(count):
            for r in range(count):
                total += (
                    left.entry(x1, self.ends[s])
                    * self.w_inverse[s, r]
                    * right.entry(self.starts[r], x2)
                )
        if m1 < m2:
            total -= self._transition(m1, m2).entry(x1, x2)
        return total

    def matrix(self, points) -> ExactMatrix:
        points = list(points)
        return ExactMatrix(
            [[self(m1, x1, m2, x2) for (m2, x2) in points] for (m1, x1) in points]
        )

    def correlation(self, points) -> Fraction:
        return self.matrix(points).det()


def tower_kernel(family: TransitionFamily, p: int, window=None) -> DeterminantalKernel:
    """The finite-size kernel for n + p paths of the tower picture."""
    n = family.n
    if window is None:
        window = default_w_window(n, p)
    factors = [family.factor(m, window) for m in range(2 * n)]
    starts = [n - r for r in range(1, n + p + 1)]
    ends = [-s for s in range(1, n + p + 1)]
    return DeterminantalKernel(factors, starts, ends)


def em_kernel_finite(family: TransitionFamily, p: int, query, window=None) -> Fraction:
    """One kernel evaluation K(m1, x1, m2, x2); see DeterminantalKernel."""
    m1, x1, m2, x2 = query
    return tower_kernel(family, p, window)(m1, x1, m2, x2)
