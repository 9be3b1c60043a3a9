"""Edge-weight and face-weight fields on the two-dimensional parameter grid.

A weight field assigns positive rationals a_{i,j}, b_{i,j} to the
parameter grid, either on a finite index window or doubly periodically
(period q in i, period p in j).  Face fields hold the gauge-invariant
combinations: even faces F_{2i,j} = a_{i,j}/b_{i,j} and odd faces
F_{2i+1,j} = b_{i+1,j+1}/a_{i+1,j}.  The module also normalizes raw
edge weights on the rotated square lattice to the convention in which
both west edges of every black vertex carry weight 1, and checks the
subexponential-decay condition on the ratios a/b that the semi-infinite
factorization theory requires.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ConfigError, ConsistencyError, ExtentError


@dataclass(frozen=True)
class Window:
    """Inclusive index rectangle i_lo..i_hi by j_lo..j_hi."""

    i_lo: int
    i_hi: int
    j_lo: int
    j_hi: int

    def __post_init__(self):
        if self.i_hi < self.i_lo or self.j_hi < self.j_lo:
            raise ConfigError(f"empty window {self}")

    def contains(self, i, j):
        return self.i_lo <= i <= self.i_hi and self.j_lo <= j <= self.j_hi

    @property
    def i_range(self):
        return range(self.i_lo, self.i_hi + 1)

    @property
    def j_range(self):
        return range(self.j_lo, self.j_hi + 1)

    @property
    def height(self):
        return self.j_hi - self.j_lo + 1


@dataclass(frozen=True)
class Periodic:
    """Doubly periodic extent: period q in i, period p in j."""

    q: int
    p: int

    def __post_init__(self):
        if self.q < 1 or self.p < 1:
            raise ConfigError(f"periods must be positive, got {self}")


def _positive_fraction(value, what):
    f = Fraction(value)
    if f <= 0:
        raise ConfigError(f"{what} must be strictly positive, got {f}")
    return f


class WeightField:
    """Positive rational parameters a_{i,j}, b_{i,j} on a window or torus."""

    def __init__(self, extent, a, b):
        self.extent = extent
        if isinstance(extent, Window):
            if extent.height < 2:
                raise ConfigError("window height must be at least 2 (no face fits)")
            self._a = {}
            self._b = {}
            for i in extent.i_range:
                for j in extent.j_range:
                    self._a[i, j] = _positive_fraction(a[i, j], f"a[{i},{j}]")
                    self._b[i, j] = _positive_fraction(b[i, j], f"b[{i},{j}]")
        elif isinstance(extent, Periodic):
            q, p = extent.q, extent.p
            self._a = [
                [_positive_fraction(a[i][j], f"a[{i}][{j}]") for j in range(p)]
                for i in range(q)
            ]
            self._b = [
                [_positive_fraction(b[i][j], f"b[{i}][{j}]") for j in range(p)]
                for i in range(q)
            ]
        else:
            raise ConfigError(f"unknown extent type {type(extent).__name__}")

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_grids(cls, a_rows, b_rows, i_lo=0, j_lo=0):
        """Build a windowed field from row-major nested lists a_rows[i][j]."""
        ni = len(a_rows)
        if ni == 0 or len(b_rows) != ni:
            raise ConfigError("a and b grids must be nonempty and congruent")
        nj = len(a_rows[0])
        window = Window(i_lo, i_lo + ni - 1, j_lo, j_lo + nj - 1)
        a = {
            (i_lo + di, j_lo + dj): a_rows[di][dj]
            for di in range(ni)
            for dj in range(nj)
        }
        b = {
            (i_lo + di, j_lo + dj): b_rows[di][dj]
            for di in range(ni)
            for dj in range(nj)
        }
        return cls(window, a, b)

    @classmethod
    def periodic(cls, a_rows, b_rows):
        """Build a doubly periodic field from q x p nested lists."""
        q = len(a_rows)
        if q == 0 or len(b_rows) != q:
            raise ConfigError("a and b grids must be nonempty and congruent")
        p = len(a_rows[0])
        return cls(Periodic(q, p), a_rows, b_rows)

    @classmethod
    def uniform(cls, a_value, b_value, extent=None):
        """Constant field; defaults to the 1 x 1 periodic extent."""
        if extent is None:
            return cls.periodic([[a_value]], [[b_value]])
        if isinstance(extent, Periodic):
            a = [[a_value] * extent.p for _ in range(extent.q)]
            return cls(extent, a, [[b_value] * extent.p for _ in range(extent.q)])
        a = {(i, j): a_value for i in extent.i_range for j in extent.j_range}
        b = {(i, j): b_value for i in extent.i_range for j in extent.j_range}
        return cls(extent, a, b)

    # -- access -------------------------------------------------------------

    @property
    def is_periodic(self):
        return isinstance(self.extent, Periodic)

    def a(self, i, j) -> Fraction:
        if self.is_periodic:
            return self._a[i % self.extent.q][j % self.extent.p]
        try:
            return self._a[i, j]
        except KeyError:
            raise ExtentError(f"a[{i},{j}] outside window {self.extent}") from None

    def b(self, i, j) -> Fraction:
        if self.is_periodic:
            return self._b[i % self.extent.q][j % self.extent.p]
        try:
            return self._b[i, j]
        except KeyError:
            raise ExtentError(f"b[{i},{j}] outside window {self.extent}") from None

    def covers(self, i_lo, i_hi, j_lo, j_hi) -> bool:
        if self.is_periodic:
            return True
        w = self.extent
        return (
            w.i_lo <= i_lo and i_hi <= w.i_hi and w.j_lo <= j_lo and j_hi <= w.j_hi
        )

    def require_cover(self, i_lo, i_hi, j_lo, j_hi):
        if not self.covers(i_lo, i_hi, j_lo, j_hi):
            raise ExtentError(
                f"field on {self.extent} does not cover "
                f"i in [{i_lo},{i_hi}], j in [{j_lo},{j_hi}]"
            )

    def column_products(self):
        """Per-column products of a/b over one vertical period (periodic only).

        These products are exactly invariant under the hat and check maps,
        which makes them a sharp conservation check for the dynamics.
        """
        if not self.is_periodic:
            raise ConfigError("column products are defined for periodic fields")
        q, p = self.extent.q, self.extent.p
        out = []
        for i in range(q):
            prod = Fraction(1)
            for j in range(p):
                prod *= self._a[i][j] / self._b[i][j]
            out.append(prod)
        return out

    def __eq__(self, other):
        if not isinstance(other, WeightField):
            return NotImplemented
        return self.extent == other.extent and self._a == other._a and self._b == other._b


class FaceField:
    """Face weights F_{k,j}: even k = 2i for trapezoidal faces, odd k = 2i+1.

    For a windowed weight field on i in [i0,i1], j in [j0,j1], even faces
    exist on the full window and odd faces on i in [i0-1, i1-1],
    j in [j0, j1-1] (an odd face only involves parameters of column i+1).
    """

    def __init__(self, extent, even, odd):
        self.extent = extent
        self.even = even
        self.odd = odd

    @property
    def is_periodic(self):
        return isinstance(self.extent, Periodic)

    def value(self, k, j) -> Fraction:
        """Face weight F_{k,j}; k selects the even/odd family."""
        i, parity = divmod(k, 2)
        if self.is_periodic:
            grid = self.odd if parity else self.even
            return grid[i % self.extent.q][j % self.extent.p]
        table = self.odd if parity else self.even
        try:
            return table[i, j]
        except KeyError:
            raise ExtentError(f"face F[{k},{j}] not present") from None

    def __eq__(self, other):
        if not isinstance(other, FaceField):
            return NotImplemented
        return (
            self.extent == other.extent
            and self.even == other.even
            and self.odd == other.odd
        )


def faces_from_weights(w: WeightField) -> FaceField:
    """Face weights of a parameter field.

    Even faces compare the two east edges of a black vertex; odd faces
    compare the b edge one step up with the a edge of the same column,
    F_{2i+1,j} = b_{i+1,j+1} / a_{i+1,j}.
    """
    if w.is_periodic:
        q, p = w.extent.q, w.extent.p
        even = [[w.a(i, j) / w.b(i, j) for j in range(p)] for i in range(q)]
        odd = [
            [w.b(i + 1, j + 1) / w.a(i + 1, j) for j in range(p)] for i in range(q)
        ]
        return FaceField(w.extent, even, odd)
    win = w.extent
    even = {(i, j): w.a(i, j) / w.b(i, j) for i in win.i_range for j in win.j_range}
    odd = {
        (i, j): w.b(i + 1, j + 1) / w.a(i + 1, j)
        for i in range(win.i_lo - 1, win.i_hi)
        for j in range(win.j_lo, win.j_hi)
    }
    return FaceField(win, even, odd)


def weights_from_faces(f: FaceField, seeds=None) -> WeightField:
    """Reconstruct a weight field from its faces, one gauge seed per column.

    Within column i the relations a_{i,j} = F_{2i,j} b_{i,j} and
    b_{i,j+1} = F_{2i-1,j} a_{i,j} propagate upward from the seed value
    b_{i,j0}; seeds default to 1.  For a periodic face field the wrap-around
    value must reproduce the seed row, otherwise the faces are inconsistent
    with any periodic weight field.
    """
    if f.is_periodic:
        q, p = f.extent.q, f.extent.p
        a = [[None] * p for _ in range(q)]
        b = [[None] * p for _ in range(q)]
        for i in range(q):
            seed = Fraction(1) if seeds is None else _positive_fraction(seeds[i], "seed")
            cur_b = seed
            for j in range(p):
                b[i][j] = cur_b
                a[i][j] = f.even[i][j] * cur_b
                cur_b = f.odd[(i - 1) % q][j] * a[i][j]
            if cur_b != seed:
                raise ConsistencyError(
                    f"face column {i} wraps to {cur_b}, seed was {seed}; "
                    "no periodic weight field has these faces"
                )
        return WeightField(f.extent, a, b)

    win = f.extent
    if win.height < 2:
        raise ExtentError("face window too short to anchor a seed row")
    a = {}
    b = {}
    for i in win.i_range:
        seed = Fraction(1) if seeds is None else _positive_fraction(seeds[i], "seed")
        cur_b = seed
        for j in win.j_range:
            b[i, j] = cur_b
            a[i, j] = f.even[i, j] * cur_b
            if j < win.j_hi:
                cur_b = f.odd[i - 1, j] * a[i, j]
    return WeightField(win, a, b)


class RawEdgeWeights:
    """Arbitrary positive weights on the four edges of each black vertex.

    Black vertex (2i, 2j+1) carries weights on its west-up, west-down,
    east-up, and east-down edges; the east pair sits where the normalized
    parameters a_{i,j}, b_{i,j} live.  Grids are indexed like a windowed
    WeightField.
    """

    def __init__(self, window: Window, west_up, west_down, east_up, east_down):
        self.window = window
        self.west_up = {}
        self.west_down = {}
        self.east_up = {}
        self.east_down = {}
        for i in window.i_range:
            for j in window.j_range:
                self.west_up[i, j] = _positive_fraction(west_up[i, j], "west_up")
                self.west_down[i, j] = _positive_fraction(west_down[i, j], "west_down")
                self.east_up[i, j] = _positive_fraction(east_up[i, j], "east_up")
                self.east_down[i, j] = _positive_fraction(east_down[i, j], "east_down")

    @classmethod
    def from_weight_field(cls, w: WeightField):
        """Embed an already-normalized field (west edges all 1)."""
        if w.is_periodic:
            raise ConfigError("raw edge weights need a finite window")
        win = w.extent
        ones = {(i, j): Fraction(1) for i in win.i_range for j in win.j_range}
        a = {(i, j): w.a(i, j) for i in win.i_range for j in win.j_range}
        b = {(i, j): w.b(i, j) for i in win.i_range for j in win.j_range}
        return cls(win, ones, dict(ones), a, b)

    def rescale_black(self, i, j, factor):
        """Gauge move: multiply the four edges at one black vertex."""
        factor = _positive_fraction(factor, "gauge factor")
        out = RawEdgeWeights.__new__(RawEdgeWeights)
        out.window = self.window
        out.west_up = dict(self.west_up)
        out.west_down = dict(self.west_down)
        out.east_up = dict(self.east_up)
        out.east_down = dict(self.east_down)
        for table in (out.west_up, out.west_down, out.east_up, out.east_down):
            table[i, j] = table[i, j] * factor
        return out

    def rescale_white(self, m, k, factor):
        """Gauge move: multiply the edges at white vertex (2m-1, 2k).

        The white vertex touches west edges of black column m and east
        edges of black column m-1.
        """
        factor = _positive_fraction(factor, "gauge factor")
        out = RawEdgeWeights.__new__(RawEdgeWeights)
        out.window = self.window
        out.west_up = dict(self.west_up)
        out.west_down = dict(self.west_down)
        out.east_up = dict(self.east_up)
        out.east_down = dict(self.east_down)
        win = self.window
        if win.contains(m, k):
            out.west_down[m, k] = out.west_down[m, k] * factor
        if win.contains(m, k - 1):
            out.west_up[m, k - 1] = out.west_up[m, k - 1] * factor
        if win.contains(m - 1, k):
            out.east_down[m - 1, k] = out.east_down[m - 1, k] * factor
        if win.contains(m - 1, k - 1):
            out.east_up[m - 1, k - 1] = out.east_up[m - 1, k - 1] * factor
        return out


def gauge_normalize(raw: RawEdgeWeights) -> WeightField:
    """Gauge-transform raw edge weights so every west edge equals 1.

    One multiplier per vertex suffices.  Per white column m the bottom
    white vertex is pinned to 1; alternating up the column, black factors
    clear the west-down edges and white factors clear the west-up edges.
    East edges then pick up the factors of both endpoints and become the
    normalized parameters.  Face weights are untouched by construction.
    """
    win = raw.window
    mu = {}
    lam = {}
    for m in win.i_range:
        mu[m, win.j_lo] = Fraction(1)
        for j in win.j_range:
            lam[m, j] = 1 / (mu[m, j] * raw.west_down[m, j])
            mu[m, j + 1] = 1 / (lam[m, j] * raw.west_up[m, j])
    # the white column east of the window is free; pin it to 1
    for k in range(win.j_lo, win.j_hi + 2):
        mu[win.i_hi + 1, k] = Fraction(1)
    a = {}
    b = {}
    for i in win.i_range:
        for j in win.j_range:
            a[i, j] = raw.east_up[i, j] * lam[i, j] * mu[i + 1, j + 1]
            b[i, j] = raw.east_down[i, j] * lam[i, j] * mu[i + 1, j]
    return WeightField(win, a, b)


def raw_face_weights(raw: RawEdgeWeights) -> FaceField:
    """Gauge-invariant face weights read off the raw edges directly.

    Even face at (2i+1, 2j+1): alternating ratio of the four surrounding
    edges, equal to a_{i,j}/b_{i,j} in the normalized gauge.  Odd face at
    (2i+2, 2j+2) likewise equals b_{i+1,j+1}/a_{i+1,j}.  Faces needing
    edges outside the window are omitted.
    """
    win = raw.window
    even = {}
    odd = {}
    for i in win.i_range:
        for j in win.j_range:
            if win.contains(i + 1, j):
                even[i, j] = (raw.east_up[i, j] * raw.west_down[i + 1, j]) / (
                    raw.east_down[i, j] * raw.west_up[i + 1, j]
                )
            if win.contains(i + 1, j + 1):
                odd[i, j] = (raw.east_down[i + 1, j + 1] * raw.west_up[i + 1, j]) / (
                    raw.east_up[i + 1, j] * raw.west_down[i + 1, j + 1]
                )
    return FaceField(win, even, odd)


@dataclass
class AssumptionReport:
    """Outcome of the ratio-decay check.

    For periodic fields the numbers are sharp; for windowed fields they
    are finite-window estimates.  A violation carries witness indices
    instead of rate constants.
    """

    satisfied: bool
    rho: float | None = None
    R: float | None = None
    delta1: Fraction | None = None
    delta2: Fraction | None = None
    witness: tuple | None = None
    detail: str = ""


def check_assumption(w: WeightField, columns=None) -> AssumptionReport:
    """Check that products of a/b along each column decay geometrically.

    Periodic fields: the condition is exactly that each full-period
    product is below 1; then rho is the largest per-period geometric mean
    and R bounds the finitely many partial products against rho^k.
    Windowed fields: the finite sups M_k of k-fold products give the
    estimate rho = max_k M_k^(1/k); this is an estimate, not a proof,
    since the window shows only finitely many ratios.
    """
    if w.is_periodic:
        q, p = w.extent.q, w.extent.p
        cols = list(columns) if columns is not None else list(range(q))
        worst = Fraction(0)
        for i in cols:
            prod = Fraction(1)
            for j in range(p):
                prod *= w.a(i, j) / w.b(i, j)
            if prod >= 1:
                return AssumptionReport(
                    satisfied=False,
                    witness=(i,),
                    detail=f"column {i}: full-period product {prod} >= 1",
                )
            worst = max(worst, prod)
        rho = float(worst) ** (1.0 / p)
        big_r = 1.0
        for i in cols:
            for j0 in range(p):
                partial = Fraction(1)
                for k in range(1, p):
                    partial *= w.a(i, j0 + k - 1) / w.b(i, j0 + k - 1)
                    big_r = max(big_r, float(partial) / rho**k)
        flat = [
            w.a(i, j) + w.b(i, j) for i in range(q) for j in range(p)
        ]
        return AssumptionReport(
            satisfied=True,
            rho=rho,
            R=big_r,
            delta1=min(flat),
            delta2=max(flat),
        )

    win = w.extent
    cols = list(columns) if columns is not None else list(win.i_range)
    rho = 0.0
    witness = None
    for i in cols:
        for j0 in win.j_range:
            prod = Fraction(1)
            for k in range(1, win.j_hi - j0 + 2):
                prod *= w.a(i, j0 + k - 1) / w.b(i, j0 + k - 1)
                rate = float(prod) ** (1.0 / k)
                if rate > rho:
                    rho = rate
                    witness = (i, j0, k)
    flat = [w.a(i, j) + w.b(i, j) for i in cols for j in win.j_range]
    if rho >= 1.0:
        return AssumptionReport(
            satisfied=False,
            witness=witness,
            detail=f"k-fold product at (i, j0, k) = {witness} has mean ratio {rho} >= 1",
        )
    return AssumptionReport(
        satisfied=True, rho=rho, R=1.0, delta1=min(flat), delta2=max(flat)
    )
