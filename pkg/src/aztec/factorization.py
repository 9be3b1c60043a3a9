"""Triangular factorizations of the strip product and the limiting kernel.

Sweeping every even strip to the right with the forward intertwining
turns G = V S^{-n} into a lower times an upper factor; the reverse
sweep gives the upper times lower ordering.  Each sweep consumes one
boundary row, whose parameter update drops the neighbour term (the
trailing diagonal factor is declared to be the identity), so the stage
history is the refactorization flow with a modified last row.

The triangular inverses are cheap: the lower factors alternate
diagonals with the all-ones triangle, whose inverse is the two-band
I - S, so their inverses stay banded with width set by the number of
strips.  The upper factors are inverted by windowed back substitution,
which is exact because entry (j, k) of a triangular inverse only
involves the square block between j and k.

From the two factorizations, a Widom-style combination of windowed
triangular inverses approximates the inverse of the finite bridge
block, with an error that decays geometrically in the block size
whenever the a/b ratios are summable along rows.  The same decay
envelope drives the truncation of the limiting kernel series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ConfigError, DomainError, ExtentError, SingularMatrixError
from .numerics import ExactMatrix
from .transitions import (
    IndexWindow,
    TransitionFamily,
    WindowedOperator,
    diagonal_operator,
    phi_operator,
    psi_inverse_operator,
    psi_operator,
)
from .weights import WeightField


@dataclass(frozen=True)
class StageField:
    """Parameter rows after a number of sweeps, keyed by (row, column)."""

    a: dict
    b: dict
    rows: tuple
    columns: IndexWindow


@dataclass(frozen=True)
class LUFactorization:
    """One triangular splitting of G, with its full parameter history.

    kind is "lu" for the lower-times-upper ordering and "ul" for the
    reverse.  stages[j] holds the parameters after j sweeps; diagonals
    holds the scalar factors collected by the sweeps (the a+b diagonals
    for "lu", the a + shifted-b diagonals for "ul") as column dicts.
    """

    kind: str
    family: TransitionFamily
    window: IndexWindow
    lower: WindowedOperator
    upper: WindowedOperator
    stages: tuple
    diagonals: tuple

    def product(self) -> WindowedOperator:
        if self.kind == "lu":
            return self.lower * self.upper
        return self.upper * self.lower


@dataclass(frozen=True)
class DecayEnvelope:
    """Constants (R, rho) bounding the windowed a/b ratio products."""

    r_const: float
    rho: float

    @property
    def summable(self):
        return 0 < self.rho < 1

    def series_cutoff(self, tol: float) -> int:
        """Smallest l with the geometric tail R^2 rho^l / (1-rho) below tol."""
        if not self.summable:
            raise ConfigError("decay envelope is not summable, no cutoff exists")
        target = tol * (1 - self.rho) / self.r_const**2
        if target >= 1:
            return 1
        return max(1, math.ceil(math.log(target) / math.log(self.rho)))

    def tail_bound(self, cutoff: int) -> float:
        return self.r_const**2 * self.rho**cutoff / (1 - self.rho)


@dataclass(frozen=True)
class ApproxInverse:
    """Widom-style estimate of the inverse bridge block.

    The residual is measured against the exact block, never assumed:
    it is the largest entry of G22 * estimate - I in absolute value.
    """

    estimate: ExactMatrix
    block: IndexWindow
    residual: float
    p: int
    rho: float
    r_const: float


@dataclass(frozen=True)
class LimitKernelValue:
    """A truncated evaluation of the infinite-depth kernel series."""

    value: Fraction
    terms: int
    cutoff: int
    tail_bound: float

    def __float__(self):
        return float(self.value)


def decay_envelope(field: WeightField, rows: int) -> DecayEnvelope:
    """Measure (R, rho) for a periodic field over the first `rows` strips.

    rho is the largest per-column geometric mean of the a/b ratios; R
    covers the partial products within one period.  Any longer window
    factors through whole periods, so the pair bounds every windowed
    ratio product.  Windowed fields have no j -> infinity behaviour to
    bound, so they are rejected.
    """
    if not field.is_periodic:
        raise ConfigError("decay envelope requires a periodic field")
    period = field.extent.p
    r_const = 1.0
    rho = 0.0
    for i in range(rows):
        ratios = [field.a(i, j) / field.b(i, j) for j in range(period)]
        full = Fraction(1)
        for r in ratios:
            full *= r
        rho_i = float(full) ** (1.0 / period)
        rho = max(rho, rho_i)
        for j0 in range(period):
            partial = 1.0
            for length in range(1, period + 1):
                partial *= float(ratios[(j0 + length - 1) % period])
                r_const = max(r_const, partial / rho_i**length)
    return DecayEnvelope(r_const, rho)


# -- parameter sweeps ---------------------------------------------------


def _field_stage(field: WeightField, n: int, columns: IndexWindow) -> StageField:
    a = {(i, k): field.a(i, k) for i in range(n) for k in columns.indices()}
    b = {(i, k): field.b(i, k) for i in range(n) for k in columns.indices()}
    return StageField(a, b, tuple(range(n)), columns)


def _forward_sweep(prev: StageField, top_row: int) -> StageField:
    """One forward sweep: full updates below top_row, bare ones on it."""
    cols = IndexWindow(prev.columns.lo + 1, prev.columns.hi)
    a, b = {}, {}
    for i in range(top_row + 1):
        for k in cols.indices():
            if i < top_row:
                gain = (prev.a[i + 1, k] + prev.b[i + 1, k]) / (
                    prev.a[i, k] + prev.b[i, k]
                )
                shifted = (prev.a[i + 1, k - 1] + prev.b[i + 1, k - 1]) / (
                    prev.a[i, k - 1] + prev.b[i, k - 1]
                )
            else:
                gain = 1 / (prev.a[i, k] + prev.b[i, k])
                shifted = 1 / (prev.a[i, k - 1] + prev.b[i, k - 1])
            a[i, k] = prev.a[i, k] * gain
            b[i, k] = prev.b[i, k - 1] * shifted
    return StageField(a, b, tuple(range(top_row + 1)), cols)


def _reverse_sweep(prev: StageField, bottom_row: int, last_row: int) -> StageField:
    """One reverse sweep: full updates above bottom_row, bare ones on it."""
    cols = IndexWindow(prev.columns.lo, prev.columns.hi - 1)
    a, b = {}, {}
    for i in range(bottom_row, last_row + 1):
        for k in cols.indices():
            if i > bottom_row:
                ratio = (prev.a[i - 1, k] + prev.b[i - 1, k + 1]) / (
                    prev.a[i, k] + prev.b[i, k + 1]
                )
            else:
                ratio = 1 / (prev.a[i, k] + prev.b[i, k + 1])
            a[i, k] = prev.a[i, k] * ratio
            b[i, k] = prev.b[i, k + 1] * ratio
    return StageField(a, b, tuple(range(bottom_row, last_row + 1)), cols)


def _stage_phi(stage: StageField, i: int, window: IndexWindow) -> WindowedOperator:
    return phi_operator(
        lambda k: stage.a[i, k], lambda k: stage.b[i, k], window
    )


def _shift_columns(op: WindowedOperator, n: int, window: IndexWindow) -> WindowedOperator:
    """The product op * S^{-n} on `window`, read off as a column shift."""
    entries = ExactMatrix(
        [[op.entry(j, k - n) for k in window.indices()] for j in window.indices()]
    )
    dmin = None if op.dmin is None else op.dmin + n
    dmax = None if op.dmax is None else op.dmax + n
    return WindowedOperator(window, entries, dmin, dmax, op.exact)


def lu_decompose(family: TransitionFamily, window: IndexWindow) -> LUFactorization:
    """Factor G into lower times upper by forward sweeps.

    Each sweep needs one extra column below, plus the column shift
    behind G needs n more, so the field must cover the window padded
    by 2n columns on the left; windowed fields that fall short raise
    an extent error, periodic fields always suffice.
    """
    n = family.n
    padded = IndexWindow(window.lo - n, window.hi)
    stage = _field_stage(family.field, n, IndexWindow(padded.lo - n, padded.hi))
    stages = [stage]
    for j in range(1, n + 1):
        stage = _forward_sweep(stage, n - j)
        stages.append(stage)

    diagonals = tuple(
        {
            k: stages[j].a[0, k] + stages[j].b[0, k]
            for k in window.indices()
        }
        for j in range(n)
    )
    psi = psi_operator(window)
    lower = diagonal_operator(diagonals[0], window) * psi
    for j in range(1, n):
        lower = lower * diagonal_operator(diagonals[j], window) * psi

    chain = _stage_phi(stages[n], 0, padded)
    for i in range(1, n):
        chain = chain * _stage_phi(stages[n - i], i, padded)
    upper = _shift_columns(chain, n, window)
    return LUFactorization(
        "lu", family, window, lower, upper, tuple(stages), diagonals
    )


def ul_decompose(family: TransitionFamily, window: IndexWindow) -> LUFactorization:
    """Factor G into upper times lower by reverse sweeps."""
    n = family.n
    padded = IndexWindow(window.lo - n, window.hi)
    core_window = IndexWindow(window.lo - n, window.hi - n)
    stage = _field_stage(family.field, n, IndexWindow(padded.lo, padded.hi + n))
    stages = [stage]
    for j in range(1, n):
        stage = _reverse_sweep(stage, j, n - 1)
        stages.append(stage)

    # the sweep over rows j..n-1 leaves behind the last row's
    # a + shifted-b diagonal of the pre-sweep stage
    diagonals = tuple(
        {
            k: stages[j].a[n - 1, k] + stages[j].b[n - 1, k + 1]
            for k in core_window.indices()
        }
        for j in range(n - 1)
    )

    chain = _stage_phi(stages[0], 0, padded)
    for i in range(1, n):
        chain = chain * _stage_phi(stages[i], i, padded)
    upper = _shift_columns(chain, n, window)

    core = psi_operator(core_window)
    for j in range(n - 2, -1, -1):
        core = core * diagonal_operator(diagonals[j], core_window) * psi_operator(
            core_window
        )
    entries = ExactMatrix(
        [[core.entry(j - n, k - n) for k in window.indices()] for j in window.indices()]
    )
    lower = WindowedOperator(window, entries, None, 0, core.exact)
    return LUFactorization(
        "ul", family, window, lower, upper, tuple(stages), diagonals
    )


def _diagonal_inverse(values: dict, window: IndexWindow) -> WindowedOperator:
    for k, value in values.items():
        if value == 0:
            raise SingularMatrixError(f"zero diagonal factor at column {k}")
    return diagonal_operator({k: 1 / v for k, v in values.items()}, window)


def invert_factors(lu: LUFactorization):
    """Exact windowed inverses (Lambda, Upsilon) of the two factors.

    Lambda comes out as a product of the two-band I - S with diagonal
    inverses, hence banded with width n + 1 regardless of the window.
    Upsilon is dense above the diagonal and computed by back
    substitution, which windowing keeps exact.
    """
    window = lu.window
    n = lu.family.n
    if lu.kind == "lu":
        lam = psi_inverse_operator(window)
        for j in range(n - 1, 0, -1):
            lam = (
                lam
                * _diagonal_inverse(lu.diagonals[j], window)
                * psi_inverse_operator(window)
            )
        lam = lam * _diagonal_inverse(lu.diagonals[0], window)
    else:
        core_window = IndexWindow(window.lo - n, window.hi - n)
        core = psi_inverse_operator(core_window)
        for j in range(n - 1):
            core = (
                core
                * _diagonal_inverse(lu.diagonals[j], core_window)
                * psi_inverse_operator(core_window)
            )
        entries = ExactMatrix(
            [
                [core.entry(j - n, k - n) for k in window.indices()]
                for j in window.indices()
            ]
        )
        lam = WindowedOperator(window, entries, -n, 0, core.exact)
    upsilon = WindowedOperator(
        window, lu.upper.to_matrix().triangular_inverse(), 0, None, lu.upper.exact
    )
    return lam, upsilon


def _block(op: WindowedOperator, rows, cols) -> ExactMatrix:
    return ExactMatrix([[op.entry(r, c) for c in cols] for r in rows])


def approximate_w_inverse(
    lu: LUFactorization, ul: LUFactorization, n: int, p: int
) -> ApproxInverse:
    """Widom-style approximation of the inverse of the bridge block.

    The estimate is Upsilon_22 Lambda_22 from the forward factorization
    minus the Lambda_21 Upsilon_12 corner from the reverse one, all on
    the block of indices -p..n-1.  The corner is an exact finite sum
    because the reverse Lambda is banded.  The residual against the
    exact block inverse identity is measured and recorded.
    """
    if lu.kind != "lu" or ul.kind != "ul":
        raise ConfigError("pass the forward factorization first, the reverse second")
    if lu.window != ul.window or lu.family is not ul.family:
        raise ConfigError("factorizations disagree on window or family")
    envelope = decay_envelope(lu.family.field, n)
    if not envelope.summable:
        raise ConfigError(
            f"a/b ratio products do not decay (rho = {envelope.rho:.4f} >= 1)"
        )
    window = lu.window
    block = IndexWindow(-p, n - 1)
    if block.lo - n < window.lo or block.hi + 1 > window.hi:
        raise ExtentError(
            f"window [{window.lo},{window.hi}] too small for the p={p} block"
        )
    lam1, ups1 = invert_factors(lu)
    lam2, ups2 = invert_factors(ul)
    indices = list(block.indices())
    estimate = _block(ups1, indices, indices) @ _block(lam1, indices, indices)
    outside = list(range(window.lo, block.lo))
    corner = _block(lam2, indices, outside) @ _block(ups2, outside, indices)
    estimate = estimate - corner

    g22 = _block(lu.family.g_operator(window), indices, indices)
    residual_matrix = g22 @ estimate - ExactMatrix.identity(block.size)
    residual = max(
        (abs(residual_matrix[r, c]) for r in range(block.size) for c in range(block.size)),
        default=Fraction(0),
    )
    return ApproxInverse(
        estimate, block, float(residual), p, envelope.rho, envelope.r_const
    )


def limit_kernel(family: TransitionFamily, query, tol: float = 1e-12) -> LimitKernelValue:
    """Infinite-depth correlation kernel at one query, series-truncated.

    The value is the indicator-corrected pairing of the forward tail
    with the inverted-factor prefix, summed over the depth index.  The
    lower-triangular right factor kills every term past depth n - x2,
    so the series is finite; the decay envelope picks the window depth
    that keeps the truncated inner sums below tol.  Heights below -1
    sit outside the region the series representation covers and are
    rejected.
    """
    m1, x1, m2, x2 = query
    n = family.n
    if not (0 <= m1 <= 2 * n and 0 <= m2 <= 2 * n):
        raise DomainError(f"columns must lie in 0..{2 * n}, got {m1}, {m2}")
    if x1 < -1 or x2 < -1:
        raise DomainError("the limiting series is only valid for heights >= -1")
    envelope = decay_envelope(family.field, n)
    if not envelope.summable:
        raise ConfigError(
            f"a/b ratio products do not decay (rho = {envelope.rho:.4f} >= 1)"
        )
    cutoff = envelope.series_cutoff(tol)
    lo = min(-1, x1, x2) - cutoff - 2 * n - 2
    hi = max(n, x1 + 1, x2 + 1)
    window = IndexWindow(lo, hi)

    lam, ups = invert_factors(lu_decompose(family, window))
    padded = IndexWindow(window.lo - n, window.hi)
    suffix = family.product(m1, 2 * n, padded)
    left = _shift_columns(suffix, n, window) * ups
    right = lam * family.product(0, m2, window)

    total = Fraction(0)
    terms = 0
    for depth in range(1, cutoff + 1):
        if n - depth < window.lo:
            break
        contribution = left.entry(x1, n - depth) * right.entry(n - depth, x2)
        if contribution != 0:
            total += contribution
            terms += 1
    if m1 < m2:
        total -= family.product(m1, m2, window).entry(x1, x2)
    return LimitKernelValue(total, terms, cutoff, envelope.tail_bound(cutoff))
