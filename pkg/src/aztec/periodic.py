"""Matrix symbols and Wiener-Hopf factorizations of periodic strip products.

When the weights repeat with period p along each row, every strip
transition commutes with the shift by p, so its entries depend only on
the residues of the indices mod p and on the difference of their block
indices.  Writing x = p*j + r with r in 0..p-1, such an operator is
the block Toeplitz operator M(A) of a p x p matrix symbol A(z),

    M(A)(p j + r, p k + s) = (1/2 pi i) oint A(z)_{r, s} dz / z^{k-j+1},

integrated just outside the unit circle.  Symbols multiply like their
operators, so the full strip product G has the symbol

    eta(z) = prod_i [s(z)^i phi(z; a_i, b_i) s(z)^{-i-1} psi(z)],

where phi carries one even strip, psi the all-ones lower triangle, and
s the elementary shift.  The two triangular refactorizations of G then
hand over Wiener-Hopf factorizations of eta: the lower factors are
read off the sweep diagonals, the upper factors off the banded block
coefficients, after an exact check that nothing drifted off the
Toeplitz structure.

The factorizations feed the edge kernels of the pinned chain, the
process whose paths start and end at consecutive heights below zero.
As the number of paths grows, correlations near either end converge to
double contour integrals in the factor symbols; edge_kernel evaluates
them by product trapezoid quadrature with node-doubling certificates.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    ConfigError,
    ConsistencyError,
    DimensionError,
    DomainError,
    QuadratureError,
)
from .factorization import lu_decompose, ul_decompose
from .numerics import ExactMatrix
from .transitions import IndexWindow, TransitionFamily


class MatrixSymbol:
    """A p x p matrix Laurent polynomial over a scalar one.

    coeffs maps each integer power to the exact matrix coefficient of
    z^power in the numerator; denom holds the scalar denominator the
    same way, so psi's geometric factor is the denominator 1 - 1/z.
    Products convolve both parts and stay exact; only evaluation at a
    complex point rounds to floats.
    """

    def __init__(self, p: int, coeffs, denom=None):
        if p < 1:
            raise DimensionError(f"block size must be positive, got {p}")
        self.p = p
        cleaned = {}
        for power, matrix in coeffs.items():
            m = matrix if isinstance(matrix, ExactMatrix) else ExactMatrix(matrix)
            if m.shape != (p, p):
                raise DimensionError(
                    f"coefficient of z^{power} has shape {m.shape}, need {(p, p)}"
                )
            if any(m[r, s] != 0 for r in range(p) for s in range(p)):
                cleaned[int(power)] = m
        self.coeffs = cleaned
        if denom is None:
            denom = {0: Fraction(1)}
        self.denom = {
            int(k): Fraction(v) for k, v in denom.items() if Fraction(v) != 0
        }
        if not self.denom:
            raise ConfigError("scalar denominator must not vanish identically")

    @classmethod
    def identity(cls, p: int) -> "MatrixSymbol":
        return cls(p, {0: ExactMatrix.identity(p)})

    def __call__(self, z) -> np.ndarray:
        z = complex(z)
        num = np.zeros((self.p, self.p), dtype=complex)
        for power, m in self.coeffs.items():
            num += _float_matrix(m) * z**power
        den = sum(float(v) * z**k for k, v in self.denom.items())
        return num / den

    def __mul__(self, other):
        if not isinstance(other, MatrixSymbol):
            return NotImplemented
        if self.p != other.p:
            raise DimensionError("cannot multiply symbols of different block size")
        coeffs = {}
        for ka, ma in self.coeffs.items():
            for kb, mb in other.coeffs.items():
                k = ka + kb
                prod = ma * mb
                coeffs[k] = coeffs[k] + prod if k in coeffs else prod
        denom = {}
        for ka, va in self.denom.items():
            for kb, vb in other.denom.items():
                k = ka + kb
                denom[k] = denom.get(k, Fraction(0)) + va * vb
        return MatrixSymbol(self.p, coeffs, denom)

    def __eq__(self, other):
        """Equality of the rational functions, by cross multiplication."""
        if not isinstance(other, MatrixSymbol) or self.p != other.p:
            return NotImplemented
        left = _scalar_convolve(self.coeffs, other.denom)
        right = _scalar_convolve(other.coeffs, self.denom)
        keys = set(left) | set(right)
        zero = ExactMatrix.zeros(self.p)
        return all(left.get(k, zero) == right.get(k, zero) for k in keys)

    def scale_left(self, const: ExactMatrix) -> "MatrixSymbol":
        return MatrixSymbol(
            self.p, {k: const * m for k, m in self.coeffs.items()}, self.denom
        )

    def scale_right(self, const: ExactMatrix) -> "MatrixSymbol":
        return MatrixSymbol(
            self.p, {k: m * const for k, m in self.coeffs.items()}, self.denom
        )

    def limit_at_infinity(self) -> ExactMatrix:
        """The exact limit of the symbol as z grows without bound."""
        if not self.coeffs:
            return ExactMatrix.zeros(self.p)
        top_num = max(self.coeffs)
        top_den = max(self.denom)
        if top_num > top_den:
            raise DomainError("symbol diverges at large z")
        if top_num < top_den:
            return ExactMatrix.zeros(self.p)
        return self.coeffs[top_num].map(lambda v: v / self.denom[top_den])

    def __repr__(self):
        powers = sorted(self.coeffs)
        return f"MatrixSymbol(p={self.p}, powers={powers})"


def _float_matrix(m: ExactMatrix) -> np.ndarray:
    rows, cols = m.shape
    return np.array(
        [[float(m[r, s]) for s in range(cols)] for r in range(rows)], dtype=float
    )


def _scalar_convolve(coeffs: dict, scalar: dict) -> dict:
    out = {}
    for ka, m in coeffs.items():
        for kb, v in scalar.items():
            k = ka + kb
            scaled = m.map(lambda x: x * v)
            out[k] = out[k] + scaled if k in out else scaled
    return out


# -- one-step symbols ----------------------------------------------------


def symbol_phi(a_period, b_period) -> MatrixSymbol:
    """The even-strip symbol: a on the diagonal, b below, b_0 / z in the corner."""
    a = [Fraction(v) for v in a_period]
    b = [Fraction(v) for v in b_period]
    p = len(a)
    if p < 1 or len(b) != p:
        raise DimensionError("period rows must be nonempty and of equal length")
    if any(v <= 0 for v in a) or any(v <= 0 for v in b):
        raise ConfigError("weights must be strictly positive")
    main = ExactMatrix.zeros(p)
    corner = ExactMatrix.zeros(p)
    for r in range(p):
        main[r, r] = a[r]
        if r >= 1:
            main[r, r - 1] = b[r]
    corner[0, p - 1] = b[0]
    return MatrixSymbol(p, {0: main, -1: corner})


def symbol_psi(p: int) -> MatrixSymbol:
    """The odd-strip symbol: the all-ones lower triangle over 1 - 1/z.

    The numerator carries ones on and below the diagonal at z^0 and
    strictly above at z^-1, so the block coefficients reproduce the
    all-ones lower triangular operator row by row.
    """
    if p < 1:
        raise DimensionError(f"block size must be positive, got {p}")
    lower = ExactMatrix.zeros(p)
    upper = ExactMatrix.zeros(p)
    for r in range(p):
        for s in range(p):
            if s <= r:
                lower[r, s] = Fraction(1)
            else:
                upper[r, s] = Fraction(1)
    return MatrixSymbol(p, {0: lower, -1: upper}, {0: Fraction(1), -1: Fraction(-1)})


def symbol_shift(p: int) -> MatrixSymbol:
    """The elementary shift s(z): ones below the diagonal, 1/z in the corner."""
    if p < 1:
        raise DimensionError(f"block size must be positive, got {p}")
    sub = ExactMatrix.zeros(p)
    corner = ExactMatrix.zeros(p)
    for r in range(1, p):
        sub[r, r - 1] = Fraction(1)
    corner[0, p - 1] = Fraction(1)
    return MatrixSymbol(p, {0: sub, -1: corner})


def symbol_shift_inverse(p: int) -> MatrixSymbol:
    """The inverse shift: ones above the diagonal, z in the corner."""
    if p < 1:
        raise DimensionError(f"block size must be positive, got {p}")
    sup = ExactMatrix.zeros(p)
    corner = ExactMatrix.zeros(p)
    for r in range(p - 1):
        sup[r, r + 1] = Fraction(1)
    corner[p - 1, 0] = Fraction(1)
    return MatrixSymbol(p, {0: sup, 1: corner})


def shift_power(p: int, k: int) -> MatrixSymbol:
    """s(z)^k for any integer k, negative powers meaning the inverse."""
    out = MatrixSymbol.identity(p)
    step = symbol_shift(p) if k >= 0 else symbol_shift_inverse(p)
    for _ in range(abs(k)):
        out = out * step
    return out


def shifted_phi(a_period, b_period, i: int) -> MatrixSymbol:
    """The conjugated even-strip symbol s^i phi s^{-i-1}.

    Conjugation moves the band above the diagonal: b sits on the
    diagonal, a above it, and the wrap-around corner picks up one
    positive power of z, so the determinant z * prod(a) - prod(b) is
    linear with its single root at prod(b) / prod(a).
    """
    p = len(list(a_period))
    return shift_power(p, i) * symbol_phi(a_period, b_period) * shift_power(p, -i - 1)


def strip_symbols(family: TransitionFamily) -> list:
    """The 2n one-step symbols whose ordered product is the symbol of G.

    The column shift hiding at the end of G is spread across the even
    factors by conjugation, which leaves psi alone.  The chain pins its
    bridge paths at equal start and end heights; when p divides n these
    factors also serve the chain pinned at consecutive negative
    heights, since the extra conjugation by s^n is then a scalar power
    of z that cancels.  Otherwise build the symbols from the field with
    columns advanced by n.
    """
    field = family.field
    if not field.is_periodic:
        raise ConfigError("strip symbols need a periodic weight field")
    p = field.extent.p
    out = []
    for i in range(family.n):
        a_row = [field.a(i, j) for j in range(p)]
        b_row = [field.b(i, j) for j in range(p)]
        out.append(shifted_phi(a_row, b_row, i))
        out.append(symbol_psi(p))
    return out


def eta_symbol(family: TransitionFamily) -> MatrixSymbol:
    """The symbol of the full strip product G."""
    out = None
    for sym in strip_symbols(family):
        out = sym if out is None else out * sym
    return out


# -- block Toeplitz quadrature -------------------------------------------


@dataclass(frozen=True)
class QuadratureResult:
    """Contour-integral entries with their node-doubling certificate."""

    values: object
    accuracy: float
    nodes: int
    radius: float


def _require_nodes(nodes: int):
    if nodes < 4 or nodes & (nodes - 1):
        raise ConfigError(f"node count must be a power of two, at least 4, got {nodes}")


def _evaluate_nodes(sym: MatrixSymbol, radius: float, count: int) -> np.ndarray:
    """Symbol values at count equispaced points of the radius circle."""
    z = radius * np.exp(2j * np.pi * np.arange(count) / count)
    num = np.zeros((count, sym.p, sym.p), dtype=complex)
    for power, m in sym.coeffs.items():
        num += z[:, None, None] ** power * _float_matrix(m)[None, :, :]
    den = np.zeros(count, dtype=complex)
    for k, v in sym.denom.items():
        den += float(v) * z**k
    if np.any(den == 0):
        raise QuadratureError(f"symbol pole on the radius-{radius} contour")
    return num / den[:, None, None]


def _laurent_blocks(sym, radius, offsets, nodes):
    """Trapezoid block coefficients at three node levels with a certificate.

    Returns (coefficients at the finest level, accuracy), where the
    accuracy is the change under the last doubling.  The error of the
    trapezoid rule on an analytic integrand halves at worst
    geometrically, so a doubling that does not shrink the change
    signals a pole on or near the contour.
    """
    levels = []
    for count in (nodes, 2 * nodes, 4 * nodes):
        vals = _evaluate_nodes(sym, radius, count)
        z = radius * np.exp(2j * np.pi * np.arange(count) / count)
        coeffs = {
            d: np.einsum("t,tij->ij", z ** (-d), vals) / count for d in offsets
        }
        levels.append(coeffs)
    err1 = max(
        np.abs(levels[1][d] - levels[0][d]).max() for d in offsets
    )
    err2 = max(
        np.abs(levels[2][d] - levels[1][d]).max() for d in offsets
    )
    if not math.isfinite(err2) or (err2 > err1 and err2 > 1e-12):
        raise QuadratureError(
            f"node doubling does not converge on radius {radius}: "
            f"{err1:.3e} then {err2:.3e}"
        )
    return levels[2], err2


def toeplitz_entries(
    sym: MatrixSymbol, j_range, k_range, epsilon: float, nodes: int = 64
) -> QuadratureResult:
    """Block Toeplitz entries of M(sym) over block index ranges.

    Entry (p*j + r, p*k + s) for j in j_range, k in k_range is the
    Laurent coefficient of z^(k-j) in the symbol, integrated on the
    radius 1 + epsilon so that poles on the unit circle stay inside.
    The declared accuracy is the node-doubling certificate.
    """
    if epsilon <= 0:
        raise ConfigError(f"epsilon must be positive, got {epsilon}")
    _require_nodes(nodes)
    j_blocks = list(j_range)
    k_blocks = list(k_range)
    if not j_blocks or not k_blocks:
        raise DimensionError("block index ranges must be nonempty")
    radius = 1.0 + epsilon
    offsets = sorted({k - j for j in j_blocks for k in k_blocks})
    coeffs, accuracy = _laurent_blocks(sym, radius, offsets, nodes)
    p = sym.p
    values = np.zeros((p * len(j_blocks), p * len(k_blocks)), dtype=complex)
    for bj, j in enumerate(j_blocks):
        for bk, k in enumerate(k_blocks):
            values[bj * p : (bj + 1) * p, bk * p : (bk + 1) * p] = coeffs[k - j]
    return QuadratureResult(values, accuracy, nodes, radius)


# -- Wiener-Hopf factorization from the dynamics ---------------------------


@dataclass(frozen=True)
class WienerHopfPair:
    """Both factorization orderings of the strip product symbol.

    eta = tilde_minus * tilde_plus = plus * minus, with the minus
    factors normalized to the identity at large z and the compensating
    constants kept as gauges.  det_roots are the exact root magnitudes
    of the plus-factor determinants, one full-period ratio product per
    strip row (the roots themselves carry the sign (-1)^p).  They lie
    outside the unit circle whenever the ratio products decay, and
    epsilon is half the gap to the closest of them, capped for
    quadrature comfort.
    """

    p: int
    n: int
    plus: MatrixSymbol
    minus: MatrixSymbol
    tilde_plus: MatrixSymbol
    tilde_minus: MatrixSymbol
    epsilon: float
    det_roots: tuple
    gauge: ExactMatrix
    tilde_gauge: ExactMatrix


def _require_block_toeplitz(entry, window: IndexWindow, p: int, label: str):
    """Exact rational equality of entries one period apart."""
    for x in window.indices():
        if x + p > window.hi:
            continue
        for y in window.indices():
            if y + p > window.hi:
                continue
            if entry(x, y) != entry(x + p, y + p):
                raise ConsistencyError(
                    f"{label} drifts across one period at ({x}, {y}); "
                    f"the weights are not Toeplitz with block size {p}"
                )


def _require_periodic_diagonal(values: dict, p: int, label: str):
    keys = sorted(values)
    for k in keys:
        if k + p in values and values[k] != values[k + p]:
            raise ConsistencyError(
                f"{label} diagonal drifts across one period at column {k}"
            )


def _read_upper_symbol(op, p: int, n: int) -> MatrixSymbol:
    """Block coefficients of a banded upper factor, read off rows 0..p-1."""
    mmax = (n + p - 1) // p
    coeffs = {}
    for m in range(mmax + 1):
        coeffs[m] = ExactMatrix(
            [[op.entry(r, p * m + s) for s in range(p)] for r in range(p)]
        )
    return MatrixSymbol(p, coeffs)


def _diag_symbol(values: dict, p: int) -> MatrixSymbol:
    return MatrixSymbol(
        p, {0: ExactMatrix.diagonal([values[k] for k in range(p)])}
    )


def _det_numerator(sym: MatrixSymbol) -> dict:
    """The determinant of the numerator as a scalar Laurent polynomial."""
    p = sym.p
    entries = {}
    for power, m in sym.coeffs.items():
        for r in range(p):
            for s in range(p):
                if m[r, s] != 0:
                    entries.setdefault((r, s), {})[power] = m[r, s]
    total = {}
    for perm in itertools.permutations(range(p)):
        term = {0: Fraction(1)}
        for r in range(p):
            poly = entries.get((r, perm[r]))
            if poly is None:
                term = None
                break
            term = _poly_mul(term, poly)
        if term is None:
            continue
        sign = _perm_sign(perm)
        for k, v in term.items():
            total[k] = total.get(k, Fraction(0)) + sign * v
    return {k: v for k, v in total.items() if v != 0}


def _poly_mul(a: dict, b: dict) -> dict:
    out = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = ka + kb
            out[k] = out.get(k, Fraction(0)) + va * vb
    return out


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _require_plus_determinant(sym: MatrixSymbol, row_products, label: str):
    """The plus-factor determinant must carry exactly the row ratio roots.

    Telescoping the factorization, det(plus) is a nonzero constant
    times the product over strip rows of A_i z + (-1)^(p-1) B_i, with
    A and B the full-period weight products: each conjugated strip
    symbol contributes one cyclic permutation besides the diagonal,
    and the cycle sign flips with the parity of the block size.  The
    roots sit at (-1)^p B_i / A_i, outside the unit circle once the
    ratio products decay.  Comparing coefficients exactly pins every
    root; a numeric root finder would splinter repeated roots far
    beyond any honest tolerance.
    """
    det = _det_numerator(sym)
    b_sign = 1 if sym.p % 2 else -1
    expected = {0: Fraction(1)}
    for a_prod, b_prod in row_products:
        expected = _poly_mul(expected, {1: a_prod, 0: b_sign * b_prod})
    if not det:
        raise ConsistencyError(f"{label} factor determinant vanishes identically")
    scale = det[max(det)] / expected[max(expected)]
    scaled = {k: scale * v for k, v in expected.items()}
    if det != scaled:
        raise ConsistencyError(
            f"{label} factor determinant does not carry the row ratio roots"
        )


def _require_minus_determinant(sym: MatrixSymbol, label: str):
    """The minus-factor determinant must put every root at one.

    Each psi contributes det (1 - 1/z)^(p-1) and the diagonal and
    shift factors only constants and powers of z, so up to a monomial
    the determinant is a binomial power with all roots on the unit
    circle.  The comparison is exact.
    """
    det = _det_numerator(sym)
    if not det:
        raise ConsistencyError(f"{label} factor determinant vanishes identically")
    low, high = min(det), max(det)
    degree = high - low
    lead = det[high]
    for k in range(degree + 1):
        want = lead * (-1) ** (degree - k) * math.comb(degree, k)
        if det.get(low + k, Fraction(0)) != want:
            raise ConsistencyError(
                f"{label} factor determinant root outside the unit circle"
            )


def wiener_hopf_from_dynamics(
    family: TransitionFamily,
    window: IndexWindow = None,
    period: int = None,
    samples: int = 64,
    tol: float = 1e-10,
) -> WienerHopfPair:
    """Wiener-Hopf factorizations of eta read off the two refactorizations.

    Runs both triangular sweeps over the n strip rows, verifies every
    factor and every sweep diagonal is exactly block Toeplitz with the
    claimed period, and converts them to symbols: the upper factors
    from their banded block coefficients, the lower factors as the
    alternating product of sweep diagonals with psi.  The minus factors
    are normalized to the identity at large z by an exact constant
    gauge, and the products are checked against eta at sampled points
    of the quadrature circle.

    period defaults to the field period; claiming a smaller period for
    weights that genuinely repeat on a longer one fails the Toeplitz
    check, which is the honest symptom that no symbol of that size
    exists.
    """
    field = family.field
    if not field.is_periodic:
        raise ConfigError("Wiener-Hopf factorization needs a periodic weight field")
    p = period if period is not None else field.extent.p
    if p < 1:
        raise ConfigError(f"period must be positive, got {p}")
    n = family.n

    det_roots = []
    row_products = []
    for i in range(n):
        num = Fraction(1)
        den = Fraction(1)
        for j in range(p):
            num *= field.b(i, j)
            den *= field.a(i, j)
        root = num / den
        if root <= 1:
            raise ConfigError(
                f"row {i}: full-period ratio product {den / num} is not below one, "
                "the ratio products do not decay"
            )
        det_roots.append(root)
        row_products.append((den, num))
    epsilon = min((float(min(det_roots)) - 1.0) / 2.0, 0.5)

    if window is None:
        reach = n + 2 * p + 2
        window = IndexWindow(-reach, reach)
    lu = lu_decompose(family, window)
    ul = ul_decompose(family, window)
    for fac, label in (
        (lu.lower, "lower factor"),
        (lu.upper, "upper factor"),
        (ul.upper, "reversed upper factor"),
        (ul.lower, "reversed lower factor"),
    ):
        if not fac.exact:
            raise ConfigError("window too short to certify the factor entries")
        _require_block_toeplitz(fac.entry, fac.window, p, label)
    for j, diag in enumerate(lu.diagonals):
        _require_periodic_diagonal(diag, p, f"sweep {j}")
    for j, diag in enumerate(ul.diagonals):
        _require_periodic_diagonal(diag, p, f"reversed sweep {j}")

    psi = symbol_psi(p)
    tilde_plus = _read_upper_symbol(lu.upper, p, n)
    tilde_minus = None
    for j in range(n):
        step = _diag_symbol(lu.diagonals[j], p) * psi
        tilde_minus = step if tilde_minus is None else tilde_minus * step

    plus = _read_upper_symbol(ul.upper, p, n)
    core = psi
    for j in range(n - 2, -1, -1):
        core = core * _diag_symbol(ul.diagonals[j], p) * psi
    minus = shift_power(p, n) * core * shift_power(p, -n)

    tilde_gauge = tilde_minus.limit_at_infinity()
    gauge = minus.limit_at_infinity()
    if tilde_gauge.det() == 0 or gauge.det() == 0:
        raise ConsistencyError("minus factor degenerates at large z")
    tilde_minus = tilde_minus.scale_right(tilde_gauge.inverse())
    tilde_plus = tilde_plus.scale_left(tilde_gauge)
    minus = minus.scale_left(gauge.inverse())
    plus = plus.scale_right(gauge)
    for sym in (tilde_minus, minus):
        if sym.limit_at_infinity() != ExactMatrix.identity(p):
            raise ConsistencyError("minus factor normalization failed")

    eta = eta_symbol(family)
    radius = 1.0 + epsilon
    worst = 0.0
    for t in range(samples):
        z = radius * np.exp(2j * np.pi * (t + 0.5) / samples)
        target = eta(z)
        worst = max(worst, np.abs(target - tilde_minus(z) @ tilde_plus(z)).max())
        worst = max(worst, np.abs(target - plus(z) @ minus(z)).max())
    if worst > tol:
        raise ConsistencyError(
            f"factor products deviate from eta by {worst:.3e} at radius {radius}"
        )

    _require_plus_determinant(tilde_plus, row_products, "upper")
    _require_plus_determinant(plus, row_products, "reversed upper")
    _require_minus_determinant(tilde_minus, "lower")
    _require_minus_determinant(minus, "reversed lower")

    return WienerHopfPair(
        p=p,
        n=n,
        plus=plus,
        minus=minus,
        tilde_plus=tilde_plus,
        tilde_minus=tilde_minus,
        epsilon=epsilon,
        det_roots=tuple(sorted(det_roots)),
        gauge=gauge,
        tilde_gauge=tilde_gauge,
    )


# -- edge kernels of the pinned chain --------------------------------------


def _partial_product(symbols, start: int, stop: int, p: int) -> MatrixSymbol:
    out = MatrixSymbol.identity(p)
    for m in range(start, stop):
        out = out * symbols[m]
    return out


def _indicator_block(symbols, m1, m2, y1, y2, radius, nodes, p):
    """Transition block between two columns, zero unless m1 < m2.

    The bridge kernel subtracts the plain transition product between an
    earlier and a later column; at equal or reversed columns there is
    nothing to subtract.
    """
    if m1 >= m2:
        return np.zeros((p, p), dtype=complex), 0.0
    sym = _partial_product(symbols, m1, m2, p)
    coeffs, accuracy = _laurent_blocks(sym, radius, [y2 - y1], nodes)
    return coeffs[y2 - y1], accuracy


def _double_term(sw_sym, sz_sym, y1, y2, r_w, r_z, nodes, flip):
    """Product trapezoid quadrature of the double contour integral.

    Computes (1/2 pi i)^2 times the integral of
    SW(w) SZ(z) w^y1 z^(-y2-1) / (z - w), with flip swapping the sign
    of the coupling for the lower edge where the roles of the two
    circles reverse.  Three node levels give the doubling certificate.
    """
    results = []
    for count in (nodes, 2 * nodes, 4 * nodes):
        w = r_w * np.exp(2j * np.pi * np.arange(count) / count)
        z = r_z * np.exp(2j * np.pi * (np.arange(count) + 0.5) / count)
        sw = np.stack([sw_sym(val) for val in w])
        sz = np.stack([sz_sym(val) for val in z])
        coupling = 1.0 / (z[None, :] - w[:, None])
        if flip:
            coupling = -coupling
        weight = (w ** (y1 + 1))[:, None] * (z ** (-y2))[None, :] * coupling
        total = np.einsum("aij,ab,bjk->ik", sw, weight, sz) / count**2
        results.append(total)
    err1 = np.abs(results[1] - results[0]).max()
    err2 = np.abs(results[2] - results[1]).max()
    if not math.isfinite(err2) or (err2 > err1 and err2 > 1e-12):
        raise QuadratureError(
            f"double contour quadrature does not converge: {err1:.3e} then {err2:.3e}"
        )
    return results[2], err2


def edge_kernel(
    symbols,
    pair: WienerHopfPair,
    m1: int,
    y1: int,
    m2: int,
    y2: int,
    mode: str = "top",
    epsilon: float = None,
    nodes: int = 128,
    j1: int = None,
    j2: int = None,
):
    """Limiting correlation kernel blocks of the pinned chain at one edge.

    symbols lists the one-step factors of a chain whose bridge paths
    start and end at consecutive heights below zero; pair must hold the
    Wiener-Hopf factorizations of their ordered product.  As the number
    of paths grows, the kernel near the upper edge converges at heights
    x = p*y + j, and near the lower edge at heights p*(y - N) + j
    rebased to the block index y.  The returned p x p block carries the
    kernel over the inner indices (j1, j2); passing both j1 and j2
    selects a single entry.

    The value combines the transition block between the columns with a
    double contour integral in the factor symbols.  In top mode the
    inner circle carries the column suffix against the inverse of
    tilde_plus and the outer one tilde_minus inverse against the
    prefix; in bottom mode the circles swap roles and the reversed
    ordering's factors take over.  Both circles stay strictly outside
    the unit circle, where every factor inverse in play is analytic,
    and strictly inside the closest determinant root.
    """
    if pair is None:
        raise ConfigError("edge kernel needs the Wiener-Hopf factorization")
    symbols = list(symbols)
    if len(symbols) < 2:
        raise DimensionError("the chain needs at least two one-step factors")
    p = symbols[0].p
    if any(sym.p != p for sym in symbols) or pair.p != p:
        raise DimensionError("chain factors and pair must share one block size")
    last = len(symbols)
    if not (1 <= m1 < last and 1 <= m2 < last):
        raise DomainError(
            f"columns must be interior, 1..{last - 1}, got {m1} and {m2}"
        )
    if mode not in ("top", "bottom"):
        raise ConfigError(f"mode must be 'top' or 'bottom', got {mode!r}")
    if epsilon is None:
        epsilon = pair.epsilon
    if epsilon <= 0:
        raise ConfigError(f"epsilon must be positive, got {epsilon}")
    _require_nodes(nodes)

    suffix = _partial_product(symbols, m1, last, p)
    prefix = _partial_product(symbols, 0, m2, p)
    if mode == "top":
        r_w, r_z = 1.0 + epsilon / 2.0, 1.0 + epsilon
        sw_sym = lambda w: suffix(w) @ np.linalg.inv(pair.tilde_plus(w))
        sz_sym = lambda z: np.linalg.inv(pair.tilde_minus(z)) @ prefix(z)
        flip = False
    else:
        r_w, r_z = 1.0 + epsilon, 1.0 + epsilon / 2.0
        sw_sym = lambda w: suffix(w) @ np.linalg.inv(pair.minus(w))
        sz_sym = lambda z: np.linalg.inv(pair.plus(z)) @ prefix(z)
        flip = True

    indicator, _ = _indicator_block(
        symbols, m1, m2, y1, y2, 1.0 + epsilon, nodes, p
    )
    double, _ = _double_term(sw_sym, sz_sym, y1, y2, r_w, r_z, nodes, flip)
    block = -indicator + double
    if j1 is None and j2 is None:
        return block
    if j1 is None or j2 is None:
        raise ConfigError("pass both inner indices or neither")
    if not (0 <= j1 < p and 0 <= j2 < p):
        raise DomainError(f"inner indices must lie in 0..{p - 1}")
    return block[j1, j2]
