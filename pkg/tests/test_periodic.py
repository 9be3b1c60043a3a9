"""Block Toeplitz symbols, Wiener-Hopf pairs, and pinned-chain edge kernels.

Symbols are pinned against the windowed operators they encode: the
quadrature blocks of phi, psi, the shifts, and the full strip product
must reproduce exact entries to near machine precision, and symbol
products must multiply like operator products.  The factorization
tests freeze the exact determinant root bookkeeping (the full-period
ratio products, with the parity sign on odd block sizes) and the gauge
constants that undo the normalization at infinity.  The edge kernels
are compared against the exact finite-size kernel with sixteen pinned
paths and against the infinite-depth series kernel, closing the
consistency triangle.
"""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aztec.errors import (
    ConfigError,
    ConsistencyError,
    DimensionError,
    DomainError,
    QuadratureError,
)
from aztec.factorization import limit_kernel, lu_decompose
from aztec.numerics import ExactMatrix
from aztec.periodic import (
    MatrixSymbol,
    _indicator_block,
    edge_kernel,
    eta_symbol,
    shift_power,
    shifted_phi,
    strip_symbols,
    symbol_phi,
    symbol_psi,
    symbol_shift,
    symbol_shift_inverse,
    toeplitz_entries,
    wiener_hopf_from_dynamics,
)
from aztec.transitions import (
    IndexWindow,
    TransitionFamily,
    phi_operator,
    psi_operator,
    shift_operator,
    tower_kernel,
)
from aztec.weights import WeightField

from test_factorization import two_periodic_field


def two_periodic_family():
    return TransitionFamily(two_periodic_field(), 2)


def scalar_family():
    return TransitionFamily(WeightField.periodic([[1]], [[2]]), 1)


def quad_deviation(sym, op, blocks, epsilon):
    """Worst deviation between quadrature blocks and exact operator entries."""
    p = sym.p
    blocks = list(blocks)
    res = toeplitz_entries(sym, blocks, blocks, epsilon)
    worst = 0.0
    for bj, j in enumerate(blocks):
        for bk, k in enumerate(blocks):
            for r in range(p):
                for s in range(p):
                    got = res.values[bj * p + r, bk * p + s]
                    want = complex(float(op.entry(p * j + r, p * k + s)))
                    worst = max(worst, abs(got - want))
    return worst


class TestMatrixSymbol:
    def test_scalar_phi_evaluation(self):
        sym = symbol_phi([Fraction(3)], [Fraction(5)])
        for z in (1.3, -2.0 + 0.7j, 0.4j):
            assert sym(z)[0, 0] == pytest.approx(3 + 5 / z)

    def test_shift_inverse_cancels(self):
        for p in (1, 2, 3):
            s = symbol_shift(p)
            si = symbol_shift_inverse(p)
            assert s * si == MatrixSymbol.identity(p)
            assert si * s == MatrixSymbol.identity(p)

    def test_shift_period_is_z_inverse(self):
        for p in (1, 2, 3):
            zinv = MatrixSymbol(
                p, {-1: ExactMatrix.identity(p)}
            )
            assert shift_power(p, p) == zinv

    def test_psi_commutes_with_shift(self):
        for p in (1, 2, 3):
            s = symbol_shift(p)
            si = symbol_shift_inverse(p)
            psi = symbol_psi(p)
            assert s * psi * si == psi

    def test_psi_limit_is_lower_ones(self):
        limit = symbol_psi(3).limit_at_infinity()
        assert limit.rows == [
            [1, 0, 0],
            [1, 1, 0],
            [1, 1, 1],
        ]

    def test_diverging_limit_rejected(self):
        sym = MatrixSymbol(1, {1: [[Fraction(1)]]})
        with pytest.raises(DomainError):
            sym.limit_at_infinity()

    def test_shape_and_denominator_validation(self):
        with pytest.raises(DimensionError):
            MatrixSymbol(2, {0: [[1]]})
        with pytest.raises(ConfigError):
            MatrixSymbol(1, {0: [[1]]}, {0: Fraction(0)})
        with pytest.raises(DimensionError):
            MatrixSymbol(0, {})
        with pytest.raises(DimensionError):
            symbol_phi([1, 2], [3])

    def test_nonpositive_weights_rejected(self):
        with pytest.raises(ConfigError):
            symbol_phi([1, 0], [2, 2])
        with pytest.raises(ConfigError):
            symbol_phi([1, 1], [2, -2])


class TestSymbolsVsOperators:
    def test_phi_blocks_match_operator(self):
        field = two_periodic_field()
        sym = symbol_phi([1, 2], [9, 8])
        op = phi_operator(
            lambda j: field.a(0, j), lambda j: field.b(0, j), IndexWindow(-8, 8)
        )
        assert quad_deviation(sym, op, range(-2, 3), 0.5) < 1e-12

    def test_psi_blocks_match_operator(self):
        op = psi_operator(IndexWindow(-8, 8))
        assert quad_deviation(symbol_psi(2), op, range(-2, 3), 0.5) < 1e-12

    def test_shift_blocks_match_operator(self):
        w = IndexWindow(-8, 8)
        assert quad_deviation(symbol_shift(2), shift_operator(w, 1), range(-2, 3), 0.5) < 1e-12
        assert (
            quad_deviation(symbol_shift_inverse(2), shift_operator(w, -1), range(-2, 3), 0.5)
            < 1e-12
        )

    def test_conjugated_phi_entries(self):
        # s^i phi s^{-i-1} puts b on the diagonal and a above it, with
        # the column lookup lagging by the strip row index.
        field = two_periodic_field()
        for i in (0, 1):
            a_row = [field.a(i, j) for j in range(2)]
            b_row = [field.b(i, j) for j in range(2)]
            sym = shifted_phi(a_row, b_row, i)
            res = toeplitz_entries(sym, range(-2, 3), range(-2, 3), 0.5)
            for bj, j in enumerate(range(-2, 3)):
                for bk, k in enumerate(range(-2, 3)):
                    for r in range(2):
                        for s in range(2):
                            x, y = 2 * j + r, 2 * k + s
                            if y == x:
                                want = float(field.b(i, x - i))
                            elif y == x + 1:
                                want = float(field.a(i, x - i))
                            else:
                                want = 0.0
                            got = res.values[bj * 2 + r, bk * 2 + s]
                            assert abs(got - want) < 1e-12

    def test_eta_matches_strip_product(self):
        family = two_periodic_family()
        eta = eta_symbol(family)
        g = family.g_operator(IndexWindow(-8, 8))
        res = toeplitz_entries(eta, range(-1, 2), range(-2, 3), 0.5)
        worst = 0.0
        for bj, j in enumerate(range(-1, 2)):
            for bk, k in enumerate(range(-2, 3)):
                for r in range(2):
                    for s in range(2):
                        got = res.values[bj * 2 + r, bk * 2 + s]
                        want = complex(float(g.entry(2 * j + r, 2 * k + s)))
                        worst = max(worst, abs(got - want))
        assert worst < 1e-10

    def test_strip_symbols_need_periodicity(self):
        field = WeightField.from_grids([[1, 1], [1, 1]], [[2, 2], [2, 2]])
        with pytest.raises(ConfigError):
            strip_symbols(TransitionFamily(field, 2))


class TestToeplitzEntries:
    def test_multiplicativity(self):
        field = two_periodic_field()
        w = IndexWindow(-8, 8)
        phi_op = phi_operator(lambda j: field.a(0, j), lambda j: field.b(0, j), w)
        sym = symbol_phi([1, 2], [9, 8]) * symbol_psi(2)
        assert quad_deviation(sym, phi_op * psi_operator(w), range(-1, 2), 0.5) < 1e-12

    def test_geometric_decay_from_pole(self):
        # a single pole at z = 4 forces the coefficients down by 1/4 per step
        sym = MatrixSymbol(1, {0: [[1]]}, {0: Fraction(1), 1: Fraction(-1, 4)})
        res = toeplitz_entries(sym, range(0, 1), range(0, 7), 0.25)
        vals = [abs(res.values[0, k]) for k in range(7)]
        for k in range(6):
            assert vals[k + 1] / vals[k] == pytest.approx(0.25, abs=1e-9)

    def test_stable_under_node_doubling(self):
        sym = eta_symbol(two_periodic_family())
        lo = toeplitz_entries(sym, range(-1, 2), range(-1, 2), 0.5, nodes=64)
        hi = toeplitz_entries(sym, range(-1, 2), range(-1, 2), 0.5, nodes=128)
        assert np.abs(lo.values - hi.values).max() < 1e-10
        assert lo.accuracy < 1e-10
        assert lo.radius == 1.5

    def test_pole_on_contour_rejected(self):
        sym = MatrixSymbol(1, {0: [[1]]}, {0: Fraction(1), 1: Fraction(-2, 3)})
        with pytest.raises(QuadratureError):
            toeplitz_entries(sym, range(0, 1), range(0, 3), 0.5)

    def test_parameter_validation(self):
        sym = symbol_psi(1)
        with pytest.raises(ConfigError):
            toeplitz_entries(sym, range(0, 1), range(0, 1), 0.5, nodes=48)
        with pytest.raises(ConfigError):
            toeplitz_entries(sym, range(0, 1), range(0, 1), -0.5)
        with pytest.raises(DimensionError):
            toeplitz_entries(sym, range(0, 0), range(0, 1), 0.5)


class TestWienerHopf:
    def test_two_periodic_pair(self):
        pair = wiener_hopf_from_dynamics(two_periodic_family())
        assert pair.p == 2 and pair.n == 2
        assert pair.det_roots == (Fraction(36), Fraction(90))
        assert pair.epsilon == 0.5
        ident = ExactMatrix.identity(2)
        assert pair.tilde_minus.limit_at_infinity() == ident
        assert pair.minus.limit_at_infinity() == ident

    def test_products_reproduce_eta_exactly(self):
        family = two_periodic_family()
        pair = wiener_hopf_from_dynamics(family)
        eta = eta_symbol(family)
        assert pair.tilde_minus * pair.tilde_plus == eta
        assert pair.plus * pair.minus == eta

    def test_products_reproduce_eta_at_samples(self):
        family = two_periodic_family()
        pair = wiener_hopf_from_dynamics(family)
        eta = eta_symbol(family)
        radius = 1.0 + pair.epsilon
        worst = 0.0
        for t in range(64):
            z = radius * np.exp(2j * np.pi * t / 64)
            worst = max(
                worst,
                np.abs(eta(z) - pair.tilde_minus(z) @ pair.tilde_plus(z)).max(),
                np.abs(eta(z) - pair.plus(z) @ pair.minus(z)).max(),
            )
        assert worst < 1e-10

    def test_gauges_recover_triangular_factors(self):
        family = two_periodic_family()
        pair = wiener_hopf_from_dynamics(family)
        lu = lu_decompose(family, IndexWindow(-8, 8))
        raw_plus = pair.tilde_plus.scale_left(pair.tilde_gauge.inverse())
        assert quad_deviation(raw_plus, lu.upper, range(0, 2), 0.5) < 1e-12
        raw_minus = pair.tilde_minus.scale_right(pair.tilde_gauge)
        assert quad_deviation(raw_minus, lu.lower, range(-1, 2), 0.5) < 1e-11

    def test_plus_determinant_vanishes_at_roots(self):
        pair = wiener_hopf_from_dynamics(two_periodic_family())
        for root in (36.0, 90.0):
            assert abs(np.linalg.det(pair.tilde_plus(root))) < 1e-6 * root**2
            assert abs(np.linalg.det(pair.plus(root))) < 1e-6 * root**2
        for t in range(16):
            z = np.exp(2j * np.pi * t / 16)
            assert abs(np.linalg.det(pair.tilde_plus(z))) > 1e-3
            assert abs(np.linalg.det(pair.plus(z))) > 1e-3

    def test_scalar_case_is_reordering(self):
        # p = 1: the factors are scalars, so both orderings agree and
        # the lower factor is psi itself.
        family = scalar_family()
        pair = wiener_hopf_from_dynamics(family)
        assert pair.det_roots == (Fraction(2),)
        eta = eta_symbol(family)
        assert pair.tilde_minus * pair.tilde_plus == eta
        assert pair.plus * pair.minus == eta
        assert pair.minus == symbol_psi(1)
        assert pair.tilde_minus == symbol_psi(1)
        for z in (1.5, 1.2 + 0.4j):
            assert pair.plus(z)[0, 0] == pytest.approx(z + 2)

    def test_three_periodic_pair(self):
        field = WeightField.periodic([[1, 2, 1], [2, 1, 1]], [[3, 4, 5], [4, 3, 6]])
        pair = wiener_hopf_from_dynamics(TransitionFamily(field, 2))
        assert pair.det_roots == (Fraction(30), Fraction(36))
        eta = eta_symbol(TransitionFamily(field, 2))
        assert pair.tilde_minus * pair.tilde_plus == eta
        assert pair.plus * pair.minus == eta

    def test_claiming_shorter_period_fails_structurally(self):
        with pytest.raises(ConsistencyError):
            wiener_hopf_from_dynamics(two_periodic_family(), period=1)

    def test_needs_periodic_decaying_weights(self):
        windowed = WeightField.from_grids([[1, 1], [1, 1]], [[2, 2], [2, 2]])
        with pytest.raises(ConfigError):
            wiener_hopf_from_dynamics(TransitionFamily(windowed, 2))
        flat = WeightField.periodic([[1]], [[1]])
        with pytest.raises(ConfigError):
            wiener_hopf_from_dynamics(TransitionFamily(flat, 1))


@settings(max_examples=10, deadline=None)
@given(
    st.integers(min_value=1, max_value=2),
    st.integers(min_value=1, max_value=3),
    st.data(),
)
def test_random_periodic_fields_factorize(n, p, data):
    a = [
        [Fraction(data.draw(st.integers(min_value=1, max_value=3))) for _ in range(p)]
        for _ in range(n)
    ]
    b = [
        [Fraction(data.draw(st.integers(min_value=4, max_value=9))) for _ in range(p)]
        for _ in range(n)
    ]
    family = TransitionFamily(WeightField.periodic(a, b), n)
    pair = wiener_hopf_from_dynamics(family)
    expected = sorted(
        math.prod(b[i]) / math.prod(a[i]) for i in range(n)
    )
    assert list(pair.det_roots) == expected
    eta = eta_symbol(family)
    assert pair.tilde_minus * pair.tilde_plus == eta
    assert pair.plus * pair.minus == eta


@pytest.fixture(scope="module")
def setup():
    family = two_periodic_family()
    pair = wiener_hopf_from_dynamics(family)
    symbols = strip_symbols(family)
    kern = tower_kernel(family, 14, IndexWindow(-19, 3))
    return family, pair, symbols, kern


class TestEdgeKernel:
    """Edge limits against the exact kernel of sixteen pinned paths.

    The chain has four one-step factors; heights near the upper edge
    are p*y + j with the finite-size counterpart shifted up by one
    block column of remaining even steps, and heights near the lower
    edge sit two blocks times eight paths further down.
    """

    DELTA = {1: 1, 2: 1, 3: 0}

    def test_top_matches_finite_kernel(self, setup):
        family, pair, symbols, kern = setup
        worst = 0.0
        for m1, m2 in ((1, 1), (1, 3), (2, 2), (3, 1), (2, 3)):
            for y1, y2 in ((-1, 0), (0, -1), (0, 0)):
                block = edge_kernel(symbols, pair, m1, y1, m2, y2, mode="top")
                for j1 in range(2):
                    for j2 in range(2):
                        want = float(
                            kern(
                                m1,
                                2 * y1 + j1 + self.DELTA[m1],
                                m2,
                                2 * y2 + j2 + self.DELTA[m2],
                            )
                        )
                        worst = max(worst, abs(block[j1, j2] - want))
        assert worst < 1e-6

    def test_bottom_matches_finite_kernel(self, setup):
        family, pair, symbols, kern = setup
        worst = 0.0
        for m1, m2 in ((1, 1), (1, 2), (3, 2)):
            for y1, y2 in ((0, 0), (0, 1), (1, 1)):
                block = edge_kernel(symbols, pair, m1, y1, m2, y2, mode="bottom")
                for j1 in range(2):
                    for j2 in range(2):
                        x1 = 2 * (y1 - 8) + j1 + self.DELTA[m1]
                        x2 = 2 * (y2 - 8) + j2 + self.DELTA[m2]
                        want = float(kern(m1, x1, m2, x2))
                        worst = max(worst, abs(block[j1, j2] - want))
        assert worst < 1e-6

    def test_consistency_with_limit_kernel(self, setup):
        family, pair, symbols, _ = setup
        worst = 0.0
        for m1, m2 in ((1, 2), (2, 2), (3, 3)):
            block = edge_kernel(symbols, pair, m1, 0, m2, 0, mode="top")
            for j1 in range(2):
                for j2 in range(2):
                    x1 = j1 + self.DELTA[m1]
                    x2 = j2 + self.DELTA[m2]
                    want = float(limit_kernel(family, (m1, x1, m2, x2)).value)
                    worst = max(worst, abs(block[j1, j2] - want))
        assert worst < 1e-8

    def test_stable_under_node_doubling(self, setup):
        family, pair, symbols, _ = setup
        lo = edge_kernel(symbols, pair, 1, 0, 2, 0, mode="top", nodes=128)
        hi = edge_kernel(symbols, pair, 1, 0, 2, 0, mode="top", nodes=256)
        assert np.abs(lo - hi).max() < 1e-10

    def test_indicator_absent_unless_strictly_ordered(self, setup):
        family, pair, symbols, _ = setup
        for m1, m2 in ((2, 2), (3, 1)):
            block, _ = _indicator_block(symbols, m1, m2, 0, 0, 1.5, 64, 2)
            assert np.all(block == 0)
        block, _ = _indicator_block(symbols, 1, 3, 0, 0, 1.5, 64, 2)
        assert np.abs(block).max() > 0.1

    def test_scalar_chain_both_edges(self):
        family = scalar_family()
        pair = wiener_hopf_from_dynamics(family)
        symbols = strip_symbols(family)
        kern = tower_kernel(family, 11, IndexWindow(-14, 2))
        for y1, y2 in ((-2, -1), (0, 0), (-1, 0)):
            got = edge_kernel(symbols, pair, 1, y1, 1, y2, mode="top", j1=0, j2=0)
            assert abs(got - float(kern(1, y1, 1, y2))) < 1e-6
        for y1, y2 in ((0, 0), (0, 1)):
            got = edge_kernel(symbols, pair, 1, y1, 1, y2, mode="bottom", j1=0, j2=0)
            assert abs(got - float(kern(1, y1 - 12, 1, y2 - 12))) < 1e-6

    def test_inner_index_selection(self, setup):
        family, pair, symbols, _ = setup
        block = edge_kernel(symbols, pair, 1, 0, 2, 0, mode="top")
        single = edge_kernel(symbols, pair, 1, 0, 2, 0, mode="top", j1=1, j2=0)
        assert single == block[1, 0]
        with pytest.raises(ConfigError):
            edge_kernel(symbols, pair, 1, 0, 2, 0, j1=1)
        with pytest.raises(DomainError):
            edge_kernel(symbols, pair, 1, 0, 2, 0, j1=2, j2=0)

    def test_argument_validation(self, setup):
        family, pair, symbols, _ = setup
        with pytest.raises(ConfigError):
            edge_kernel(symbols, None, 1, 0, 2, 0)
        with pytest.raises(DomainError):
            edge_kernel(symbols, pair, 0, 0, 2, 0)
        with pytest.raises(DomainError):
            edge_kernel(symbols, pair, 1, 0, 4, 0)
        with pytest.raises(ConfigError):
            edge_kernel(symbols, pair, 1, 0, 2, 0, mode="side")
        with pytest.raises(ConfigError):
            edge_kernel(symbols, pair, 1, 0, 2, 0, nodes=100)
        with pytest.raises(DimensionError):
            edge_kernel(strip_symbols(scalar_family()), pair, 1, 0, 1, 0)
        with pytest.raises(DimensionError):
            edge_kernel([symbol_psi(2)], pair, 1, 0, 1, 0)
