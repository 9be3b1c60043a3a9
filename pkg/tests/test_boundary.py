import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aztec.boundary import (
    RecurrenceFrame,
    descent_frames,
    propagate_full_inverse,
    w_inverse_recurrence,
)
from aztec.dynamics import FaceField, ShuffleState, shuffle_step
from aztec.errors import ConfigError, ConsistencyError, DimensionError, DomainError
from aztec.graphs import build_aztec, enumerate_tilings, lgv_matrix, partition_function
from aztec.kasteleyn import kasteleyn_aztec, schur_blocks
from aztec.numerics import ExactMatrix, GaussianRational, i_pow
from aztec.weights import WeightField, Window

from test_graphs import aztec_field

GR = GaussianRational


def frame_partition_function(frame):
    """Enumerate the diamond with the frame's own edge weights."""
    k = frame.size
    shape = build_aztec(k, WeightField.uniform(1, 1, extent=Window(0, k, 0, k)))
    total = Fraction(0)
    for tiling, _ in enumerate_tilings(shape):
        weight = Fraction(1)
        for black, white in tiling.pairs():
            weight *= frame.edge_weight(black, white)
        total += weight
    return total


class TestRecurrenceFrame:
    def test_initial_labels_and_delta(self):
        field = WeightField.from_grids(
            [[Fraction(2, 3)] * 2] * 2, [[Fraction(5, 7)] * 2] * 2
        )
        frame = RecurrenceFrame.from_weights(field, 1)
        assert frame.label(0, 0) == (1, 1, Fraction(5, 7), Fraction(2, 3))
        assert frame.delta(0, 0) == Fraction(5, 7) + Fraction(2, 3)

    def test_initial_edge_weights_match_graph(self):
        rng = random.Random(101)
        field = aztec_field(rng, 2)
        frame = RecurrenceFrame.from_weights(field, 2)
        graph = build_aztec(2, field)
        for (black, white), weight in graph.edges.items():
            assert frame.edge_weight(black, white) == weight

    def test_edge_weight_outside_diamond(self):
        frame = RecurrenceFrame.from_weights(WeightField.uniform(1, 1), 1)
        with pytest.raises(DomainError):
            frame.edge_weight((4, 1), (5, 2))

    def test_initial_face_field_matches_dynamics(self):
        rng = random.Random(103)
        field = aztec_field(rng, 3)
        faces = FaceField.from_weights(field)
        frame = RecurrenceFrame.from_weights(field, 3)
        own = frame.face_field()
        for i in range(3):
            for j in range(3):
                assert own.even_at(i, j) == faces.even_at(i, j)
        for i in range(2):
            for j in range(2):
                assert own.odd_at(i, j) == faces.odd_at(i, j)

    def test_descend_stops_at_size_one(self):
        frame = RecurrenceFrame.from_weights(WeightField.uniform(1, 1), 1)
        with pytest.raises(ConfigError):
            frame.descend()

    def test_labels_must_cover_diamond(self):
        with pytest.raises(ConfigError):
            RecurrenceFrame(2, {(0, 0): (1, 1, 1, 1)})

    def test_labels_must_be_positive(self):
        with pytest.raises(ConfigError):
            RecurrenceFrame(1, {(0, 0): (1, 1, -1, 1)})

    def test_descent_keeps_labels_positive(self):
        rng = random.Random(107)
        frame = RecurrenceFrame.from_weights(aztec_field(rng, 4), 4)
        while frame.size > 1:
            frame = frame.descend()
            for i in range(frame.size):
                for j in range(frame.size):
                    assert all(v > 0 for v in frame.label(i, j))
                    assert frame.delta(i, j) > 0


class TestSharedShufflePath:
    def test_descent_face_fields_match_shuffle_step(self):
        # the recentring slides the window one face in j per generation,
        # so frame face (i, j) at size n-m is shuffle face (i, j+m)
        n = 4
        rng = random.Random(109)
        field = aztec_field(rng, n)
        frame = RecurrenceFrame.from_weights(field, n)
        state = ShuffleState(FaceField.from_weights(field))
        for m in range(1, n):
            frame = frame.descend()
            state = shuffle_step(state)
            own = frame.face_field()
            k = n - m
            for i in range(k):
                for j in range(k):
                    assert own.even_at(i, j) == state.faces.even_at(i, j + m)
            for i in range(k - 1):
                for j in range(k - 1):
                    assert own.odd_at(i, j) == state.faces.odd_at(i, j + m)


class TestWInverseRecurrence:
    def test_size_one_is_reciprocal_cross_sum(self):
        field = WeightField.from_grids(
            [[Fraction(2, 3)] * 2] * 2, [[Fraction(5, 7)] * 2] * 2
        )
        out = w_inverse_recurrence(field, 1)
        assert out.shape == (1, 1)
        assert out[0, 0] == Fraction(21, 29)

    def test_uniform_two_matches_frozen_inverse(self):
        field = WeightField.uniform(1, 1, extent=Window(0, 2, 0, 2))
        out = w_inverse_recurrence(field, 2)
        assert out[0, 0] == Fraction(3, 4)
        assert out[0, 1] == Fraction(-1, 4)
        assert out[1, 0] == Fraction(-1, 4)
        assert out[1, 1] == Fraction(1, 4)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_matches_direct_inverse(self, n):
        rng = random.Random(200 + n)
        field = aztec_field(rng, n)
        assert w_inverse_recurrence(field, n) == lgv_matrix(build_aztec(n, field)).inverse()

    def test_accumulated_inverses_on_every_frame(self):
        rng = random.Random(211)
        field = aztec_field(rng, 3)
        frames = descent_frames(field, 3)
        assert [frame.size for frame in frames] == [3, 2, 1]
        for frame in frames:
            assert frame.inverse is not None
            assert frame.inverse.shape == (frame.size, frame.size)
        lab = frames[-1].label(0, 0)
        assert frames[-1].inverse[0, 0] == lab[0] / frames[-1].delta(0, 0)

    def test_checkerboard_signs(self):
        rng = random.Random(223)
        out = w_inverse_recurrence(aztec_field(rng, 3), 3)
        for i in range(3):
            for j in range(3):
                assert (out[i, j] > 0) == ((i + j) % 2 == 0)

    def test_sign_relation_to_kasteleyn_inverse(self):
        # K^{-1}((2i-1,0),(0,2j-1)) = i^(1-i-j) (W^{-1})(i,j), 1-based;
        # the exponent is the reciprocal of the tilde_w phase
        n = 3
        rng = random.Random(227)
        field = aztec_field(rng, n)
        out = w_inverse_recurrence(field, n)
        k = kasteleyn_aztec(build_aztec(n, field))
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                assert k.inverse_entry((2 * i - 1, 0), (0, 2 * j - 1)) == i_pow(
                    1 - i - j
                ) * GR(out[i - 1, j - 1], 0)

    def test_matches_schur_complement_inverse(self):
        n = 3
        rng = random.Random(229)
        field = aztec_field(rng, n)
        out = w_inverse_recurrence(field, n)
        tilde = schur_blocks(kasteleyn_aztec(build_aztec(n, field))).tilde_w.inverse()
        for i in range(n):
            for j in range(n):
                assert tilde[i, j] == i_pow(-1 - i - j) * GR(out[i, j], 0)

    def test_size_must_be_positive(self):
        with pytest.raises(ConfigError):
            w_inverse_recurrence(WeightField.uniform(1, 1), 0)

    @given(
        st.integers(min_value=1, max_value=3),
        st.lists(st.fractions(min_value=Fraction(1, 4), max_value=4), min_size=32, max_size=32),
    )
    @settings(max_examples=12, deadline=None)
    def test_recurrence_equals_inverse_on_random_fields(self, n, pool):
        values = iter(pool)
        a = [[next(values) for _ in range(n + 1)] for _ in range(n + 1)]
        b = [[next(values) for _ in range(n + 1)] for _ in range(n + 1)]
        field = WeightField.from_grids(a, b)
        assert w_inverse_recurrence(field, n) == lgv_matrix(build_aztec(n, field)).inverse()


class TestPartitionChain:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_initial_frame_reproduces_partition_function(self, n):
        rng = random.Random(300 + n)
        field = aztec_field(rng, n)
        frame = RecurrenceFrame.from_weights(field, n)
        assert frame_partition_function(frame) == partition_function(build_aztec(n, field))

    @pytest.mark.parametrize("n", [2, 3])
    def test_one_step_ratio_is_delta_product(self, n):
        rng = random.Random(310 + n)
        frames = descent_frames(aztec_field(rng, n), n)
        for upper, lower in zip(frames, frames[1:]):
            assert frame_partition_function(upper) == upper.delta_product() * frame_partition_function(lower)

    def test_chain_telescopes_to_cross_sum(self):
        # the size-1 partition function is the last frame's own delta,
        # so the full product of delta products gives Z_n outright
        rng = random.Random(321)
        field = aztec_field(rng, 3)
        frames = descent_frames(field, 3)
        total = Fraction(1)
        for frame in frames:
            total *= frame.delta_product()
        assert total == partition_function(build_aztec(3, field))


class TestPropagateFullInverse:
    def test_size_one_matches_kasteleyn_inverse(self):
        rng = random.Random(401)
        field = aztec_field(rng, 1)
        w_inv = w_inverse_recurrence(field, 1)
        assert propagate_full_inverse(field, 1, w_inv) == kasteleyn_aztec(
            build_aztec(1, field)
        ).matrix.inverse()

    def test_random_size_three_matches_direct(self):
        rng = random.Random(403)
        field = aztec_field(rng, 3)
        w_inv = w_inverse_recurrence(field, 3)
        direct = kasteleyn_aztec(build_aztec(3, field)).matrix.inverse()
        assert propagate_full_inverse(field, 3, w_inv) == direct

    def test_zero_inverse_reproduces_bulk_block_only(self):
        rng = random.Random(409)
        field = aztec_field(rng, 2)
        blocks = schur_blocks(kasteleyn_aztec(build_aztec(2, field)))
        out = propagate_full_inverse(field, 2, ExactMatrix.zeros(2, 2), check=False)
        m = blocks.d_inverse.shape[0]
        for i in range(2 + m):
            for j in range(2 + m):
                if i < 2 or j < 2:
                    assert out[i, j] == GR(0, 0)
                else:
                    assert out[i, j] == blocks.d_inverse[i - 2, j - 2]

    def test_inconsistent_inverse_rejected(self):
        rng = random.Random(419)
        field = aztec_field(rng, 2)
        w_inv = w_inverse_recurrence(field, 2)
        w_inv[0, 0] = w_inv[0, 0] + 1
        with pytest.raises(ConsistencyError):
            propagate_full_inverse(field, 2, w_inv)

    def test_shape_mismatch_rejected(self):
        field = WeightField.uniform(1, 1)
        with pytest.raises(DimensionError):
            propagate_full_inverse(field, 2, ExactMatrix.zeros(3, 3))
