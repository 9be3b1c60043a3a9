"""Shared hypothesis strategies for exact-arithmetic tests."""

from fractions import Fraction

from hypothesis import strategies as st

from aztec.numerics import ExactMatrix, GaussianRational


def fractions(max_num=6, allow_zero=True, positive=False):
    num_min = 1 if (positive or not allow_zero) else -max_num
    if positive:
        nums = st.integers(min_value=1, max_value=max_num)
    else:
        nums = st.integers(min_value=-max_num, max_value=max_num)
        if not allow_zero:
            nums = nums.filter(lambda n: n != 0)
    dens = st.integers(min_value=1, max_value=max_num)
    return st.builds(Fraction, nums, dens)


def gaussian_rationals(max_num=4):
    return st.builds(GaussianRational, fractions(max_num), fractions(max_num))


def square_matrices(n, entries=None):
    if entries is None:
        entries = fractions()
    return st.lists(
        st.lists(entries, min_size=n, max_size=n), min_size=n, max_size=n
    ).map(ExactMatrix)


def positive_fraction_grids(nrows, ncols, max_num=5):
    cell = fractions(max_num=max_num, positive=True)
    return st.lists(
        st.lists(cell, min_size=ncols, max_size=ncols),
        min_size=nrows,
        max_size=nrows,
    )
