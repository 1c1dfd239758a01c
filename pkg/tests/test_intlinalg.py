from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from holobias import intlinalg as il


def test_hnf_is_unimodular_transform():
    A = [[2, 4, 4], [-6, 6, 12], [10, -4, -16]]
    H, U = il.hermite_normal_form(A)
    assert il.matmul(U, A) == H
    assert H[0][0] > 0


def test_left_kernel_progression_is_saturated():
    K = il.left_kernel([[11], [29], [47]])
    assert len(K) == 2
    assert all(11 * k[0] + 29 * k[1] + 47 * k[2] == 0 for k in K)
    # (29,-11,0) and (47,0,-11) only span an index-11 sublattice; the kernel must be larger.
    M = il.right_kernel(K, 3)
    assert M in ([[11, 29, 47]], [[-11, -29, -47]])


def test_clear_denominators_preserves_kernel():
    rows = [[Fraction(11, 18)], [Fraction(29, 18)], [Fraction(47, 18)]]
    assert il.clear_denominators(rows) == [[11], [29], [47]]


def test_rank():
    assert il.rank([[1, 2], [2, 4]]) == 1
    assert il.rank([[1, 0], [0, 1]]) == 2
    assert il.rank([]) == 0


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3), min_size=1, max_size=5))
def test_kernel_rank_nullity(A):
    K = il.left_kernel(A)
    assert all(v == 0 for row in il.matmul(K, A) for v in row) if K else True
    assert len(K) + il.rank(A) == len(A)
