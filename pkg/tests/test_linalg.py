from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from orbitree.linalg import (
    affine_solve,
    inverse,
    matmul,
    matrix_rank,
    nullspace,
    power_rank_sequence,
    zeros,
)
from orbitree.scalars import T, is_zero, parse, simplify, to_str

Q = Fraction


def block(n, pairs):
    m = zeros(n, n)
    for i, j in pairs:
        m[i - 1][j - 1] = Q(1)
    return m


def test_rank_examples():
    assert matrix_rank(zeros(3, 3)) == 0
    assert matrix_rank(block(3, [(1, 2), (2, 3)])) == 2
    assert matrix_rank([[T, Q(1)], [Q(0), T]]) == 2


def test_power_ranks():
    assert power_rank_sequence(block(3, [(2, 1), (3, 2)]), 3) == [2, 1, 0]
    assert power_rank_sequence(zeros(4, 4), 2) == [0, 0]
    assert power_rank_sequence(block(4, [(2, 1), (3, 2)]), 3) == [2, 1, 0]


def test_affine_solve():
    assert affine_solve([], 4).dim == 4
    assert affine_solve([([Q(1), Q(0)], Q(1)), ([Q(1), Q(0)], Q(2))], 2) is None


def test_parametric_zero_test():
    x = simplify(T * T - T * T)
    assert is_zero(x)
    assert not is_zero(T - 1)
    assert to_str(parse("3/4")) == "3/4"


small = st.integers(-5, 5).map(Q)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3))
def test_nullspace_is_kernel(m):
    for v in nullspace(m):
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in m)
    assert len(nullspace(m)) + matrix_rank(m) == 3


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3))
def test_inverse_round_trip(m):
    if matrix_rank(m) < 3:
        return
    prod = matmul(m, inverse(m))
    assert prod == [[Q(int(i == j)) for j in range(3)] for i in range(3)]
