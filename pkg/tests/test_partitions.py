from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from orbitree.linalg import zeros
from orbitree.partitions import (
    Order,
    block_nilpotent,
    compare,
    dim_r_extension,
    jordan_type,
    minimal_elements,
    normalize,
    omega_prime,
    orbit_dim,
    partitions,
    richardson,
    transpose,
    truncate,
)


def test_normalize():
    assert normalize([3, 3, 0]) == (3, 3)
    assert normalize([1, 4, 1]) == (4, 1, 1)
    assert normalize([]) == ()


def test_compare():
    assert compare([3, 1], [2, 2]) == Order.GREATER
    assert compare([4, 1, 1], [3, 3]) == Order.INCOMPARABLE
    assert compare([2, 2], [2, 2]) == Order.EQUAL


def test_transpose_and_dim():
    assert transpose([3, 1]) == (2, 1, 1)
    assert transpose([2, 2]) == (2, 2)
    assert transpose([5]) == (1,) * 5
    assert orbit_dim([5]) == 20
    assert orbit_dim([1] * 5) == 0
    assert orbit_dim([4, 1, 1]) == 24
    # cross-check against the Richardson count 2 dim U_P for blocks (3,1,1,1)
    assert orbit_dim([4, 1, 1]) == 36 - 9 - 1 - 1 - 1


def test_jordan_examples():
    assert jordan_type(zeros(3, 3)) == (1, 1, 1)
    assert jordan_type(block_nilpotent([4])) == (4,)
    m = zeros(4, 4)
    m[1][0] = m[2][1] = Fraction(1)
    assert jordan_type(m) == (3, 1)


def test_richardson_examples():
    assert richardson((2, 2)) == (2, 2)
    assert richardson((1, 1, 1)) == (3,)
    assert richardson((3, 1)) == (2, 1, 1)
    assert omega_prime([(4, 1)]) == (4,)
    assert omega_prime([(1, 2), (1, 2)]) == (2, 2)


def test_minimal_and_truncate():
    assert minimal_elements([(4, 1, 1), (3, 3), (4, 2)]) == {(4, 1, 1), (3, 3)}
    assert minimal_elements([(2, 2), (3, 1), (4,)]) == {(2, 2)}
    assert truncate([(4, 1), (3, 2)], 3) == {(3, 2)}
    assert truncate([(4, 1, 1), (3, 3)], 3) == {(3, 3)}


def test_dim_r_extension_examples():
    assert dim_r_extension([2], 2) == 4
    assert dim_r_extension([1], 1) == 0
    assert dim_r_extension([3], 2) == orbit_dim([3, 2]) // 2 == 8


parts = st.integers(1, 9).flatmap(lambda n: st.sampled_from(list(partitions(n))))


@given(parts)
def test_transpose_involution(a):
    assert transpose(transpose(a)) == a
    assert sum(transpose(a)) == sum(a)


@given(parts, parts)
def test_transpose_reverses_order(a, b):
    if sum(a) == sum(b):
        assert compare(a, b) == compare(transpose(b), transpose(a))


@settings(deadline=None, max_examples=40)
@given(parts)
def test_jordan_of_block_matrix(a):
    assert jordan_type(block_nilpotent(a)) == a
