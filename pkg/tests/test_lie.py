from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from orbitree import lie

Q = Fraction


def test_bracket_of_simple_roots():
    assert lie.bracket(lie.unit(1, 2), lie.unit(2, 3)) == {(1, 3): Q(1)}
    assert lie.bracket(lie.unit(1, 2), lie.unit(1, 3)) == {}


def test_exp_of_root_vector():
    g = lie.exp_nilpotent({(1, 2): Q(3)}, 2)
    assert lie.to_dense(g, 2) == [[Q(1), Q(3)], [Q(0), Q(1)]]


coef = st.integers(-4, 4).map(Q)


@given(coef, coef, coef)
def test_exp_inverse_and_conjugation(a, b, c):
    x = {(1, 2): a, (2, 3): b, (1, 3): c}
    x = {k: v for k, v in x.items() if v}
    g = lie.exp_nilpotent(x, 3)
    ginv = lie.exp_nilpotent({k: -v for k, v in x.items()}, 3)
    assert lie.matmul(g, ginv) == lie.identity(3)
    y = lie.unit(1, 3)
    # e13 is central in u_3
    assert lie.conjugate(g, y, ginv) == y
