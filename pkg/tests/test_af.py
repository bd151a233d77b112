from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from orbitree import lie
from orbitree.af import (
    AF,
    DomainError,
    Group,
    XVariety,
    compose,
    h_minimal,
    is_a2_1d,
    itr,
    j_matrix,
    lower_right,
    rg,
    stab_torus_components,
    standard_embed,
)
from orbitree.families import build_embedj, radical_af, whittaker
from orbitree.partitions import jordan_type

from .test_acceptance import example_f

import pytest

Q = Fraction


def test_generated_groups():
    assert Group.generated(3, [lie.unit(1, 2), lie.unit(2, 3)]) == Group.upper(3)
    assert Group.generated(3, [lie.unit(1, 3)]).dim == 1
    assert Group.generated(6, [{(1, 2): Q(1), (4, 5): Q(1)}]).dim == 1


def test_generated_rejects_non_nilpotent():
    with pytest.raises(DomainError):
        Group.generated(2, [lie.unit(1, 2), lie.unit(2, 1)])


def test_a2_1d():
    assert is_a2_1d(Group.roots(3, [(1, 3)]))
    assert not is_a2_1d(Group.span(3, [{(1, 2): 1, (2, 3): 1}]))
    assert is_a2_1d(Group.span(6, [{(1, 2): 1, (4, 5): 1}]))


def test_af_consistency_checked():
    with pytest.raises(DomainError):
        AF.from_pairs(2, [({(1, 2): Q(1)}, Q(1)), ({(1, 2): Q(2)}, Q(1))])
    bad = AF.on_roots(3, [(1, 2), (2, 3), (1, 3)], {(1, 3): Q(1)})
    with pytest.raises(DomainError):
        bad.check()


def test_co_action():
    f = whittaker(3)
    assert f.transform(lambda x: x, 3) == f
    w2 = whittaker(2)
    swapped = w2.transform(lambda x: {(j, i): v for (i, j), v in x.items()}, 2)
    assert swapped.domain == Group.roots(2, [(2, 1)])


def test_restrict_and_embed():
    f = whittaker(3)
    assert f.restrict(f.domain) == f
    assert f.restrict(Group.trivial(3)) == AF.empty(3)
    emb = lower_right(whittaker(2), 3)
    assert emb.domain == Group.roots(3, [(2, 3)])
    assert standard_embed({1: 2, 2: 3}, whittaker(2), 3) == emb


def test_compose_dimensions():
    spec = build_embedj([2], 2)
    assert spec.af.n == 4 and spec.af.dim == 4


def test_compose_with_trivial_extension():
    f = AF.on_roots(3, [(1, 2)], {(1, 2): Q(1)})
    v = AF.trivial(Group.roots(3, [(1, 3)]))
    out = compose(v, f)
    assert out.dim == 2 and out.evaluate(lie.unit(1, 3)) == 0 and out.evaluate(lie.unit(1, 2)) == 1


def test_j_matrix_and_itr():
    m = j_matrix(whittaker(3))
    assert jordan_type(m) == (3,)
    triv = AF.trivial(Group.radical([2, 2]))
    assert jordan_type(j_matrix(triv)) == (1, 1, 1, 1)
    assert itr(j_matrix(whittaker(3)), Group.upper(3)) == whittaker(3)


def test_x_variety_dims():
    xv = XVariety(whittaker(2))
    assert xv.dim == 3
    assert xv.contains([[Q(0), Q(0)], [Q(1), Q(0)]])
    assert XVariety(AF.empty(3)).dim == 9
    assert XVariety(example_f()).dim == 24


def test_rg():
    f = example_f()
    r = rg(f)
    assert r.domain == Group.roots(6, [(i, j) for i in (1, 2, 3) for j in (4, 5, 6)])
    assert rg(whittaker(3)) == whittaker(3)
    single = AF.from_pairs(6, [({(1, 2): Q(1), (4, 5): Q(1)}, Q(1))])
    assert rg(single) == AF.empty(6)


def test_h_minimal():
    f = example_f()
    x = Group.span(6, [{(1, 2): Q(1), (4, 5): Q(1)}])
    assert h_minimal(x, lambda v: rg(f).is_fixed_by(v))
    assert not h_minimal(x, lambda v: True)
    assert h_minimal(Group.roots(6, [(1, 2)]), lambda v: True)


def test_torus_components():
    f = radical_af([2, 2], [(1, 3), (2, 4)])
    assert sorted(map(sorted, stab_torus_components(f))) == [[1, 3], [2, 4]]
    assert [sorted(c) for c in stab_torus_components(whittaker(4))] == [[1, 2, 3, 4]]
    assert len(stab_torus_components(AF.trivial(Group.radical([1, 2])))) == 3


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_itr_recovers_af_on_its_domain(coords):
    f = whittaker(3)
    xv = XVariety(f)
    j = xv.point([Q(c) for c in coords] + [Q(0)] * (xv.dim - 3))
    assert itr(j, f.domain) == f
