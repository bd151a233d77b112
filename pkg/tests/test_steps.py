from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbitree import lie
from orbitree.af import AF, Group, XVariety
from orbitree.canonical import xi_st
from orbitree.families import whittaker
from orbitree.steps import (
    Marker,
    Node,
    Step,
    StepError,
    TermFamily,
    co_step,
    e_step,
    e_step_partition_ok,
    eu_step,
    exchange_isomorphism,
    graft,
    invert_path,
    leaf,
    path,
    path_output,
    validate_tree,
)
from orbitree.partitions import jordan_type

from .test_acceptance import example_f

Q = Fraction


def exchange_example():
    f = AF.on_roots(3, [(2, 3), (1, 3)], {(1, 3): Q(1)})
    return f, Group.roots(3, [(1, 2)]), Group.roots(3, [(2, 3)])


def test_e_step_rank_one():
    const, fam = e_step(AF.empty(2), lie.unit(1, 2), hint="torus")
    assert const.rep == AF.on_roots(2, [(1, 2)], {})
    assert fam.marker == Marker.ORBIT and fam.witness["kind"] == "torus"
    assert fam.sample == whittaker(2)


def test_e_step_with_root_value():
    f = AF.on_roots(3, [(1, 2)], {(1, 2): Q(1)})
    const, fam = e_step(f, lie.unit(1, 3))
    assert const.rep.dim == 2 and fam.marker == Marker.ORBIT
    fam.check()


def test_e_step_rejects_non_normalizing():
    f = AF.on_roots(3, [(1, 2)], {(1, 2): Q(1)})
    with pytest.raises(StepError):
        e_step(f, lie.unit(2, 3))
    with pytest.raises(StepError):
        e_step(f, lie.unit(1, 2))


def test_exchange_example():
    f, x, y = exchange_example()
    out = eu_step(f, x, y)
    assert out.domain == Group.roots(3, [(1, 2), (1, 3)])
    assert out.evaluate(lie.unit(1, 2)) == 0 and out.evaluate(lie.unit(1, 3)) == 1
    assert eu_step(out, y, x) == f


def test_exchange_degenerate():
    f = AF.on_roots(3, [(2, 3), (1, 3)], {})
    _, x, y = exchange_example()
    with pytest.raises(StepError, match="degenerate"):
        eu_step(f, x, y)


def test_invert_path():
    f, x, y = exchange_example()
    p = path(f, [Step("eu", x=x, y=y)])
    back = invert_path(p)
    assert back.af == path_output(p) and path_output(back) == f
    g = lie.permutation_matrix({1: 2, 2: 1, 3: 3})
    q = path(whittaker(3), [Step("co", g=g, ginv=g)])
    assert path_output(invert_path(q)) == whittaker(3)
    assert invert_path(leaf(f)).af == f


def test_invert_refuses_nonzero_on_y():
    f = AF.on_roots(3, [(2, 3), (1, 3)], {(1, 3): Q(1), (2, 3): Q(1)})
    _, x, y = exchange_example()
    p = path(f, [Step("eu", x=x, y=y)])
    with pytest.raises(StepError):
        invert_path(p)


def test_co_step_identity():
    f = whittaker(3)
    assert co_step(f, lie.identity(3)) == f


def test_graft():
    f, x, y = exchange_example()
    p = path(f, [Step("eu", x=x, y=y)])
    assert graft({}, p) is not None and path_output(graft({}, p)) == path_output(p)
    sub = xi_st(path_output(p))
    tree = graft({path_output(p): sub}, p)
    validate_tree(tree)
    assert tree.size() == p.size() - 1 + sub.size()


def test_validate_catches_bad_child():
    f, x, y = exchange_example()
    bad = Node(TermFamily(f), Step("eu", x=x, y=y), (leaf(f),))
    with pytest.raises(StepError):
        validate_tree(bad)


def test_xi_tree_of_example_is_valid():
    tree = xi_st(example_f())
    validate_tree(tree)
    kinds = [n.step.kind for n in tree.walk() if n.step is not None]
    assert kinds[:4] == ["eu"] * 4 or "eu" in kinds


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=6, max_size=6))
def test_e_step_partition_property(coords):
    f = AF.on_roots(3, [(1, 2)], {(1, 2): Q(1)})
    xv = XVariety(f)
    j = xv.point([Q(c) for c in coords] + [Q(0)] * (xv.dim - 6))
    assert e_step_partition_ok(f, lie.unit(1, 3), j)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=2, max_size=2))
def test_exchange_isomorphism_keeps_orbit(coords):
    f, x, y = exchange_example()
    z = eu_step(f, x, y)
    sl = XVariety(f, lower=True)
    j = sl.point([Q(c) for c in coords] + [Q(0)] * (sl.dim - 2))
    j2 = exchange_isomorphism(f, x, y, j)
    assert XVariety(z).contains(j2)
    assert jordan_type(j2) == jordan_type(j)
