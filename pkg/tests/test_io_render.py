import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbitree import lie
from orbitree.af import AF, Group
from orbitree.canonical import xi_st
from orbitree.families import build_fak, whittaker
from orbitree.io import (
    FormatError,
    af_from_json,
    af_to_json,
    emit,
    matrix_from_json,
    tree_digest,
    tree_from_json,
    tree_to_dot,
    tree_to_json,
)
from orbitree.render import annotate, render, to_ascii, to_svg
from orbitree.scalars import T
from orbitree.steps import Node, Step, TermFamily, leaf

from .test_acceptance import GOLDEN, example_f

Q = Fraction


def test_af_round_trip():
    for f in (whittaker(3), example_f(), AF.empty(2), build_fak([2, 1], 2).af):
        assert af_from_json(json.loads(json.dumps(af_to_json(f)))) == f


def test_parametric_round_trip():
    f = AF.on_roots(3, [(1, 2), (1, 3)], {(1, 2): T, (1, 3): Q(1, 2)})
    assert af_from_json(af_to_json(f)) == f


def test_tree_round_trip_and_digest():
    tree = xi_st(example_f())
    back = tree_from_json(json.loads(json.dumps(tree_to_json(tree))))
    assert tree_digest(back) == tree_digest(tree)
    assert tree_digest(xi_st(whittaker(3))) != tree_digest(tree)


def test_dot_three_vertices():
    f = AF.empty(2)
    tree = xi_st(f)
    assert tree.size() == 3
    dot = tree_to_dot(tree)
    assert dot.count("->") == 2
    assert dot.startswith("digraph")


def test_matrix_parse_errors():
    assert matrix_from_json([[0, 1], [0, 0]]) == [[Q(0), Q(1)], [Q(0), Q(0)]]
    with pytest.raises(FormatError):
        matrix_from_json([[0, 1], [0]])
    with pytest.raises(FormatError):
        af_from_json({"n": 2})


def test_emit_rejects_bad_combination():
    with pytest.raises(FormatError):
        emit("dot", whittaker(2))


def test_render_whittaker():
    g = render(whittaker(2))
    assert g.cells == {(1, 2): ("disc", "black")}
    assert to_ascii(g) == (GOLDEN / "whittaker2.txt").read_text()


def test_render_trivial_radical():
    g = render(AF.trivial(Group.radical([2, 2])))
    assert set(g.cells) == {(1, 3), (1, 4), (2, 3), (2, 4)}
    assert set(g.cells.values()) == {("disc", "gray")}


def test_render_example_layout():
    g = render(example_f())
    block = {(i, j) for i in (1, 2, 3) for j in (4, 5, 6)}
    assert all(g.cells[p][0] == "disc" for p in block)
    for p in block:
        assert g.cells[p][1] == ("black" if p[1] == p[0] + 3 else "gray")
    paired = {(1, 2), (4, 5), (2, 3), (5, 6), (1, 3), (4, 6)}
    assert all(g.cells[p][0] == "ring" for p in paired)
    assert g.cells[(1, 3)][1] == "gray" and g.cells[(1, 2)][1] == "black"
    assert g.groups[(4, 5)] == {(1, 2): 1, (4, 5): 1}


def test_svg_annotations():
    g = annotate(render(example_f()), "exchange_x", [(1, 3)])
    svg = to_svg(g)
    assert "cyan" in svg and svg.startswith("<svg")
    assert "cyan" not in to_ascii(g)
    data = g.as_json()
    assert data["annotations"] == [{"kind": "exchange_x", "entries": [[1, 3]]}]


@settings(max_examples=20, deadline=None)
@given(st.dictionaries(st.sampled_from([(1, 2), (1, 3), (2, 3)]), st.integers(-3, 3).map(Q)))
def test_root_af_pictures_are_discs(vals):
    pos = [(1, 2), (1, 3), (2, 3)]
    f = AF.on_roots(3, pos, vals)
    g = render(f)
    assert set(g.cells) | g.uncovered == set(pos)
    for p, (glyph, shade) in g.cells.items():
        assert glyph == "disc"
        assert shade == ("black" if vals.get(p, 0) != 0 else "gray")


def test_uncovered_entries():
    f = AF.on_roots(3, [(1, 2), (1, 3), (2, 3)], {(1, 3): Q(1)})
    g = render(f)
    assert g.uncovered == {(1, 2), (2, 3)}
    assert g.cells == {(1, 3): ("disc", "black")}
    assert to_ascii(g) == "1 ? ●\n· 2 ?\n· · 3\n"
