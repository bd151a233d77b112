"""Grid pictures of AFs.

Every entry where the domain is nontrivial gets a glyph chosen from the
smallest one-dimensional group V in the stabilizer of the root part of the
AF that is nontrivial on that entry: a disc when V is a root group, a ring
when V is minimal even for the full stabilizer in GL_n, a triangle
otherwise.  The glyph is black when the AF is nonzero on V, gray if not.
Entries the stabilizer misses entirely are marked as uncovered.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

from . import lie
from .af import AF, Group, h_minimal, is_a2_1d, rg
from .linalg import Echelon, nullspace
from .scalars import is_zero, to_str

GLYPHS = ("disc", "ring", "triangle")
ASCII = {
    ("disc", "black"): "●",
    ("disc", "gray"): "○",
    ("ring", "black"): "◎",
    ("ring", "gray"): "◌",
    ("triangle", "black"): "▲",
    ("triangle", "gray"): "△",
}
CELL = 24


@dataclass
class PictureGrid:
    n: int
    cells: dict = field(default_factory=dict)  # (i, j) -> (glyph, shade)
    groups: dict = field(default_factory=dict)  # (i, j) -> generating vector of V
    annotations: list = field(default_factory=list)  # (kind, [(i, j), ...])
    uncovered: set = field(default_factory=set)  # entries of D_F with no minimal group

    def as_json(self) -> dict:
        return {
            "n": self.n,
            "cells": [
                {"row": i, "col": j, "glyph": g, "shade": s, "group": lie_to_json(self.groups[(i, j)])}
                for (i, j), (g, s) in sorted(self.cells.items())
            ],
            "annotations": [{"kind": k, "entries": [list(p) for p in ps]} for k, ps in self.annotations],
            "uncovered": [list(p) for p in sorted(self.uncovered)],
        }


def lie_to_json(v: dict) -> list:
    return [[i, j, to_str(c)] for (i, j), c in sorted(v.items())]


# ---------------------------------------------------------------- stabilizers


def stabilizer_in(domain: Group, f: AF) -> Group:
    """Elements x of ``domain`` with [x, D_f] in D_f and f([x, D_f]) = 0."""
    basis = domain.basis
    if not basis:
        return domain
    ech = Echelon()
    for b, v in f.pairs():
        ech.insert(dict(b), v)
    rows: list[list] = []
    for y in f.domain.basis:
        reds = [ech.reduce(lie.bracket(b, y)) for b in basis]
        # the remainder is linear in x and must vanish; the payload is -f on the rest
        for k in sorted({k for rem, _ in reds for k in rem}):
            rows.append([rem.get(k, 0) for rem, _ in reds])
        rows.append([val for _, val in reds])
    if not rows:
        return domain
    out = []
    for vec in nullspace(rows):
        x: dict = {}
        for c, b in zip(vec, basis):
            if is_zero(c):
                continue
            for k, v in b.items():
                x[k] = x.get(k, 0) + c * v
        out.append({k: v for k, v in x.items() if not is_zero(v)})
    return Group.span(domain.n, out)


def gl_fixes(f: AF, x: dict) -> bool:
    return f.is_fixed_by(x)


# ---------------------------------------------------------------- minimal groups


def minimal_group(h: Group, entry: tuple, max_support: int = 4) -> Optional[dict]:
    """Smallest-support a2-1d vector of h nontrivial on ``entry``."""
    if h.contains(lie.unit(*entry)):
        return lie.unit(*entry)
    # a root group inside h can always be subtracted off, so it never
    # appears in a smallest support
    support = sorted(h.support - h.root_positions - {entry})
    compatible = [p for p in support if is_a2_1d(Group.span(h.n, [{entry: 1, p: 1}]))]
    for size in range(1, max_support):
        for extra in combinations(compatible, size):
            s = (entry,) + extra
            v = _vector_on(h, s)
            if v is not None and is_a2_1d(Group.span(h.n, [v])):
                return v
    return None


def _vector_on(h: Group, positions: tuple) -> Optional[dict]:
    """A vector of h supported exactly on ``positions`` (when unique up to scale)."""
    pos = set(positions)
    # echelon with the chosen positions last: rows pivoting there live inside them
    ech = Echelon(lambda p: (p in pos, p))
    for b in h.basis:
        ech.insert(dict(b))
    inside = [row for p, (row, _) in ech.rows.items() if p in pos]
    if len(inside) != 1 or set(inside[0]) != pos:
        return None
    x = inside[0]
    lead = x[min(x)]
    return {k: v / lead for k, v in x.items()}


# ---------------------------------------------------------------- render


def render(f: AF) -> PictureGrid:
    r = rg(f)
    h = stabilizer_in(f.domain, r)
    grid = PictureGrid(f.n)
    for entry in sorted(f.domain.support):
        v = minimal_group(h, entry)
        if v is None:
            # the stabilizer misses this entry entirely (outside the family
            # pictures this happens, e.g. f = e13 on U_3)
            grid.uncovered.add(entry)
            continue
        if len(v) == 1:
            glyph = "disc"
        elif h_minimal(Group.span(f.n, [v]), lambda x: gl_fixes(r, x)):
            glyph = "ring"
        else:
            glyph = "triangle"
        shade = "gray" if is_zero(f.evaluate(v)) else "black"
        grid.cells[entry] = (glyph, shade)
        grid.groups[entry] = v
    return grid


def to_ascii(grid: PictureGrid) -> str:
    """One line per row; the diagonal shows the index (mod 10), '·' marks empty cells.

    Uncovered entries show '?'.
    """
    lines = []
    for i in range(1, grid.n + 1):
        row = []
        for j in range(1, grid.n + 1):
            if i == j:
                row.append(str(i % 10))
            elif (i, j) in grid.cells:
                row.append(ASCII[grid.cells[(i, j)]])
            elif (i, j) in grid.uncovered:
                row.append("?")
            else:
                row.append("·")
        lines.append(" ".join(row))
    return "\n".join(lines) + "\n"


def to_svg(grid: PictureGrid) -> str:
    size = grid.n * CELL
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white" stroke="black"/>',
    ]
    for kind, entries in grid.annotations:
        color = {"exchange_x": "cyan", "exchange_y": "orange", "expand": "blue"}.get(kind, "green")
        for i, j in entries:
            x, y = (j - 1) * CELL, (i - 1) * CELL
            out.append(f'<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{color}" fill-opacity="0.3"/>')
    for k in range(1, grid.n + 1):
        c = (k - 1) * CELL + CELL // 2
        out.append(f'<text x="{c}" y="{c + 4}" font-size="10" text-anchor="middle">{k}</text>')
    for (i, j), (glyph, shade) in sorted(grid.cells.items()):
        color = "black" if shade == "black" else "#999"
        cx, cy = (j - 1) * CELL + CELL // 2, (i - 1) * CELL + CELL // 2
        r = CELL // 3
        if glyph == "disc":
            out.append(f'<circle cx="{cx}" cy="{cy}" r="{r}" fill="{color}"/>')
        elif glyph == "ring":
            out.append(f'<circle cx="{cx}" cy="{cy}" r="{r}" fill="none" stroke="{color}" stroke-width="2"/>')
        else:
            pts = f"{cx},{cy - r} {cx - r},{cy + r} {cx + r},{cy + r}"
            out.append(f'<polygon points="{pts}" fill="{color}"/>')
    for i, j in sorted(grid.uncovered):
        cx, cy, r = (j - 1) * CELL + CELL // 2, (i - 1) * CELL + CELL // 2, CELL // 4
        out.append(f'<path d="M{cx - r},{cy - r}L{cx + r},{cy + r}M{cx - r},{cy + r}L{cx + r},{cy - r}" stroke="red"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def annotate(grid: PictureGrid, kind: str, entries) -> PictureGrid:
    """Add an SVG-only highlight layer (e.g. the X and Y entries of an exchange)."""
    grid.annotations.append((kind, sorted(tuple(p) for p in entries)))
    return grid
