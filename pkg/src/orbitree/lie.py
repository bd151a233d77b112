"""Sparse matrices of gl_n and their commutators.

A matrix is a dict ``{(i, j): scalar}`` with 1-based indices and no zero
entries.  These are the Lie algebra elements every other module works with.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Iterable, Mapping

from .linalg import Mat, SparseVec, vec_add
from .scalars import Scalar, is_zero, simplify

Pos = tuple[int, int]


def unit(i: int, j: int, c: Scalar = 1) -> SparseVec:
    return {(i, j): Fraction(c) if isinstance(c, int) else c}


def matmul(x: Mapping, y: Mapping) -> SparseVec:
    by_row: dict[int, list] = defaultdict(list)
    for (j, k), v in y.items():
        by_row[j].append((k, v))
    out: dict = {}
    for (i, j), u in x.items():
        for k, v in by_row.get(j, ()):
            key = (i, k)
            out[key] = out.get(key, 0) + u * v
    return {k: simplify(v) for k, v in out.items() if not is_zero(v)}


def bracket(x: Mapping, y: Mapping) -> SparseVec:
    return vec_add(matmul(x, y), matmul(y, x), -1)


def conjugate(g: Mapping, x: Mapping, ginv: Mapping) -> SparseVec:
    """``g x g^{-1}``."""
    return matmul(matmul(g, x), ginv)


def to_dense(x: Mapping, n: int) -> Mat:
    m = [[Fraction(0)] * n for _ in range(n)]
    for (i, j), v in x.items():
        m[i - 1][j - 1] = v
    return m


def from_dense(m: Mat) -> SparseVec:
    return {
        (i + 1, j + 1): v for i, row in enumerate(m) for j, v in enumerate(row) if not is_zero(v)
    }


def identity(n: int) -> SparseVec:
    return {(i, i): Fraction(1) for i in range(1, n + 1)}


def permutation_matrix(sigma: Mapping[int, int]) -> SparseVec:
    """Matrix w with ``w e_{ij} w^{-1} = e_{sigma(i) sigma(j)}``."""
    return {(sigma[i], i): Fraction(1) for i in sigma}


def support_rows(vectors: Iterable[Mapping]) -> set[int]:
    return {i for v in vectors for (i, _j) in v}


def is_upper(x: Mapping) -> bool:
    return all(i < j for (i, j) in x)


def exp_nilpotent(x: Mapping, n: int) -> SparseVec:
    """exp(x) for a nilpotent x (the series stops after n terms)."""
    out = identity(n)
    term = identity(n)
    for k in range(1, n + 1):
        term = {key: v / k for key, v in matmul(term, x).items()}
        if not term:
            break
        out = vec_add(out, term)
    return {k: simplify(v) for k, v in out.items() if not is_zero(v)}
