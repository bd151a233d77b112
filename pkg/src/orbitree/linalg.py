"""Exact linear algebra over QQ and QQ(t).

Dense matrices are lists of row lists.  Sparse vectors are dicts from a
coordinate key to a nonzero scalar; :class:`Echelon` keeps a reduced row
echelon basis of sparse vectors under a caller-chosen coordinate order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Optional, Sequence

from .scalars import Scalar, is_zero, simplify

Mat = list[list[Scalar]]
SparseVec = dict


# ---------------------------------------------------------------- dense


def zeros(rows: int, cols: int) -> Mat:
    return [[Fraction(0)] * cols for _ in range(rows)]


def identity(n: int) -> Mat:
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = Fraction(1)
    return m


def matmul(a: Mat, b: Mat) -> Mat:
    cols = len(b[0]) if b else 0
    out = zeros(len(a), cols)
    for i, row in enumerate(a):
        for k, x in enumerate(row):
            if is_zero(x):
                continue
            bk = b[k]
            oi = out[i]
            for j in range(cols):
                if not is_zero(bk[j]):
                    oi[j] = oi[j] + x * bk[j]
    return out


def _check_square(m: Mat) -> int:
    n = len(m)
    if any(len(r) != n for r in m):
        raise ValueError("matrix is not square")
    return n


def matrix_rank(m: Mat) -> int:
    """Rank by fraction-free (Bareiss) elimination; generic rank over QQ(t)."""
    rows = [list(r) for r in m]
    if not rows or not rows[0]:
        return 0
    nrows, ncols = len(rows), len(rows[0])
    rank = 0
    prev = Fraction(1)
    for col in range(ncols):
        piv = next((r for r in range(rank, nrows) if not is_zero(rows[r][col])), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][col]
        for r in range(rank + 1, nrows):
            f = rows[r][col]
            rows[r] = [simplify((p * rows[r][c] - f * rows[rank][c]) / prev) for c in range(ncols)]
        prev = p
        rank += 1
        if rank == nrows:
            break
    return rank


def power_rank_sequence(m: Mat, kmax: int) -> list[int]:
    """Ranks of m, m^2, ..., m^kmax."""
    _check_square(m)
    out = []
    power = m
    for k in range(1, kmax + 1):
        if k > 1:
            power = matmul(power, m)
        out.append(matrix_rank(power))
    return out


def inverse(m: Mat) -> Mat:
    """Gauss-Jordan inverse; raises ValueError on a singular matrix."""
    n = _check_square(m)
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not is_zero(aug[r][col])), None)
        if piv is None:
            raise ValueError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [simplify(x / p) for x in aug[col]]
        for r in range(n):
            if r != col and not is_zero(aug[r][col]):
                f = aug[r][col]
                aug[r] = [simplify(x - f * y) for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


@dataclass(frozen=True)
class AffineSolution:
    """Solution set ``particular + span(kernel)`` of a linear system."""

    particular: tuple
    kernel: tuple

    @property
    def dim(self) -> int:
        return len(self.kernel)


def affine_solve(
    constraints: Sequence[tuple[Sequence[Scalar], Scalar]], ambient: int
) -> Optional[AffineSolution]:
    """Solve ``sum_j a_j x_j = b`` for each ``(a, b)``; None if inconsistent."""
    rows = []
    for coeffs, rhs in constraints:
        if len(coeffs) != ambient:
            raise ValueError("constraint has wrong ambient dimension")
        rows.append([Fraction(c) if isinstance(c, int) else c for c in coeffs] + [rhs])
    pivots: list[int] = []
    r = 0
    for col in range(ambient):
        piv = next((i for i in range(r, len(rows)) if not is_zero(rows[i][col])), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][col]
        rows[r] = [simplify(x / p) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and not is_zero(rows[i][col]):
                f = rows[i][col]
                rows[i] = [simplify(x - f * y) for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    for i in range(r, len(rows)):
        if not is_zero(rows[i][ambient]):
            return None
    particular = [Fraction(0)] * ambient
    for i, col in enumerate(pivots):
        particular[col] = rows[i][ambient]
    kernel = []
    free = [c for c in range(ambient) if c not in set(pivots)]
    for fc in free:
        vec = [Fraction(0)] * ambient
        vec[fc] = Fraction(1)
        for i, col in enumerate(pivots):
            vec[col] = simplify(-rows[i][fc])
        kernel.append(tuple(vec))
    return AffineSolution(tuple(particular), tuple(kernel))


def nullspace(m: Mat) -> list[list[Scalar]]:
    """Basis of ``{x : m x = 0}``."""
    if not m:
        return []
    ncols = len(m[0])
    sol = affine_solve([(row, Fraction(0)) for row in m], ncols)
    assert sol is not None
    return [list(v) for v in sol.kernel]


# ---------------------------------------------------------------- sparse


def vec_add(a: SparseVec, b: SparseVec, scale: Scalar = 1) -> SparseVec:
    """Return ``a + scale * b`` without mutating the inputs."""
    out = dict(a)
    for k, v in b.items():
        x = out.get(k, 0) + scale * v
        if is_zero(x):
            out.pop(k, None)
        else:
            out[k] = x
    return out


def vec_scale(a: SparseVec, c: Scalar) -> SparseVec:
    if is_zero(c):
        return {}
    return {k: simplify(v * c) for k, v in a.items()}


class Echelon:
    """Incremental reduced row echelon form of sparse vectors.

    Each row may carry a scalar payload that is transported linearly with
    the row; it is used to keep the values of a linear functional on a basis.
    """

    def __init__(self, key: Callable[[Hashable], object] = lambda c: c) -> None:
        self.key = key
        self.rows: dict = {}  # pivot coordinate -> (vector, payload)

    def copy(self) -> "Echelon":
        e = Echelon(self.key)
        e.rows = dict(self.rows)
        return e

    def reduce(self, vec: SparseVec, payload: Scalar = 0) -> tuple[SparseVec, Scalar]:
        """Subtract basis rows to clear every pivot coordinate of ``vec``."""
        vec = dict(vec)
        for p, (row, val) in self.rows.items():
            c = vec.get(p)
            if c is None or is_zero(c):
                continue
            for k, v in row.items():
                x = vec.get(k, 0) - c * v
                if is_zero(x):
                    vec.pop(k, None)
                else:
                    vec[k] = x
            payload = payload - c * val
        return vec, payload

    def coordinates(self, vec: SparseVec) -> Optional[dict]:
        """Coefficients of ``vec`` in the basis, or None if not in the span."""
        rem, _ = self.reduce(vec)
        if rem:
            return None
        return {p: vec[p] for p in self.rows if p in vec and not is_zero(vec[p])}

    def insert(self, vec: SparseVec, payload: Scalar = 0) -> Optional[Scalar]:
        """Add a vector; returns None if it was new, else the residual payload."""
        rem, val = self.reduce(vec, payload)
        if not rem:
            return simplify(val)
        pivot = min(rem, key=self.key)
        c = rem[pivot]
        rem = {k: simplify(v / c) for k, v in rem.items()}
        val = simplify(val / c)
        for p, (row, rval) in list(self.rows.items()):
            f = row.get(pivot)
            if f is None:
                continue
            new = dict(row)
            for k, v in rem.items():
                x = new.get(k, 0) - f * v
                if is_zero(x):
                    new.pop(k, None)
                else:
                    new[k] = simplify(x)
            self.rows[p] = (new, simplify(rval - f * val))
        self.rows[pivot] = (rem, val)
        return None

    def sorted_rows(self) -> list:
        return [self.rows[p] for p in sorted(self.rows, key=self.key)]


def span_echelon(
    vectors: Iterable[SparseVec], key: Callable[[Hashable], object] = lambda c: c
) -> Echelon:
    e = Echelon(key)
    for v in vectors:
        e.insert(v)
    return e


def intersect_spans(
    a: Sequence[SparseVec], b: Sequence[SparseVec], key: Callable = lambda c: c
) -> list[SparseVec]:
    """Basis of span(a) ∩ span(b) by the Zassenhaus trick."""
    e = Echelon(key=lambda c: (c[0], key(c[1])))
    for v in a:
        doubled = {(0, k): x for k, x in v.items()}
        doubled.update({(1, k): x for k, x in v.items()})
        e.insert(doubled)
    for v in b:
        e.insert({(0, k): x for k, x in v.items()})
    out = []
    for p, (row, _) in e.rows.items():
        if p[0] == 1:
            out.append({k[1]: x for k, x in row.items()})
    return out
