"""Partitions as nilpotent orbits of gl_n.

A partition is a tuple of positive integers in weakly decreasing order.
"""

from __future__ import annotations

from enum import Enum
from itertools import accumulate
from typing import Iterable, Iterator, Sequence

from .linalg import Mat, power_rank_sequence

Partition = tuple[int, ...]


class Order(str, Enum):
    GREATER = "greater"
    LESS = "less"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


def normalize(raw: Iterable[int]) -> Partition:
    """Sort descending and drop zero parts."""
    parts = list(raw)
    if any(p < 0 for p in parts):
        raise ValueError(f"negative part in {parts}")
    return tuple(sorted((p for p in parts if p > 0), reverse=True))


def size(a: Sequence[int]) -> int:
    return sum(a)


def partitions(n: int, max_part: int | None = None) -> Iterator[Partition]:
    """All partitions of n, largest first."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def compare(a: Sequence[int], b: Sequence[int]) -> Order:
    """Dominance order comparison."""
    a, b = normalize(a), normalize(b)
    if sum(a) != sum(b):
        raise ValueError(f"partitions of different sizes: {a}, {b}")
    if a == b:
        return Order.EQUAL
    length = max(len(a), len(b))
    pa = list(accumulate(a + (0,) * (length - len(a))))
    pb = list(accumulate(b + (0,) * (length - len(b))))
    ge = all(x >= y for x, y in zip(pa, pb))
    le = all(x <= y for x, y in zip(pa, pb))
    if ge:
        return Order.GREATER
    if le:
        return Order.LESS
    return Order.INCOMPARABLE


def leq(a: Sequence[int], b: Sequence[int]) -> bool:
    return compare(a, b) in (Order.LESS, Order.EQUAL)


def transpose(a: Sequence[int]) -> Partition:
    """Conjugate partition."""
    a = normalize(a)
    if not a:
        return ()
    return tuple(sum(1 for p in a if p > i) for i in range(a[0]))


def orbit_dim(a: Sequence[int]) -> int:
    """Dimension of the nilpotent orbit: n^2 - sum of squared transpose parts."""
    n = sum(a)
    return n * n - sum(p * p for p in transpose(a))


def jordan_type(m: Mat) -> Partition:
    """Jordan type of a nilpotent matrix from the ranks of its powers."""
    n = len(m)
    if n == 0:
        return ()
    ranks = [n] + power_rank_sequence(m, n)
    if ranks[-1] != 0:
        raise ValueError("matrix is not nilpotent")
    # number of blocks of size >= k is rank(m^(k-1)) - rank(m^k)
    at_least = [ranks[k - 1] - ranks[k] for k in range(1, n + 1)] + [0]
    parts = []
    for k in range(1, n + 1):
        parts += [k] * (at_least[k - 1] - at_least[k])
    return normalize(parts)


def richardson(levi_blocks: Sequence[int]) -> Partition:
    """Richardson orbit of the parabolic with the given Levi block sizes."""
    return transpose(normalize(levi_blocks))


def minimal_elements(s: Iterable[Sequence[int]]) -> set[Partition]:
    items = {normalize(a) for a in s}
    sizes = {sum(a) for a in items}
    if len(sizes) > 1:
        raise ValueError("partitions of different sizes")
    return {a for a in items if not any(compare(b, a) == Order.LESS for b in items)}


def truncate(s: Iterable[Sequence[int]], k: int) -> set[Partition]:
    """Members whose parts are all at most k."""
    return {normalize(a) for a in s if not a or max(a) <= k}


def omega_prime(inducing: Sequence[tuple[int, int]]) -> Partition:
    """Richardson orbit of the Levi with ``a_i`` blocks of size ``b_i``."""
    blocks: list[int] = []
    for a, b in inducing:
        blocks += [b] * a
    return richardson(blocks)


def prefix_dim(n: int, r: int) -> int:
    """Dimension of the domain of the first r-1 full rows of U_n."""
    return sum(n - i for i in range(1, r))


def dim_r_extension(a: Sequence[int], r: int) -> int:
    """Half the dimension of the orbit [r] ∪ a, by the row-extension count.

    Evaluates ``orbit_dim(a)/2 + dim(first r-1 rows) + sum max(a_i - r, 0)``
    and checks it against the direct orbit dimension.
    """
    a = normalize(a)
    n = sum(a) + r
    if not 0 < r < n:
        raise ValueError("need 0 < r < n")
    counted = orbit_dim(a) // 2 + prefix_dim(n, r) + sum(max(p - r, 0) for p in a)
    direct = orbit_dim(normalize(a + (r,))) // 2
    if counted != direct:
        raise AssertionError(f"dimension count mismatch for {a}, r={r}: {counted} != {direct}")
    return direct


def block_nilpotent(a: Sequence[int]) -> Mat:
    """Block diagonal nilpotent matrix with Jordan blocks of sizes a (lower)."""
    from fractions import Fraction

    n = sum(a)
    m = [[Fraction(0)] * n for _ in range(n)]
    start = 0
    for p in a:
        for i in range(p - 1):
            m[start + i + 1][start + i] = Fraction(1)
        start += p
    return m


def fmt(a: Sequence[int]) -> str:
    return "[" + ",".join(str(p) for p in a) + "]"
