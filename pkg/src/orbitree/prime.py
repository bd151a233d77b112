"""AFs on parabolic radicals: normal form under the Levi and the reduction tree.

An AF on the radical of a standard parabolic only sees the blocks of
entries between consecutive Levi blocks.  ``to_nless`` conjugates it by a
Levi element (upper unitriangular in the first block, determinant one in the
others) until the nonzero entries form chains with no two nested roots.
``radexpress`` builds a tree from such an AF to AFs on U_n with exactly one
output in the class of J_F and every other output in a strictly larger class.
"""

from __future__ import annotations

from dataclasses import replace
from fractions import Fraction
from typing import Optional

from . import lie
from .af import AF, DomainError, Group, j_matrix
from .linalg import inverse
from .partitions import Order, Partition, compare, jordan_type, richardson
from .scalars import forward, is_zero, simplify, special_values, zero_test_log
from .steps import Marker, Node, Step, StepError, TermFamily, co_step, e_step

ONE = Fraction(1)


# ---------------------------------------------------------------- shapes


def radical_blocks(g: Group) -> Optional[tuple[int, ...]]:
    """Levi block sizes if g is the radical of a standard parabolic, else None."""
    n = g.n
    if not g.is_root_generated():
        return None
    roots = g.root_positions
    blocks, size = [], 1
    for i in range(1, n):
        if (i, i + 1) in roots:
            blocks.append(size)
            size = 1
        else:
            size += 1
    blocks.append(size)
    return tuple(blocks) if Group.radical(blocks) == g else None


def nonzero_roots(f: AF) -> list[tuple[int, int]]:
    return sorted(p for p in f.domain.root_positions if not is_zero(f.evaluate(lie.unit(*p))))


def is_hat(f: AF) -> bool:
    """Nonzero root values in pairwise distinct rows and columns."""
    nz = nonzero_roots(f)
    return len({i for i, _ in nz}) == len(nz) == len({j for _, j in nz})


def is_nless(f: AF) -> bool:
    """No two nonzero roots with one interval nested in the other."""
    nz = nonzero_roots(f)
    for a, (i, j) in enumerate(nz):
        for (p, q) in nz[a + 1 :]:
            if (i <= p and q <= j) or (p <= i and j <= q):
                return False
    return True


def prime_class(f: AF) -> Partition:
    """Jordan type of J_F."""
    return jordan_type(j_matrix(f))


# ---------------------------------------------------------------- nless form


class _Conj:
    """Accumulates conjugations g with their inverses."""

    def __init__(self, f: AF) -> None:
        self.f = f
        self.g = lie.identity(f.n)
        self.ginv = lie.identity(f.n)

    def apply(self, u: dict, uinv: dict) -> None:
        self.f = self.f.conjugate(u, uinv)
        self.g = lie.matmul(u, self.g)
        self.ginv = lie.matmul(self.ginv, uinv)

    def unipotent(self, x: dict) -> None:
        """Conjugate by I + x for x with x^2 = 0."""
        n = self.f.n
        u = lie.identity(n)
        uinv = lie.identity(n)
        for p, c in x.items():
            u[p] = u.get(p, 0) + c
            uinv[p] = uinv.get(p, 0) - c
        self.apply({p: c for p, c in u.items() if not is_zero(c)}, {p: c for p, c in uinv.items() if not is_zero(c)})

    def val(self, p: int, q: int):
        return self.f.evaluate(lie.unit(p, q))


def to_nless(f: AF) -> tuple[dict, dict, AF]:
    """(γ, γ^{-1}, γF) with γF nless, γ block diagonal as described above.

    Blocks are processed left to right.  Chains through the previous blocks
    are kept fixed: a row may only be cleared by a chain that started no
    later, applying the same operation along the whole overlap.
    """
    blocks = radical_blocks(f.domain)
    if blocks is None:
        raise DomainError("domain is not a parabolic radical")
    st = [sum(blocks[:b]) for b in range(len(blocks))]
    idx = [list(range(s + 1, s + b + 1)) for s, b in zip(st, blocks)]
    c = _Conj(f)
    start = {i: (0, i) for i in idx[0]}  # chain start (block, index) of each index
    prev: dict[int, int] = {}  # matched index in the previous block

    def chain_back(i: int) -> list[int]:
        """Indices of the chain ending at i, earliest block first."""
        out = [i]
        while out[-1] in prev:
            out.append(prev[out[-1]])
        out.reverse()
        return out

    for b in range(len(blocks) - 1):
        rows = sorted(idx[b], key=lambda r: start[r])
        cols = idx[b + 1]
        pivots: list[tuple[int, int]] = []
        for r in rows:
            for r2, col2 in pivots:
                a = c.val(r, col2)
                if is_zero(a):
                    continue
                kappa = simplify(a / c.val(r2, col2))
                # row r -= kappa row r2, propagated back along the overlap
                t2 = chain_back(r)
                t1 = chain_back(r2)
                over = min(len(t1), len(t2))
                t1, t2 = t1[-over:], t2[-over:]
                lam = [Fraction(0)] * over
                lam[-1] = kappa
                for i in range(over - 2, -1, -1):
                    lam[i] = simplify(lam[i + 1] * c.val(t2[i], t2[i + 1]) / c.val(t1[i], t1[i + 1]))
                if start[r2] > start[r] or (start[r][0] == 0 and t1[0] > t2[0]):
                    raise AssertionError("elimination against the allowed direction")
                c.unipotent({(p, q): lam[i] for i, (p, q) in enumerate(zip(t1, t2))})
            nz = [q for q in cols if not is_zero(c.val(r, q))]
            if not nz:
                continue
            piv = nz[0]
            pv = c.val(r, piv)
            for q in nz[1:]:
                # column q -= (value/pivot) column piv
                c.unipotent({(q, piv): simplify(-c.val(r, q) / pv)})
            pivots.append((r, piv))
            prev[piv] = r
            start[piv] = start[r]
        for q in cols:
            if q not in prev:
                start[q] = (b + 1, q)
    # order matchings inside blocks 2.. so that no two roots are nested
    sigma = {i: i for i in range(1, f.n + 1)}
    for b in range(1, len(blocks)):
        src = sorted(
            idx[b],
            key=lambda q: (0, sigma[prev[q]]) if q in prev else (1, q),
        )
        for new, old in zip(idx[b], src):
            sigma[old] = new
    if any(sigma[i] != i for i in sigma):
        w = lie.permutation_matrix(sigma)
        winv = {(j, i): v for (i, j), v in w.items()}
        # keep determinant one inside each block
        w, winv = _signed(w, winv, sigma, idx)
        c.apply(w, winv)
    if not is_nless(c.f):
        raise AssertionError("normal form is not nless")
    return c.g, c.ginv, c.f


def _signed(w: dict, winv: dict, sigma: dict, idx: list[list[int]]) -> tuple[dict, dict]:
    """Flip one sign per odd block permutation so each block has determinant one."""
    from itertools import combinations

    w = dict(w)
    winv = dict(winv)
    for block in idx[1:]:
        inv = sum(1 for a, b in combinations(block, 2) if sigma[a] > sigma[b])
        if inv % 2:
            i = block[0]
            w[(sigma[i], i)] = -w[(sigma[i], i)]
            winv[(i, sigma[i])] = -winv[(i, sigma[i])]
    return w, winv


def prime_b_membership(f: AF) -> bool:
    """J_F (after the nless conjugation) lies in the Richardson orbit of D_F."""
    blocks = radical_blocks(f.domain)
    if blocks is None:
        raise DomainError("domain is not a parabolic radical")
    _g, _gi, h = to_nless(f)
    return prime_class(h) == richardson(blocks)


# ---------------------------------------------------------------- reduction tree


def _co(f: AF, g: dict, ginv: dict, child_fn, note: str) -> Node:
    if g == lie.identity(f.n):
        return child_fn(f)
    out = co_step(f, g, ginv)
    return Node(TermFamily(f), Step("co", g=g, ginv=ginv, note=note), (child_fn(out),))


def _lower_index(n: int) -> dict:
    return {i: i + 1 for i in range(1, n)}


def radexpress(f: AF) -> Node:
    """Tree from an AF on a parabolic radical to AFs on U_n (see module doc)."""
    return _Rad().tree(f)


class _Rad:
    def __init__(self) -> None:
        self.memo: dict = {}
        self.builder = None

    def tree(self, f: AF) -> Node:
        hit = self.memo.get(f.key)
        if hit is not None:
            forward(hit[1])
            return hit[0]
        with zero_test_log() as log:
            node = self._tree(f)
        nums = list(log.numerators)
        forward(nums)
        self.memo[f.key] = (node, nums)
        return node

    def _tree(self, f: AF) -> Node:
        n = f.n
        blocks = radical_blocks(f.domain)
        if blocks is None:
            raise DomainError("domain is not a parabolic radical")
        if all(b == 1 for b in blocks):
            return Node(TermFamily(f), orbit=prime_class(f))
        g, ginv, h = to_nless(f)
        return _co(f, g, ginv, self._nless, "nless")

    def _nless(self, f: AF) -> Node:
        n = f.n
        blocks = radical_blocks(f.domain)
        if blocks[0] == 1:
            return self._first_row_full(f)
        nz = nonzero_roots(f)
        if not any(i == 1 for i, _ in nz):
            # index 1 is a chain of its own: expand the first row inside block 1
            vs = [lie.unit(1, j) for j in range(2, blocks[0] + 1)]
            return self._expand_all(f, vs, "first row")
        return self._long_chain(f)

    # R_1 inside the domain: move the nonzero entry of row 1 next to the
    # diagonal and recurse on the lower right GL_{n-1}
    def _first_row_full(self, f: AF) -> Node:
        n = f.n
        blocks = radical_blocks(f.domain)
        nz = [q for (i, q) in nonzero_roots(f) if i == 1]
        sigma = {i: i for i in range(1, n + 1)}
        if nz:
            q = nz[0]
            lo = 2
            hi = 1 + blocks[1]
            if not lo <= q <= hi:
                raise AssertionError("row 1 value outside the second block")
            # cycle q to the front of its block
            sigma[q] = lo
            for j in range(lo, q):
                sigma[j] = j + 1
        w = lie.permutation_matrix(sigma)
        winv = {(j, i): v for (i, j), v in w.items()}
        w, winv = _signed(w, winv, sigma, [[1]] + [list(range(2, 2 + blocks[1]))])

        def rest(h: AF) -> Node:
            row1 = h.restrict_roots(lambda p: p[0] == 1)
            lower = h.restrict_roots(lambda p: p[0] >= 2)
            sub_f = lower.transform(lambda x: {(i - 1, j - 1): v for (i, j), v in x.items()}, n - 1)
            sub = self.tree(sub_f)
            from .steps import tree_compose, tree_embed

            emb = tree_embed(_lower_index(n), sub, n)
            out = _reclass(tree_compose(emb, row1))
            if out.af != h:
                raise AssertionError("lower corner recursion changed the label")
            return out

        return _co(f, w, winv, rest, "weyl")

    def _expand_all(self, f: AF, vs: list[dict], note: str) -> Node:
        """Chain of e-steps over vs, recursing on every output."""
        if not vs:
            return self.tree(f)
        fams = e_step(f, vs[0])
        children = []
        for fam in fams:
            children.extend(self._family(fam, lambda z: self._expand_all(z, vs[1:], note)))
        return Node(TermFamily(f), Step("e", vector=vs[0], note=note), tuple(children))

    def _family(self, fam: TermFamily, cont) -> list[Node]:
        if fam.marker != Marker.PARAMETRIC:
            return [replace(cont(fam.sample), family=fam)]
        with zero_test_log() as log:
            sub = cont(fam.rep)
        roots, outer = special_values(log.numerators, fam.param)
        forward(outer)
        out = [replace(sub, family=fam)]
        for r in roots:
            if is_zero(r):
                continue
            z = fam.rep.substitute(fam.param, r)
            out.append(replace(cont(z), family=TermFamily(z)))
        return out

    # the chain through index 1 is longer than one: run the standard
    # exchange path, then expand row k over the roots that become admissible
    def _long_chain(self, f: AF) -> Node:
        from .canonical import i_st

        p = i_st(f)
        return self._along(p, f)

    def _along(self, p: Node, f: AF) -> Node:
        if p.step is None:
            return self._row_k(p.af)
        child = self._along(p.children[0], p.children[0].af)
        return Node(TermFamily(f), p.step, (child,))

    def _row_k(self, f: AF) -> Node:
        n = f.n
        roots = f.domain.root_positions
        k = 1
        while k < n and all((k, j) in roots for j in range(k + 1, n + 1)):
            k += 1
        return self._admissible_chain(f, k)

    def _admissible_chain(self, f: AF, k: int) -> Node:
        """e-steps over row-k roots, largest column first, along constant terms."""
        n = f.n
        if radical_blocks(f.domain) is not None and self._no_admissible(f, k):
            return self.tree(f)
        for j in range(n, k, -1):
            v = lie.unit(k, j)
            if f.domain.contains(v):
                continue
            try:
                fams = e_step(f, v)
            except StepError:
                continue
            const, fam = fams
            children = [replace(self._admissible_chain(const.rep, k), family=const)]
            children.extend(self._family(fam, self._finish_row))
            return Node(TermFamily(f), Step("e", vector=v, note="row k"), tuple(children))
        if radical_blocks(f.domain) is None:
            raise AssertionError("row expansion stopped outside a parabolic radical")
        return self.tree(f)

    def _no_admissible(self, f: AF, k: int) -> bool:
        from .steps import check_e_step

        for j in range(k + 1, f.n + 1):
            v = lie.unit(k, j)
            if f.domain.contains(v):
                continue
            try:
                check_e_step(f, v)
                return False
            except StepError:
                pass
        return True

    def _finish_row(self, f: AF) -> Node:
        """A nonconstant term: complete to a parabolic radical if needed, then recurse."""
        if radical_blocks(f.domain) is not None:
            return self.tree(f)
        n = f.n
        roots = f.domain.root_positions
        k = 1
        while k < n and all((k, j) in roots for j in range(k + 1, n + 1)):
            k += 1
        rows = [k] + [i for i in range(1, n) if i != k]
        for i in rows:
            for j in range(n, i, -1):
                v = lie.unit(i, j)
                if f.domain.contains(v):
                    continue
                try:
                    fams = e_step(f, v)
                except StepError:
                    continue
                children = []
                for fam in fams:
                    children.extend(self._family(fam, self._finish_row))
                return Node(TermFamily(f), Step("e", vector=v, note="complete"), tuple(children))
        # no admissible root: finish with the standard construction
        return self._standard().xi(f)

    def _standard(self):
        from .canonical import Builder

        if self.builder is None:
            self.builder = Builder("full")
        return self.builder


def _reclass(node: Node) -> Node:
    """Recompute the classes of output vertices after transport."""
    if node.step is None:
        return replace(node, orbit=prime_class(node.af))
    return replace(node, children=tuple(_reclass(c) for c in node.children))


def radexpress_outputs(tree: Node) -> list[tuple[Partition, bool]]:
    """(class, reached by a family) for every output vertex."""
    out = []

    def go(node: Node, fam: bool) -> None:
        fam = fam or node.family.marker != Marker.SINGLE
        if node.step is None:
            out.append((node.orbit if node.orbit is not None else prime_class(node.af), fam))
            return
        for ch in node.children:
            go(ch, fam)

    go(tree, False)
    return out


def check_radexpress(f: AF, tree: Node) -> None:
    """Exactly one single output in the class of J_F; every other output strictly larger."""
    a = prime_class(f)
    same = 0
    for cls, fam in radexpress_outputs(tree):
        order = compare(cls, a)
        if order == Order.EQUAL:
            if fam:
                raise AssertionError("class of J_F reached by a family")
            same += 1
        elif order != Order.GREATER:
            raise AssertionError(f"output class {cls} not above {a}")
    if same != 1:
        raise AssertionError(f"{same} outputs in the class of J_F")
