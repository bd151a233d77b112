"""Certified paths from the trivial AF whose expansions are orbit-generic.

A certified path is a chain of stages.  Each stage extends the current AF by
a set of new directions and chooses one term; a witness subalgebra of gl_n
fixes the source AF, normalizes the new domain and acts on the chosen term
with an invertible infinitesimal action matrix.  That matrix being square
and invertible says the witness group acts freely with an open orbit through
the chosen term.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from . import lie
from .af import AF, DomainError, Group, compose, stab_torus_components
from .linalg import matrix_rank
from .prime import is_hat, is_nless, nonzero_roots, prime_b_membership, radical_blocks
from .scalars import is_zero
from .steps import Node, Step, TermFamily

ONE = Fraction(1)


class BPathError(ValueError):
    """A certified path failed one of its checks."""


@dataclass
class BStage:
    source: AF
    added: list  # basis of the new directions (modulo the source domain)
    target: AF
    witness: list  # basis of the witness subalgebra
    note: str = ""


@dataclass
class BPath:
    n: int
    stages: list = field(default_factory=list)

    @property
    def start(self) -> AF:
        return self.stages[0].source if self.stages else AF.empty(self.n)

    @property
    def end(self) -> AF:
        return self.stages[-1].target if self.stages else AF.empty(self.n)

    def to_tree(self) -> Node:
        """The path as a chain of one-dimensional e-steps along the chosen terms."""
        nodes: list[tuple[AF, dict]] = []
        for st in self.stages:
            cur = st.source
            for v in st.added:
                nodes.append((cur, v))
                cur = cur.extend(v, st.target.evaluate(v))
            if cur != st.target:
                raise BPathError("stage directions do not reach the target")
        node = Node(TermFamily(self.end))
        for src, v in reversed(nodes):
            node = Node(TermFamily(src), Step("e", vector=v, note="certified"), (node,))
        return node

    def map(self, vec_map: Callable[[dict], dict], af_map: Callable[[AF], AF], n: int) -> "BPath":
        return BPath(
            n,
            [
                BStage(af_map(s.source), [vec_map(v) for v in s.added], af_map(s.target), [vec_map(w) for w in s.witness], s.note)
                for s in self.stages
            ],
        )

    def __add__(self, other: "BPath") -> "BPath":
        return BPath(self.n, self.stages + other.stages)


# ---------------------------------------------------------------- checks


def action_matrix(target: AF, witness: Sequence[dict], added: Sequence[dict]) -> list[list]:
    """Rows: witness directions; columns: new directions; entries -Z([w, y])."""
    return [[-target.evaluate(lie.bracket(w, y)) for y in added] for w in witness]


def check_stage(st: BStage) -> None:
    src, tgt = st.source, st.target
    if tgt.restrict(src.domain) != src:
        raise BPathError("target does not restrict to the source")
    grown = Group.span(src.n, src.domain.basis + list(st.added))
    if grown != tgt.domain or grown.dim != src.dim + len(st.added):
        raise BPathError("new directions do not span the target domain modulo the source")
    for v in st.added:
        if not src.is_fixed_by(v):
            raise BPathError("a new direction does not fix the source AF")
    for w in st.witness:
        if not src.is_fixed_by(w):
            raise BPathError("witness does not fix the source AF")
        if not tgt.domain.normalized_by(w):
            raise BPathError("witness does not normalize the target domain")
    m = action_matrix(tgt, st.witness, st.added)
    if len(st.witness) != len(st.added):
        raise BPathError("witness and term space differ in dimension")
    if m and matrix_rank(m) != len(m):
        raise BPathError("witness action is not free and transitive at the chosen term")


def b_path_validate(p: BPath, start: Optional[AF] = None) -> bool:
    """Validate every stage; the path must start at ``start`` (default F_∅,n)."""
    first = start if start is not None else AF.empty(p.n)
    if p.start != first:
        raise BPathError("path does not start at the expected AF")
    prev = first
    for st in p.stages:
        if st.source != prev:
            raise BPathError("path is not continuous")
        check_stage(st)
        prev = st.target
    return True


def is_valid(p: BPath, start: Optional[AF] = None) -> bool:
    try:
        return b_path_validate(p, start)
    except BPathError:
        return False


# ---------------------------------------------------------------- row paths


def rows_of(k: AF) -> list[int]:
    return sorted({i for (i, _) in k.domain.root_positions})


def row_restriction(k: AF, last: int) -> AF:
    return k.restrict_roots(lambda p: p[0] <= last)


def brow_path(k: AF) -> BPath:
    """Row-by-row certified path to a root-generated hat AF.

    Row i adds its roots; the witness is built from the diagonal direction at
    the column f carrying the row's value and the column-f root directions
    below row i, greedily while the action matrix keeps gaining rank.
    """
    n = k.n
    if not k.domain.is_root_generated():
        raise BPathError("domain is not generated by root groups")
    if not is_hat(k):
        raise BPathError("nonzero values share a row or a column")
    vals = dict(nonzero_roots_map(k))
    path = BPath(n)
    prev = AF.empty(n)
    for i in rows_of(k):
        tgt = row_restriction(k, i)
        added = [lie.unit(*p) for p in sorted(tgt.domain.root_positions - prev.domain.root_positions)]
        cols = [q for (r, q) in vals if r == i]
        if not cols:
            raise BPathError(f"row {i} carries no value")
        col = cols[0]
        cands = [lie.unit(col, col)] + [lie.unit(r, col) for r in range(i + 1, n + 1) if r != col]
        witness: list = []
        rank = 0
        for c in cands:
            if not prev.is_fixed_by(c) or not tgt.domain.normalized_by(c):
                continue
            trial = witness + [c]
            r = matrix_rank(action_matrix(tgt, trial, added))
            if r > rank:
                witness, rank = trial, r
        path.stages.append(BStage(prev, added, tgt, witness, f"row {i}"))
        prev = tgt
    if prev != k:
        raise BPathError("rows do not rebuild the AF")
    b_path_validate(path)
    return path


def nonzero_roots_map(f: AF) -> list[tuple[tuple[int, int], object]]:
    return [((i, j), f.evaluate(lie.unit(i, j))) for (i, j) in nonzero_roots(f)]


def in_brow(k: AF) -> bool:
    try:
        brow_path(k)
        return True
    except BPathError:
        return False


# ---------------------------------------------------------------- composed families


def theta_vec(n: int) -> Callable[[dict], dict]:
    """The Lie automorphism e_ij -> -e_{n+1-j, n+1-i}."""

    def go(x: dict) -> dict:
        return {(n + 1 - j, n + 1 - i): -c for (i, j), c in x.items()}

    return go


def theta_af(f: AF) -> AF:
    return f.transform(theta_vec(f.n), f.n)


def outer_path(ff: AF) -> BPath:
    """Certified path to FF: the row path of its transpose-reflection, mapped back."""
    t = theta_vec(ff.n)
    return brow_path(theta_af(ff)).map(t, theta_af, ff.n)


def sgen_bpath(k: AF, ff: AF, jmap: Callable[[dict], dict]) -> BPath:
    """Certified path to j(K) ∘ FF: the path to FF, then j of the row path of K."""
    n_big = ff.n
    first = outer_path(ff)
    inner = brow_path(k) if k.dim else BPath(k.n)

    def af_map(z: AF) -> AF:
        return compose(z.transform(jmap, n_big), ff)

    second = inner.map(jmap, af_map, n_big)
    out = first + second
    b_path_validate(out)
    return out


# ---------------------------------------------------------------- pair conditions


def levi_blocks(ff: AF) -> Optional[tuple[int, ...]]:
    return radical_blocks(ff.domain)


def s_nN_report(k: AF, ff: AF, jmap: Callable[[dict], dict]) -> dict:
    """Each condition of the pair definition separately."""
    out: dict = {}
    blocks = levi_blocks(ff)
    out["ff_prime_ub"] = blocks is not None and list(blocks) == sorted(blocks, reverse=True)
    out["ff_nless"] = out["ff_prime_ub"] and is_nless(ff)
    out["ff_richardson"] = out["ff_prime_ub"] and prime_b_membership(ff)
    out["k_root_generated"] = k.domain.is_root_generated()
    out["k_nless"] = out["k_root_generated"] and is_nless(k) and is_hat(k)
    out["k_brow"] = out["k_nless"] and in_brow(k)
    fixed = True
    for b in k.domain.basis:
        img = jmap(b)
        if not ff.is_fixed_by(img):
            fixed = False
            break
    out["k_in_stabilizer"] = fixed
    out["components"] = blocks is not None and _components_ok(k, ff, jmap, len(blocks))
    return out


def _components_ok(k: AF, ff: AF, jmap, nblocks: int) -> bool:
    mins = set()
    for comp in stab_torus_components(k):
        diag = jmap({(i, i): ONE for i in comp})
        idx = {i for (i, j) in diag if i == j}
        if idx:
            mins.add(min(idx))
    for comp in stab_torus_components(ff):
        if min(comp) not in mins and len(comp) != nblocks:
            return False
    return True


def s_nN_check(k: AF, ff: AF, jmap: Callable[[dict], dict]) -> bool:
    return all(s_nN_report(k, ff, jmap).values())


# ---------------------------------------------------------------- the S(k; pairs) conditions


def _component_of(comps: list[frozenset], i: int) -> frozenset:
    return next(c for c in comps if i in c)


def skal_report(k_int: int, pairs: Sequence[tuple[int, int]], k: AF, ff: AF, jmap) -> dict:
    """The six conditions of the S(k; (a_i, l_i)) definition.

    The half-roots condition is read as "at least half"; the subsets that
    satisfied it are returned under ``half_subsets``.
    """
    out: dict = {}
    out["c1_pair"] = s_nN_check(k, ff, jmap)
    kc = stab_torus_components(k)
    fc = stab_torus_components(ff)
    a = [p[0] for p in pairs]
    ls = [p[1] for p in pairs]
    out["c2_sizes"] = [len(c) for c in kc] == a
    c3 = len(kc) == len(pairs)
    if c3:
        for comp, l_i in zip(kc, ls):
            diag = jmap({(i, i): ONE for i in comp})
            m = min(i for (i, j) in diag if i == j)
            c3 = c3 and len(_component_of(fc, m)) == l_i
    out["c3_lengths"] = c3
    c4 = True
    if kc and len(kc[0]) >= 2:
        second = sorted(kc[0])[1]
        for comp, l_i in zip(kc, ls):
            if min(comp) >= second and l_i != k_int:
                c4 = False
    out["c4_threshold"] = c4
    c5 = True
    for t in range(k.n):
        sizes = [len(c) for c in stab_torus_components(_drop_rows(k, t))]
        c5 = c5 and sizes == sorted(sizes, reverse=True)
    out["c5_ordering"] = c5
    c6a, c6b, subsets = _root_conditions(k, ff, jmap)
    out["c6a_above"] = c6a
    out["c6b_half"] = c6b
    out["half_subsets"] = subsets
    return out


def _drop_rows(k: AF, t: int) -> AF:
    """K with its first t indices removed, as an AF of GL_{n-t}."""
    if t == 0:
        return k
    sub = k.restrict_roots(lambda p: p[0] > t)
    return sub.transform(lambda x: {(i - t, j - t): v for (i, j), v in x.items()}, k.n - t)


def _block_projection(ff: AF, jmap, x: dict) -> list[tuple[int, dict]]:
    """(block index, block-local vector) for every Levi block meeting j(x)."""
    blocks = levi_blocks(ff)
    st = [sum(blocks[:b]) for b in range(len(blocks))]
    img = jmap(x)
    out = []
    for b, (s, size) in enumerate(zip(st, blocks)):
        loc = {(i - s, j - s): v for (i, j), v in img.items() if s < i <= s + size and s < j <= s + size}
        if loc:
            out.append((b, loc))
    return out


def _root_conditions(k: AF, ff: AF, jmap) -> tuple[bool, bool, list]:
    blocks = levi_blocks(ff)
    roots = sorted(k.domain.root_positions)
    proj: dict[int, set] = {}
    for p in roots:
        for b, loc in _block_projection(ff, jmap, lie.unit(*p)):
            proj.setdefault(b, set()).update(loc)
    ok_a = ok_b = True
    subsets = []
    for p in roots:
        parts = _block_projection(ff, jmap, lie.unit(*p))
        if not parts:
            continue
        b, loc = parts[-1]
        if len(loc) != 1:
            ok_a = ok_b = False
            continue
        (i, j) = next(iter(loc))
        t = blocks[b]
        image = proj.get(b, set())
        # beta - alpha positive: beta = (i', j) with i' < i or (i, j') with j' > j
        above = [(x, j) for x in range(1, i)] + [(i, y) for y in range(j + 1, t + 1)]
        ok_a = ok_a and all(q in image for q in above)
        # alpha - beta positive: beta strictly inside the interval (i, j)
        inside = [(x, y) for x in range(i, j) for y in range(x + 1, j + 1) if (x, y) != (i, j) and (x == i or y == j)]
        hit = [q for q in inside if q in image]
        if inside:
            ok_b = ok_b and 2 * len(hit) >= len(inside)
        subsets.append({"root": list(p), "block": b, "local": [i, j], "half": [list(q) for q in hit]})
    return ok_a, ok_b, subsets


def skal_check(k_int: int, pairs, k: AF, ff: AF, jmap) -> bool:
    rep = skal_report(k_int, pairs, k, ff, jmap)
    return all(v for key, v in rep.items() if key != "half_subsets")
