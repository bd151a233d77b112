"""The standard tree Ξ^st and the orbit invariants computed from trees.

``xi_st`` follows the inductive construction on (n, dim D): rows of the
domain that are already complete and carry at most a simple-root value are
peeled off (the lower-corner recursion), and on the first incomplete row one
of three cases applies: expand over the next missing root, or run the
exchange/conjugation loop that moves the last nonzero entry of the row next
to the diagonal.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from . import lie
from .af import AF, Group
from .partitions import Partition, jordan_type, minimal_elements, normalize, orbit_dim
from .scalars import forward, is_zero, simplify, special_values, substitute, zero_test_log
from .steps import (
    Marker,
    Node,
    Step,
    StepError,
    TermFamily,
    check_e_step,
    co_step,
    e_step,
    eu_step,
    quotient_basis,
)

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

INFINITE = "inf"


class OrbitError(AssertionError):
    """An invariant the theory guarantees was violated."""


# ---------------------------------------------------------------- classes


def full_upper(f: AF) -> bool:
    n = f.n
    return f.dim == n * (n - 1) // 2 and f.domain.is_subset_upper()


def orbit_class(f: AF) -> Partition:
    """Jordan type of J_F for an AF on U_n: runs of nonzero simple-root values."""
    if not full_upper(f):
        raise ValueError("orbit_class needs an AF on U_n")
    parts = []
    run = 1
    for i in range(1, f.n):
        if is_zero(f.evaluate({(i, i + 1): Fraction(1)})):
            parts.append(run)
            run = 1
        else:
            run += 1
    parts.append(run)
    return normalize(parts)


def orbit_class_by_rank(f: AF) -> Partition:
    """Same class from the rank sequence of J_F (used as a cross-check)."""
    from .af import j_matrix

    return jordan_type(j_matrix(f))


# ---------------------------------------------------------------- Ξ^st


def in_prefix(pos, k: int, l: int) -> bool:
    """Membership of a root position in L_(k,l)."""
    a, b = pos
    return not (b == l and k < a < l)


def window(f: AF) -> int:
    """First row not yet in the peeled-off form (complete, zero past the diagonal)."""
    n = f.n
    s = 1
    roots = f.domain.root_positions
    while s < n:
        if not all((s, j) in roots for j in range(s + 1, n + 1)):
            break
        if not all(is_zero(f.evaluate({(s, j): Fraction(1)})) for j in range(s + 2, n + 1)):
            break
        s += 1
    return s


def weyl_to_front(n: int, s: int, l1: int) -> dict:
    """Index permutation s->s, l1->s+1, j->j+1 for s<j<l1, identity elsewhere."""
    sigma = {i: i for i in range(1, n + 1)}
    sigma[l1] = s + 1
    for j in range(s + 1, l1):
        sigma[j] = j + 1
    return sigma


class Builder:
    """Builds Ξ^st trees, expanding families and splitting special values.

    ``mode="full"`` expands every family; ``mode="critical"`` leaves orbit
    families unexpanded (their outputs have infinite multiplicity).
    """

    def __init__(self, mode: str = "full") -> None:
        if mode not in ("full", "critical"):
            raise ValueError(mode)
        self.mode = mode
        self.memo: dict = {}
        self.pruned = 0
        self.specials = 0

    # entry --------------------------------------------------------
    def xi(self, f: AF) -> Node:
        hit = self.memo.get(f.key)
        if hit is not None:
            forward(hit[1])
            return hit[0]
        with zero_test_log() as log:
            node = self._xi(f)
        nums = list(log.numerators)
        forward(nums)
        self.memo[f.key] = (node, nums)
        return node

    # families -----------------------------------------------------
    def expand_terms(self, fams: list[TermFamily]) -> tuple:
        out = []
        for fam in fams:
            if fam.marker == Marker.SINGLE:
                sub = self.xi(fam.rep)
                out.append(replace(sub, family=fam))
            elif fam.marker == Marker.ORBIT:
                if self.mode == "critical":
                    self.pruned += 1
                    out.append(Node(fam, pruned=True))
                else:
                    sub = self.xi(fam.sample)
                    out.append(replace(sub, family=fam))
            else:
                with zero_test_log() as log:
                    sub = self.xi(fam.rep)
                roots, outer = special_values(log.numerators, fam.param)
                forward(outer)
                out.append(replace(sub, family=fam))
                for r in roots:
                    if is_zero(r):
                        continue
                    self.specials += 1
                    z = fam.rep.substitute(fam.param, r)
                    sub = self.xi(z)
                    out.append(replace(sub, family=TermFamily(z)))
        return tuple(out)

    def e_node(self, f: AF, v: dict, note: str) -> Node:
        fams = e_step(f, v)
        return Node(TermFamily(f), Step("e", vector=v, note=note), self.expand_terms(fams))

    # construction -------------------------------------------------
    def _xi(self, f: AF) -> Node:
        n = f.n
        if not f.domain.is_subset_upper():
            raise StepError("domain not inside U_n")
        if full_upper(f):
            return Node(TermFamily(f), orbit=orbit_class(f))
        s = window(f)
        roots = f.domain.root_positions
        m = n + 1
        while m - 1 > s and (s, m - 1) in roots:
            m -= 1
        row_vals = {j: f.evaluate({(s, j): Fraction(1)}) for j in range(m, n + 1)}
        nonzero = [j for j in range(m, n + 1) if not is_zero(row_vals[j])]
        if not nonzero:
            if m <= s + 1:
                raise OrbitError("window did not advance past a complete row")
            return self.e_node(f, {(s, m - 1): Fraction(1)}, "case 1")
        l1 = max(nonzero)
        return self.case3(f, s, l1)

    def case3(self, f: AF, s: int, l1: int) -> Node:
        n = f.n
        chain: list[tuple[Step, AF]] = []
        cur = f
        tail: Optional[Node] = None
        for i in range(1, l1 - s):
            k = l1 - i
            d = cur.domain
            dk = d.intersect_roots(lambda p: in_prefix(p, k, l1))
            dk1 = d.intersect_roots(lambda p: in_prefix(p, k - 1, l1))
            if dk.dim != d.dim:
                raise OrbitError("domain left L_(k,l1) during the exchange loop")
            trivial = dk.dim == dk1.dim
            has_root = d.contains({(s, k): Fraction(1)})
            if trivial and not has_root:
                tail = self.e_node(cur, {(s, k): Fraction(1)}, "rule 1")
                break
            if trivial:
                a = cur.evaluate({(s, k): Fraction(1)})
                if is_zero(a):
                    continue
                c = simplify(-a / cur.evaluate({(s, l1): Fraction(1)}))
                u = lie.identity(n)
                u[(k, l1)] = c
                uinv = lie.identity(n)
                uinv[(k, l1)] = -c
                nxt = co_step(cur, u, uinv)
                chain.append((Step("co", g=u, ginv=uinv, note="rule 2"), cur))
                cur = nxt
                continue
            x = Group.roots(n, [(s, k)])
            y = Group.span(n, quotient_basis(d, dk1))
            nxt = eu_step(cur, x, y, dk1)
            chain.append((Step("eu", x=x, y=y, c=dk1, note="rule 3"), cur))
            cur = nxt
        if tail is None:
            sigma = weyl_to_front(n, s, l1)
            w = lie.permutation_matrix(sigma)
            winv = {(j, i): v for (i, j), v in w.items()}
            nxt = co_step(cur, w, winv)
            chain.append((Step("co", g=w, ginv=winv, note="weyl"), cur))
            cur = nxt
            if window(cur) <= s:
                raise OrbitError("Weyl conjugation did not produce the peeled-off form")
            tail = self.xi(cur)
        node = tail
        for st, src in reversed(chain):
            node = Node(TermFamily(src), st, (node,))
        return node


class GuidedBuilder(Builder):
    """Alternative strategy: expand the last admissible root direction first.

    Roots are scanned in reverse (row, column) order; a vertex without any
    admissible root falls back to the standard construction.
    """

    def _xi(self, f: AF) -> Node:
        if full_upper(f):
            return Node(TermFamily(f), orbit=orbit_class(f))
        v = last_admissible_root(f)
        if v is None:
            return super()._xi(f)
        return self.e_node(f, v, "guided")


def last_admissible_root(f: AF) -> Optional[dict]:
    n = f.n
    for i in range(n - 1, 0, -1):
        for j in range(n, i, -1):
            v = {(i, j): Fraction(1)}
            if f.domain.contains(v):
                continue
            try:
                check_e_step(f, v)
            except StepError:
                continue
            return v
    return None


def guided_tree(f: AF, mode: str = "full") -> Node:
    """A complete (F -> AFs on U_n) tree built by :class:`GuidedBuilder`."""
    return GuidedBuilder(mode).xi(f)


def xi_st(f: AF, mode: str = "full", builder: Optional[Builder] = None) -> Node:
    """The standard (F -> AFs on U_n) tree."""
    b = builder or Builder(mode)
    return b.xi(f)


class _PathBuilder(Builder):
    """Stops at the first e-step, so only the initial (eu, co) path is built."""

    def e_node(self, f: AF, v: dict, note: str) -> Node:
        return Node(TermFamily(f))


def i_st(f: AF) -> Node:
    """Largest initial (eu, co) subpath of Ξ^st(f)."""
    tree = _PathBuilder("critical").xi(f)
    return _initial_path(tree)


def _initial_path(tree: Node) -> Node:
    if tree.step is None or tree.step.kind == "e":
        return Node(tree.family)
    return Node(tree.family, tree.step, (_initial_path(tree.children[0]),))


def iota_st(f: AF) -> AF:
    node = i_st(f)
    while node.children:
        node = node.children[0]
    return node.af


def i_st_k(f: AF, k: int) -> Node:
    """Initial subpath of I^st(f) ending with its (k-1)-th Weyl conjugation."""
    if k < 1:
        raise ValueError("k >= 1")
    full = i_st(f)
    if k == 1:
        return Node(full.family)
    steps = []
    node = full
    count = 0
    while node.step is not None:
        steps.append(node)
        if node.step.note == "weyl":
            count += 1
            if count == k - 1:
                break
        node = node.children[0]
    if count < k - 1:
        raise ValueError(f"only {count} Weyl conjugations available")
    end = Node(steps[-1].children[0].family)
    for nd in reversed(steps):
        end = Node(nd.family, nd.step, (end,))
    return end


# ---------------------------------------------------------------- reports


@dataclass
class OrbitReport:
    omega: Optional[set]
    mult: dict
    omega_fin: set
    dim: int
    mode: str
    tree: Node = field(repr=False, default=None)
    classes: dict = field(default_factory=dict)
    pruned: int = 0
    specials: int = 0
    complete: bool = True  # omega and mult cover every class

    def as_json(self) -> dict:
        from .io import tree_digest

        key = lambda a: (-sum(a), [-x for x in a])  # noqa: E731
        return {
            "omega": None if self.omega is None else [list(a) for a in sorted(self.omega, key=key)],
            "mult": {",".join(map(str, a)): v for a, v in sorted(self.mult.items(), key=lambda kv: key(kv[0]))},
            "omega_fin": [list(a) for a in sorted(self.omega_fin, key=key)],
            "dim": self.dim,
            "mode": self.mode,
            "tree_digest": tree_digest(self.tree) if self.tree is not None else None,
        }


def class_summary(tree: Node) -> dict:
    """Map class -> [finite vertex count, reached by infinitely many vertices]."""
    memo: dict = {}

    def go(node: Node) -> dict:
        hit = memo.get(id(node))
        if hit is not None:
            return hit
        if node.pruned:
            out: dict = {}
        elif node.step is None:
            if node.orbit is None:
                raise OrbitError("output vertex without a class")
            out = {node.orbit: [1, False]}
        else:
            out = {}
            for ch in node.children:
                for a, (cnt, inf) in go(ch).items():
                    cur = out.setdefault(a, [0, False])
                    cur[0] += cnt
                    cur[1] = cur[1] or inf
        if node.family.marker != Marker.SINGLE:
            out = {a: [0, True] for a in out}
        memo[id(node)] = out
        return out

    return go(tree)


def omega_report(
    f: AF, strategy: str = "canonical", tree: Optional[Node] = None, mode: str = "full"
) -> OrbitReport:
    """Ω(F), mult and Ω_fin from a (F -> AFs on U_n) tree.

    ``mode="critical"`` is only meaningful for AFs with a B_n certificate: it
    skips orbit families and returns the classes a with orbit_dim(a)/2 equal
    to dim D_F reached by finitely many outputs.
    """
    builder = Builder(mode)
    if strategy == "canonical":
        tree = builder.xi(f)
    elif strategy == "guided":
        if tree is None:
            raise ValueError("guided strategy needs a tree")
        from .steps import validate_tree

        if tree.af != f:
            raise StepError("guided tree has a different input")
        validate_tree(tree)
        tree = complete_tree(tree, builder)
    else:
        raise ValueError(strategy)
    summary = class_summary(tree)
    dim = f.dim
    if mode == "full":
        omega = minimal_elements(summary) if summary else set()
        mult = {a: (INFINITE if summary[a][1] else summary[a][0]) for a in omega}
        fin = {a for a in omega if mult[a] != INFINITE}
        return OrbitReport(omega, mult, fin, dim, mode, tree, summary, builder.pruned, builder.specials)
    crit = set()
    mult = {}
    for a, (cnt, inf) in summary.items():
        half = orbit_dim(a) // 2
        if cnt and half < dim:
            raise OrbitError(f"class {a} below the domain dimension")
        if half == dim:
            if inf:
                raise OrbitError(f"critical class {a} reached by a family")
            crit.add(a)
            mult[a] = cnt
    return OrbitReport(None, mult, crit, dim, mode, tree, summary, builder.pruned, builder.specials, False)


def complete_tree(tree: Node, builder: Builder) -> Node:
    """Graft Ξ^st onto every output whose domain is not U_n; classify the rest."""
    if tree.pruned:
        return tree
    if tree.step is None:
        if tree.family.marker == Marker.PARAMETRIC:
            raise StepError("guided tree ends in an unexpanded parametric family")
        sub = builder.xi(tree.af)
        return replace(sub, family=tree.family)
    return replace(tree, children=tuple(complete_tree(c, builder) for c in tree.children))


def main_corollary_check(f: AF, a) -> str:
    """'below', 'critical' or 'above' comparing orbit_dim(a)/2 with dim D_F."""
    half = orbit_dim(normalize(a)) // 2
    if half < f.dim:
        return "below"
    return "critical" if half == f.dim else "above"


# ---------------------------------------------------------------- exchange corollary


def rif_check(tree: Node, designated: list) -> bool:
    """Outputs other than the designated AFs are all reached through families.

    Each designated AF must label exactly one output vertex reached without
    a family marker.
    """
    from .steps import validate_tree

    validate_tree(tree)
    hits = {d.key: 0 for d in designated}

    def go(node: Node, fam: bool) -> bool:
        fam = fam or node.family.marker != Marker.SINGLE
        if node.step is None:
            if not fam and node.af.key in hits:
                hits[node.af.key] += 1
                return True
            return fam
        return all(go(c, fam) for c in node.children)

    return go(tree, False) and all(v == 1 for v in hits.values())


def exchange_corollary(f: AF, f1: AF, f2: AF, certs: dict) -> dict:
    """Ω_fin(f) = Ω_fin(f1) ∪ Ω_fin(f2) under the corollary's hypotheses.

    ``certs`` holds trees: "f" (from f, designating f1' and f2'), "f1" and
    "f2" (each designating its primed AF), plus "f1p" and "f2p" themselves.
    Raises ValueError when a hypothesis fails.
    """
    if not f.dim == f1.dim == f2.dim:
        raise ValueError("domains of different dimensions")
    f1p, f2p = certs["f1p"], certs["f2p"]
    if certs["f"].af != f or certs["f1"].af != f1 or certs["f2"].af != f2:
        raise ValueError("certificate trees start at the wrong AFs")
    if not rif_check(certs["f"], [f1p] if f1p == f2p else [f1p, f2p]):
        raise ValueError("f does not reduce to {f1', f2'}")
    if not rif_check(certs["f1"], [f1p]) or not rif_check(certs["f2"], [f2p]):
        raise ValueError("f1 or f2 does not reduce to its primed AF")
    lhs = omega_report(f, mode="critical").omega_fin
    rhs = omega_report(f1, mode="critical").omega_fin | omega_report(f2, mode="critical").omega_fin
    return {"lhs": sorted(lhs), "rhs": sorted(rhs), "holds": lhs == rhs}
