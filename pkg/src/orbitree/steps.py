"""Expansion, exchange and conjugation steps, and trees built from them.

A tree vertex is a :class:`Node`.  Its label is a :class:`TermFamily`: a
single AF, or a one-parameter family of e-step terms.  A family vertex is
expanded through one sample AF; for an orbit family every member is
conjugate to the sample by a group fixing the parent, so one subtree stands
for all of them.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from math import lcm
from typing import Callable, Iterator, Mapping, Optional, Sequence

from . import lie
from .af import AF, DomainError, Group, compose, standard_embed
from .linalg import Echelon, affine_solve, inverse
from .scalars import PARAMS, fresh_param, is_zero, simplify


class StepError(ValueError):
    """A step precondition failed."""


class Marker(str, Enum):
    SINGLE = "single"
    ORBIT = "orbit"
    PARAMETRIC = "parametric"


@dataclass(frozen=True)
class TermFamily:
    """One AF, or the nonconstant terms Z_t (t != 0) of an e-step."""

    rep: AF
    marker: Marker = Marker.SINGLE
    param: Optional[int] = None
    witness: Optional[dict] = None

    @property
    def sample(self) -> AF:
        """The AF that is actually expanded further."""
        if self.marker == Marker.ORBIT:
            return self.rep.substitute(self.param, Fraction(1))
        return self.rep

    def check(self, trials: Sequence[int] = (2, 3, -5)) -> None:
        """Verify the marker's claim on a few parameter values."""
        if self.marker == Marker.SINGLE:
            if self.param is not None and self.rep.depends_on(self.param):
                raise StepError("single family depends on its parameter")
            return
        if self.marker == Marker.ORBIT:
            v = self.witness["vector"]
            for img in witness_images(self.witness, self.sample, trials):
                t = img.evaluate(v)
                if img != self.rep.substitute(self.param, t):
                    raise StepError("witness image is not a member of the family")


@dataclass(frozen=True)
class Step:
    """Data of one step applied at a vertex."""

    kind: str  # "e", "eu" or "co"
    vector: Optional[dict] = None  # e: expanding direction
    x: Optional[Group] = None  # eu
    y: Optional[Group] = None  # eu
    c: Optional[Group] = None  # eu
    g: Optional[dict] = None  # co
    ginv: Optional[dict] = None  # co
    note: str = ""


@dataclass(eq=False)
class Node:
    """A tree vertex; ``step`` and ``children`` describe its depth-one subtree."""

    family: TermFamily
    step: Optional[Step] = None
    children: tuple = ()
    pruned: bool = False  # family subtree deliberately not expanded
    orbit: Optional[tuple] = None  # class of an output vertex, when known

    @property
    def af(self) -> AF:
        return self.family.sample

    @property
    def label(self) -> AF:
        return self.family.rep

    @property
    def is_output(self) -> bool:
        return self.step is None

    def walk(self) -> Iterator["Node"]:
        yield self
        for ch in self.children:
            yield from ch.walk()

    def outputs(self) -> list["Node"]:
        return [n for n in self.walk() if n.is_output]

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=-1)

    def size(self) -> int:
        return sum(1 for _ in self.walk())


def leaf(f: AF | TermFamily) -> Node:
    return Node(f if isinstance(f, TermFamily) else TermFamily(f))


# ---------------------------------------------------------------- witnesses


def torus_witness(f: AF, v: Mapping) -> Optional[list]:
    """Diagonal weight fixing f whose character on v is nontrivial."""
    n = f.n
    cons = []

    def same(p, q):
        row = [Fraction(0)] * n
        row[p[0] - 1] += 1
        row[p[1] - 1] -= 1
        row[q[0] - 1] -= 1
        row[q[1] - 1] += 1
        cons.append((row, Fraction(0)))

    def zero(p):
        row = [Fraction(0)] * n
        row[p[0] - 1] += 1
        row[p[1] - 1] -= 1
        cons.append((row, Fraction(0)))

    for b, val in f.pairs():
        keys = list(b)
        for p, q in zip(keys, keys[1:]):
            same(p, q)
        if not is_zero(val):
            zero(keys[0])
    vk = list(v)
    for p, q in zip(vk, vk[1:]):
        same(p, q)
    sol = affine_solve(cons, n) if cons else None
    kernel = sol.kernel if sol is not None else [
        tuple(Fraction(int(i == j)) for i in range(n)) for j in range(n)
    ]
    i, j = vk[0]
    for w in kernel:
        if w[i - 1] != w[j - 1]:
            return list(w)
    return None


def translation_witness(f: AF, v: Mapping) -> Optional[tuple]:
    """Root vector E fixing f with f([E, v]) != 0."""
    n = f.n
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            if a == b:
                continue
            e = {(a, b): Fraction(1)}
            ev = lie.bracket(e, v)
            if not ev or not f.domain.contains(ev):
                continue
            if is_zero(f.evaluate(ev)):
                continue
            if f.is_fixed_by(e):
                return (a, b)
    return None


def witness_images(witness: dict, sample: AF, trials: Sequence[int]) -> Iterator[AF]:
    """Images of the sample under a few elements of the witness group."""
    n = sample.n
    if witness["kind"] == "torus":
        w = witness["weights"]
        den = lcm(*(Fraction(x).denominator for x in w))
        ints = [int(Fraction(x) * den) for x in w]
        for mu in trials:
            h = {(k, k): Fraction(mu) ** ints[k - 1] for k in range(1, n + 1)}
            hinv = {(k, k): 1 / x for (k, _), x in h.items()}
            yield sample.conjugate(h, hinv)
        return
    a, b = witness["root"]
    for c in trials:
        g = {(k, k): Fraction(1) for k in range(1, n + 1)}
        g[(a, b)] = Fraction(c)
        ginv = dict(g)
        ginv[(a, b)] = Fraction(-c)
        yield sample.conjugate(g, ginv)


# ---------------------------------------------------------------- steps


def check_e_step(f: AF, v: Mapping) -> None:
    if f.domain.contains(v):
        raise StepError("expanding direction already lies in the domain")
    for b in f.domain.basis:
        c = lie.bracket(v, b)
        if not f.domain.contains(c):
            raise StepError("expanding direction does not normalize the domain")
        if not is_zero(f.evaluate(c)):
            raise StepError("expanding direction does not fix the functional")


def e_step(f: AF, v: Mapping, hint: Optional[str] = None) -> list[TermFamily]:
    """Terms of the expansion of f over span(v): the constant term and one family."""
    v = {k: Fraction(x) if isinstance(x, int) else x for k, x in v.items()}
    check_e_step(f, v)
    const = TermFamily(f.extend(v, 0))
    idx = fresh_param(list(f.values.values()) + [x for b in f.domain.basis for x in b.values()])
    rep = f.extend(v, PARAMS[idx])
    witness = None
    if hint in (None, "torus"):
        w = torus_witness(f, v)
        if w is not None:
            witness = {"kind": "torus", "weights": w, "vector": v}
    if witness is None and hint in (None, "translation"):
        r = translation_witness(f, v)
        if r is not None:
            witness = {"kind": "translation", "root": r, "vector": v}
    marker = Marker.ORBIT if witness else Marker.PARAMETRIC
    return [const, TermFamily(rep, marker, idx, witness)]


def e_quasipath(f: AF, vectors: Sequence[Mapping]) -> list[AF]:
    """Chain of one-dimensional expansions, returning the constant-term chain."""
    out = [f]
    for v in vectors:
        out.append(e_step(out[-1], v)[0].rep)
    return out


def exchange_complement(f: AF, y: Group) -> Group:
    """The subgroup C with D_F = Y C obtained by zeroing the pivot coordinates of Y."""
    piv = set(y.pivots)
    return f.domain.intersect_roots(lambda p: p not in piv)


def check_eu(f: AF, x: Group, y: Group, c: Group) -> None:
    """Conditions of an exchange, each failure reported distinctly."""
    d = f.domain
    if not d.contains_group(c):
        raise StepError("C is not inside the domain")
    for grp_a, grp_b in ((x, x), (y, y), (x, y)):
        for a in grp_a.basis:
            for b in grp_b.basis:
                if not c.contains(lie.bracket(a, b)):
                    raise StepError("condition 1: a bracket of X, Y escapes C")
    if not (y + c) == d:
        raise StepError("condition 2: D_F != Y C")
    fc = f.restrict(c)
    for g in x.basis + y.basis:
        for b in c.basis:
            br = lie.bracket(g, b)
            if not c.contains(br):
                raise StepError("condition 3: X or Y does not normalize C")
            if not is_zero(f.evaluate(br)):
                raise StepError("condition 3: X or Y does not fix F on C")
    for grp in (x, y):
        for b in grp.intersect(c).basis:
            if not is_zero(fc.evaluate(b)):
                raise StepError("condition 4: F nonzero on X∩C or Y∩C")
    m = pairing_matrix(f, x, y, c)
    if len(m) != (len(m[0]) if m else 0):
        raise StepError("degenerate pairing: quotients of different dimensions")
    try:
        if m:
            inverse(m)
    except ValueError:
        raise StepError("degenerate pairing: F([x, y]) is singular") from None


def quotient_basis(g: Group, c: Group) -> list[dict]:
    e = Echelon()
    for b in c.basis:
        e.insert(b)
    out = []
    for b in g.basis:
        if e.insert(b) is None:
            out.append(b)
    return out


def pairing_matrix(f: AF, x: Group, y: Group, c: Group) -> list[list]:
    xs = quotient_basis(x, c)
    ys = quotient_basis(y, c)
    fc = f.restrict(c)
    return [[fc.evaluate(lie.bracket(a, b)) for b in ys] for a in xs]


def eu_step(f: AF, x: Group, y: Group, c: Optional[Group] = None) -> AF:
    """Exchange Y for X: output on X C, zero on X, equal to f on C."""
    if c is None:
        c = exchange_complement(f, y)
    check_eu(f, x, y, c)
    pairs = [(b, f.evaluate(b)) for b in c.basis] + [(b, 0) for b in x.basis]
    out = AF.from_pairs(f.n, pairs)
    if out.dim != f.dim:
        raise StepError("exchange changed the dimension")
    return out


def co_step(f: AF, g: Mapping, ginv: Optional[Mapping] = None) -> AF:
    if ginv is None:
        n = f.n
        try:
            ginv = lie.from_dense(inverse(lie.to_dense(g, n)))
        except ValueError:
            raise StepError("singular conjugator") from None
    return f.conjugate(g, ginv)


# ---------------------------------------------------------------- tree builders


def e_node(f: AF, v: Mapping, expand: Callable[[TermFamily], Node] = leaf, note: str = "") -> Node:
    fams = e_step(f, v)
    return Node(TermFamily(f), Step("e", vector=dict(v), note=note), tuple(expand(t) for t in fams))


def eu_node(f: AF, x: Group, y: Group, c: Optional[Group] = None, child=None, note: str = "") -> Node:
    if c is None:
        c = exchange_complement(f, y)
    out = eu_step(f, x, y, c)
    ch = child(out) if child else leaf(out)
    return Node(TermFamily(f), Step("eu", x=x, y=y, c=c, note=note), (ch,))


def co_node(f: AF, g: Mapping, ginv: Mapping, child=None, note: str = "") -> Node:
    out = co_step(f, g, ginv)
    ch = child(out) if child else leaf(out)
    return Node(TermFamily(f), Step("co", g=dict(g), ginv=dict(ginv), note=note), (ch,))


def path(f: AF, steps: Sequence[Step]) -> Node:
    """Build an (eu, co) path from step data."""
    if not steps:
        return leaf(f)
    s = steps[0]
    rest = lambda out: path(out, steps[1:])  # noqa: E731
    if s.kind == "eu":
        return eu_node(f, s.x, s.y, s.c, rest, s.note)
    if s.kind == "co":
        return co_node(f, s.g, s.ginv, rest, s.note)
    raise StepError("path steps must be eu or co")


def path_steps(p: Node) -> list[Step]:
    out = []
    node = p
    while node.step is not None:
        if node.step.kind == "e" or len(node.children) != 1:
            raise StepError("not an (eu, co) path")
        out.append(node.step)
        node = node.children[0]
    return out


def path_output(p: Node) -> AF:
    node = p
    while node.children:
        node = node.children[0]
    return node.af


def invert_path(p: Node) -> Node:
    """Reverse an (eu, co) path."""
    labels = [p.af]
    node = p
    steps = []
    while node.step is not None:
        if node.step.kind == "e":
            raise StepError("e-step present")
        steps.append(node.step)
        node = node.children[0]
        labels.append(node.af)
    inv = []
    for k in range(len(steps) - 1, -1, -1):
        s = steps[k]
        src, dst = labels[k + 1], labels[k]
        if s.kind == "co":
            inv.append(Step("co", g=s.ginv, ginv=s.g, note=s.note))
        else:
            c = src.domain.intersect(dst.domain)
            inv.append(Step("eu", x=s.y, y=s.x, c=c, note=s.note))
    out = path(labels[-1], inv)
    if path_output(out) != labels[0]:
        raise StepError("exchange is not invertible here: F is nonzero on Y")
    return out


def graft(children: Mapping[AF, Node], parent: Node) -> Node:
    """Attach a tree at every output of parent whose label is a key."""
    used = set()

    def go(node: Node) -> Node:
        if node.is_output:
            sub = children.get(node.af)
            if sub is None:
                return node
            if sub.af != node.af:
                raise StepError("label mismatch")
            used.add(node.af)
            return replace(sub, family=node.family)
        return replace(node, children=tuple(go(c) for c in node.children))

    out = go(parent)
    missing = set(children) - used
    if missing:
        raise StepError("graft label not found among outputs")
    return out


def map_tree(
    node: Node,
    af_map: Callable[[AF], AF],
    vec_map: Callable[[dict], dict],
    n: int,
    extra_c: Optional[Group] = None,
) -> Node:
    """Vertexwise transport of labels and step data.

    ``extra_c`` is added to the complement of every exchange (used when
    composing with an AF whose domain is carried along).  Family witnesses
    are recomputed for the transported labels.
    """
    fam = node.family
    new_fam = replace(fam, rep=af_map(fam.rep))
    step = node.step
    if step is not None:
        grp = lambda g: g.map(vec_map, n) if g is not None else None  # noqa: E731
        c = grp(step.c)
        if c is not None and extra_c is not None:
            c = c + extra_c
        step = replace(
            step,
            vector=vec_map(step.vector) if step.vector else None,
            x=grp(step.x),
            y=grp(step.y),
            c=c,
            g=vec_map(step.g) if step.g else None,
            ginv=vec_map(step.ginv) if step.ginv else None,
        )
    children = tuple(map_tree(ch, af_map, vec_map, n, extra_c) for ch in node.children)
    if step is not None and step.kind == "e":
        children = tuple(_rewitness(ch, new_fam.sample, step.vector) for ch in children)
    return Node(new_fam, step, children, node.pruned, node.orbit)


def _rewitness(ch: Node, parent: AF, v: dict) -> Node:
    fam = ch.family
    if fam.witness is None:
        return ch
    if fam.witness["kind"] == "torus":
        w = torus_witness(parent, v)
        wit = {"kind": "torus", "weights": w, "vector": v} if w is not None else None
    else:
        r = translation_witness(parent, v)
        wit = {"kind": "translation", "root": r, "vector": v} if r is not None else None
    if wit is None:
        wit = None
        fam = replace(fam, marker=Marker.PARAMETRIC, witness=None)
    else:
        fam = replace(fam, witness=wit)
    return replace(ch, family=fam)


def tree_embed(index_map: Mapping[int, int], tr: Node, n: int) -> Node:
    """j(Ξ) for a standard embedding; conjugators get identity on new indices."""
    free = [i for i in range(1, n + 1) if i not in set(index_map.values())]

    def vec(x):
        out = {(index_map[i], index_map[j]): v for (i, j), v in x.items()}
        return out

    def mat(x):
        out = vec(x)
        if any(i == j for (i, j) in x):
            for i in free:
                out[(i, i)] = Fraction(1)
        return out

    def vmap(x):
        return mat(x)

    return map_tree(tr, lambda f: standard_embed(index_map, f, n), vmap, n)


def tree_compose(tr: Node, f: AF) -> Node:
    """Ξ ∘ f vertexwise; every vertex label must compose with f."""
    n = f.n
    return map_tree(tr, lambda z: compose(z, f), lambda x: x, n, extra_c=f.domain)


def validate_tree(node: Node) -> None:
    """Recheck every step of a tree."""
    st = node.step
    if st is None:
        return
    f = node.af
    if st.kind == "e":
        check_e_step(f, st.vector)
        for ch in node.children:
            rep = ch.label
            if rep.restrict(f.domain) != f or rep.dim != f.dim + 1:
                raise StepError("e-step term does not extend the input")
            ch.family.check()
    elif st.kind == "eu":
        out = eu_step(f, st.x, st.y, st.c)
        if node.children[0].af != out:
            raise StepError("eu-step output mismatch")
    elif st.kind == "co":
        if co_step(f, st.g, st.ginv) != node.children[0].af:
            raise StepError("co-step output mismatch")
    else:
        raise StepError(f"unknown step kind {st.kind}")
    for ch in node.children:
        validate_tree(ch)


# ---------------------------------------------------------------- variety checks


def e_step_term_of(f: AF, v: Mapping, j) -> AF:
    """The extension of f to D_f + span(v) cut out by the point J of X_f."""
    from .af import trace_form

    return f.extend(v, trace_form(j, v))


def e_step_partition_ok(f: AF, v: Mapping, j) -> bool:
    """J in X_f lies in X of exactly one e-step term (families counted per member)."""
    from .af import XVariety, trace_form

    const, fam = e_step(f, v)
    c = trace_form(j, v)
    hits = 0
    if XVariety(const.rep).contains(j):
        hits += 1
    for t in {c, c + 1, c - 1, 2 * c + 3}:
        if is_zero(t):
            continue
        member = fam.rep.substitute(fam.param, t)
        if XVariety(member).contains(j):
            hits += 1
    return hits == 1 and e_step_term_of(f, v, j) == (const.rep if is_zero(c) else fam.rep.substitute(fam.param, c))


def one_dim_exchange(f: AF, x: Group, y: Group, c: Optional[Group] = None) -> bool:
    """X and Y are lines meeting C trivially and f vanishes on Y."""
    if c is None:
        c = exchange_complement(f, y)
    if x.dim != 1 or y.dim != 1:
        return False
    if c.contains(x.basis[0]) or c.contains(y.basis[0]):
        return False
    return is_zero(f.evaluate(y.basis[0]))


def exchange_isomorphism(f: AF, x: Group, y: Group, j, c: Optional[Group] = None):
    """Image in X_z (z the exchange output) of a point J of X_f.

    The unique element of Y carrying tr(J .) on XC to z is applied first,
    then the element of X with the same coordinate is undone.  Both are
    conjugations, so orbits are preserved.
    """
    from .af import trace_form

    if c is None:
        c = exchange_complement(f, y)
    if not one_dim_exchange(f, x, y, c):
        raise StepError("explicit isomorphism needs a one-dimensional exchange with f(Y) = 0")
    n = f.n
    xv, yv = x.basis[0], y.basis[0]
    pair = f.evaluate(lie.bracket(yv, xv))
    if is_zero(pair):
        raise StepError("degenerate pairing")
    s = trace_form(j, xv) / pair
    jj = lie.from_dense(j)
    g = lie.exp_nilpotent({k: s * v for k, v in yv.items()}, n)
    ginv = lie.exp_nilpotent({k: -s * v for k, v in yv.items()}, n)
    k_pt = lie.conjugate(g, jj, ginv)
    h = lie.exp_nilpotent({k: -s * v for k, v in xv.items()}, n)
    hinv = lie.exp_nilpotent({k: s * v for k, v in xv.items()}, n)
    return lie.to_dense(lie.conjugate(h, k_pt, hinv), n)
