"""Unipotent groups and additive functionals at the Lie algebra level.

A unipotent group is stored as the reduced row echelon basis of its Lie
algebra, with coordinates ordered lexicographically by matrix position.  An
additive functional (AF) is a linear form on that Lie algebra vanishing on
brackets; it is stored by its values on the echelon basis, so evaluating
it on an element only needs the element's pivot coordinates.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Mapping, Optional, Sequence

from . import lie
from .linalg import Echelon, Mat, affine_solve, intersect_spans, nullspace
from .lie import Pos
from .scalars import Scalar, is_param, is_zero, simplify, substitute


class DomainError(ValueError):
    """Raised when a group or AF fails a structural precondition."""


def _lex(c):
    return c


class Group:
    """A unipotent subgroup of GL_n given by its Lie algebra."""

    __slots__ = ("n", "_ech", "__dict__")

    def __init__(self, n: int, ech: Echelon) -> None:
        self.n = n
        self._ech = ech

    # construction ------------------------------------------------------
    @classmethod
    def span(cls, n: int, vectors: Iterable[Mapping]) -> "Group":
        """The linear span (no bracket closure)."""
        e = Echelon(_lex)
        for v in vectors:
            e.insert(v)
        return cls(n, e)

    @classmethod
    def generated(cls, n: int, gens: Iterable[Mapping]) -> "Group":
        """Smallest bracket-closed span containing ``gens``; checks nilpotence."""
        e = Echelon(_lex)
        queue = [dict(g) for g in gens]
        basis: list = []
        while queue:
            v = queue.pop()
            before = len(e.rows)
            e.insert(v)
            if len(e.rows) > before:
                for b in basis:
                    queue.append(lie.bracket(v, b))
                basis.append(v)
        g = cls(n, e)
        g.engel_flag()
        return g

    @classmethod
    def roots(cls, n: int, positions: Iterable[Pos]) -> "Group":
        return cls.span(n, [lie.unit(i, j) for (i, j) in positions])

    @classmethod
    def upper(cls, n: int) -> "Group":
        """U_n."""
        return cls.roots(n, [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)])

    @classmethod
    def trivial(cls, n: int) -> "Group":
        return cls(n, Echelon(_lex))

    @classmethod
    def radical(cls, blocks: Sequence[int]) -> "Group":
        """Unipotent radical of the standard parabolic with the given Levi blocks."""
        n = sum(blocks)
        which = []
        for b, size in enumerate(blocks):
            which += [b] * size
        return cls.roots(
            n,
            [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if which[i - 1] < which[j - 1]],
        )

    @classmethod
    def first_rows(cls, n: int, r: int) -> "Group":
        """Domain of J_r: the first r-1 rows of U_n."""
        return cls.roots(n, [(i, j) for i in range(1, r) for j in range(i + 1, n + 1)])

    # queries ----------------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self._ech.rows)

    @cached_property
    def basis(self) -> list[dict]:
        return [row for row, _ in self._ech.sorted_rows()]

    @cached_property
    def pivots(self) -> list[Pos]:
        return sorted(self._ech.rows)

    @cached_property
    def support(self) -> frozenset:
        return frozenset(k for b in self.basis for k in b)

    @cached_property
    def key(self) -> tuple:
        return (self.n,) + tuple(tuple(sorted(b.items())) for b in self.basis)

    def __eq__(self, other) -> bool:
        return isinstance(other, Group) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"Group(n={self.n}, dim={self.dim})"

    def coordinates(self, vec: Mapping) -> Optional[dict]:
        return self._ech.coordinates(dict(vec))

    def contains(self, vec: Mapping) -> bool:
        rem, _ = self._ech.reduce(dict(vec))
        return not rem

    def contains_root(self, i: int, j: int) -> bool:
        return self.contains({(i, j): Fraction(1)})

    @cached_property
    def root_positions(self) -> frozenset:
        """Positions (i, j) whose root group lies in the group."""
        return frozenset(p for p in self.support if self.contains_root(*p))

    def contains_group(self, other: "Group") -> bool:
        return all(self.contains(b) for b in other.basis)

    def is_root_generated(self) -> bool:
        return all(len(b) == 1 for b in self.basis)

    def is_subset_upper(self) -> bool:
        return all(i < j for (i, j) in self.support)

    def is_bracket_closed(self) -> bool:
        bs = self.basis
        return all(self.contains(lie.bracket(a, b)) for k, a in enumerate(bs) for b in bs[k + 1 :])

    def normalized_by(self, x: Mapping) -> bool:
        return all(self.contains(lie.bracket(x, b)) for b in self.basis)

    def engel_flag(self) -> list[int]:
        """Dimensions of the common kernel flag; raises if not nilpotent.

        W_k = {v : b v in W_(k-1) for all b}; membership in W_(k-1) is tested
        with a basis of its annihilator.
        """
        n = self.n
        mats = [lie.to_dense(b, n) for b in self.basis]
        if not mats:
            return [0, n]
        dims = [0]
        ann = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        while True:
            rows = [[sum((q[r] * m[r][c] for r in range(n) if q[r]), Fraction(0)) for c in range(n)] for m in mats for q in ann]
            w = nullspace(rows) if rows else [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
            if len(w) == dims[-1]:
                break
            dims.append(len(w))
            if len(w) == n:
                break
            ann = nullspace(w)
        if dims[-1] != n:
            raise DomainError("span is not a nilpotent Lie algebra")
        return dims

    # algebra ----------------------------------------------------------
    def __add__(self, other: "Group") -> "Group":
        e = self._ech.copy()
        for b in other.basis:
            e.insert(b)
        return Group(self.n, e)

    def intersect(self, other: "Group") -> "Group":
        return Group.span(self.n, intersect_spans(self.basis, other.basis))

    def intersect_roots(self, allowed: Callable[[Pos], bool]) -> "Group":
        """Intersection with the span of the root vectors at allowed positions."""
        e = Echelon(lambda c: (allowed(c), c))
        for b in self.basis:
            e.insert(b)
        keep = [row for p, (row, _) in e.rows.items() if allowed(p)]
        return Group.span(self.n, keep)

    def map(self, f: Callable[[dict], dict], n: Optional[int] = None) -> "Group":
        return Group.span(self.n if n is None else n, [f(b) for b in self.basis])


class AF:
    """An additive functional on a unipotent group."""

    __slots__ = ("domain", "values", "__dict__")

    def __init__(self, domain: Group, values: Mapping[Pos, Scalar]) -> None:
        self.domain = domain
        self.values = {p: simplify(values.get(p, 0)) for p in domain.pivots}

    # construction ------------------------------------------------------
    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[Mapping, Scalar]]) -> "AF":
        """AF on the span of the vectors with the prescribed values."""
        e = Echelon(_lex)
        for vec, val in pairs:
            res = e.insert(dict(vec), val)
            if res is not None and not is_zero(res):
                raise DomainError("inconsistent values on dependent vectors")
        values = {p: val for p, (_row, val) in e.rows.items()}
        return cls(Group(n, e), values)

    @classmethod
    def trivial(cls, domain: Group) -> "AF":
        return cls(domain, {})

    @classmethod
    def empty(cls, n: int) -> "AF":
        """F_∅ on the trivial group."""
        return cls(Group.trivial(n), {})

    @classmethod
    def on_roots(cls, n: int, positions: Iterable[Pos], values: Mapping[Pos, Scalar]) -> "AF":
        dom = Group.roots(n, positions)
        return cls(dom, {p: values.get(p, 0) for p in dom.pivots})

    # queries ----------------------------------------------------------
    @property
    def n(self) -> int:
        return self.domain.n

    @property
    def dim(self) -> int:
        return self.domain.dim

    def __call__(self, vec: Mapping) -> Scalar:
        return self.evaluate(vec)

    def evaluate(self, vec: Mapping) -> Scalar:
        coords = self.domain.coordinates(vec)
        if coords is None:
            raise DomainError("element outside the domain")
        total = 0
        for p, c in coords.items():
            v = self.values[p]
            if not is_zero(v):
                total = total + c * v
        return simplify(total)

    def root_value(self, i: int, j: int) -> Optional[Scalar]:
        """Value on e_ij if that root group lies in the domain, else None."""
        vec = {(i, j): Fraction(1)}
        if not self.domain.contains(vec):
            return None
        return self.evaluate(vec)

    def vanishes_on(self, group: Group) -> bool:
        return all(is_zero(self.evaluate(b)) for b in group.basis)

    @cached_property
    def key(self) -> tuple:
        return (self.domain.key, tuple(sorted(self.values.items())))

    def __eq__(self, other) -> bool:
        return isinstance(other, AF) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        nz = {p: v for p, v in self.values.items() if not is_zero(v)}
        return f"AF(n={self.n}, dim={self.dim}, nonzero={nz})"

    @property
    def is_parametric(self) -> bool:
        return any(is_param(v) for v in self.values.values())

    def check(self) -> None:
        """Assert bracket closure of the domain and vanishing on brackets."""
        bs = self.domain.basis
        for k, a in enumerate(bs):
            for b in bs[k + 1 :]:
                c = lie.bracket(a, b)
                if not self.domain.contains(c):
                    raise DomainError("domain is not bracket closed")
                if not is_zero(self.evaluate(c)):
                    raise DomainError("functional does not vanish on a bracket")

    def is_valid(self) -> bool:
        try:
            self.check()
        except DomainError:
            return False
        return True

    # operations -------------------------------------------------------
    def restrict(self, h: Group) -> "AF":
        sub = self.domain.intersect(h)
        return AF(sub, {p: self.evaluate(b) for p, b in zip(sub.pivots, sub.basis)})

    def restrict_roots(self, allowed: Callable[[Pos], bool]) -> "AF":
        sub = self.domain.intersect_roots(allowed)
        return AF(sub, {p: self.evaluate(b) for p, b in zip(sub.pivots, sub.basis)})

    def pairs(self) -> list[tuple[dict, Scalar]]:
        return [(b, self.values[p]) for p, b in zip(self.domain.pivots, self.domain.basis)]

    def transform(self, f: Callable[[dict], dict], n: Optional[int] = None) -> "AF":
        """AF on f(D) with value F(x) at f(x), for a linear injective f."""
        return AF.from_pairs(self.n if n is None else n, [(f(b), v) for b, v in self.pairs()])

    def conjugate(self, g: Mapping, ginv: Mapping) -> "AF":
        """gF: the AF x -> F(g^{-1} x g) on g D g^{-1}."""
        return self.transform(lambda b: lie.conjugate(g, b, ginv))

    def permute(self, sigma: Mapping[int, int]) -> "AF":
        """Conjugation by the permutation matrix sending e_ij to e_{sigma i, sigma j}."""
        return self.transform(lambda b: {(sigma[i], sigma[j]): v for (i, j), v in b.items()})

    def extend(self, vec: Mapping, value: Scalar) -> "AF":
        """AF on D + span(vec) agreeing with self on D and taking value at vec."""
        return AF.from_pairs(self.n, self.pairs() + [(dict(vec), value)])

    def substitute(self, index: int, value: Scalar) -> "AF":
        return AF(self.domain, {p: substitute(v, index, value) for p, v in self.values.items()})

    def depends_on(self, index: int) -> bool:
        from .scalars import depends_on

        return any(depends_on(v, index) for v in self.values.values())

    def is_fixed_by(self, x: Mapping) -> bool:
        """Lie-level: x normalizes D and F vanishes on [x, D]."""
        for b in self.domain.basis:
            c = lie.bracket(x, b)
            if not self.domain.contains(c) or not is_zero(self.evaluate(c)):
                return False
        return True


def compose(f2: AF, f1: AF) -> AF:
    """f2 ∘ f1: the common extension to D_{f2} D_{f1} (D_{f1} normal)."""
    n = f1.n
    for b in f2.domain.basis:
        if not f1.is_fixed_by(b):
            raise DomainError("D_f2 does not fix f1")
    common = f1.domain.intersect(f2.domain)
    for b in common.basis:
        if not is_zero(simplify(f1.evaluate(b) - f2.evaluate(b))):
            raise DomainError("f1 and f2 disagree on the intersection")
    out = AF.from_pairs(n, f1.pairs() + f2.pairs())
    return out


def standard_embed(index_map: Mapping[int, int], f: AF, n: int) -> AF:
    """Transport an AF of GL_m into GL_n along an injective index map."""
    if len(set(index_map.values())) != len(index_map):
        raise DomainError("index map is not injective")
    return f.transform(lambda b: {(index_map[i], index_map[j]): v for (i, j), v in b.items()}, n)


def lower_right(f: AF, n: int) -> AF:
    """Lower right corner copy of an AF of GL_m inside GL_n."""
    shift = n - f.n
    return standard_embed({i: i + shift for i in range(1, f.n + 1)}, f, n)


def j_matrix(f: AF) -> Mat:
    """J_F: (j, i) entry equal to the value of F on the root (i, j)."""
    if not f.domain.is_root_generated():
        raise DomainError("domain is not generated by root groups")
    m = [[Fraction(0)] * f.n for _ in range(f.n)]
    for p, b in zip(f.domain.pivots, f.domain.basis):
        (i, j), c = next(iter(b.items()))
        m[j - 1][i - 1] = simplify(f.values[p] / c)
    return m


def rg(f: AF) -> AF:
    """Restriction to the largest subgroup generated by root groups."""
    roots = f.domain.root_positions
    dom = Group.roots(f.n, roots)
    return AF(dom, {p: f.evaluate(b) for p, b in zip(dom.pivots, dom.basis)})


def trace_form(j: Mat, x: Mapping) -> Scalar:
    """tr(J x)."""
    total = 0
    for (a, b), v in x.items():
        total = total + j[b - 1][a - 1] * v
    return simplify(total)


class XVariety:
    """The affine space X_F = {J : tr(J x) = F(x) for x in Lie D_F} in gl_n."""

    def __init__(self, f: AF, lower: bool = False) -> None:
        """With ``lower`` only the strictly lower triangular (nilpotent) slice."""
        self.af = f
        n = f.n
        self.n = n
        cons = []
        for b, v in f.pairs():
            coeffs = [Fraction(0)] * (n * n)
            for (i, j), c in b.items():
                coeffs[(j - 1) * n + (i - 1)] = c
            cons.append((coeffs, v))
        if lower:
            for r in range(n):
                for c in range(r, n):
                    coeffs = [Fraction(0)] * (n * n)
                    coeffs[r * n + c] = Fraction(1)
                    cons.append((coeffs, Fraction(0)))
        sol = affine_solve(cons, n * n)
        assert sol is not None
        self.solution = sol

    @property
    def dim(self) -> int:
        return self.solution.dim

    def point(self, coords: Sequence[Scalar]) -> Mat:
        n = self.n
        flat = list(self.solution.particular)
        for c, k in zip(coords, self.solution.kernel):
            if c:
                flat = [x + c * y for x, y in zip(flat, k)]
        return [[simplify(flat[r * n + c]) for c in range(n)] for r in range(n)]

    def contains(self, j: Mat) -> bool:
        return all(trace_form(j, b) == v for b, v in self.af.pairs())


def x_variety(f: AF) -> XVariety:
    return XVariety(f)


def itr(j: Mat, domain: Group) -> AF:
    """The AF x -> tr(J x) on the given domain; checks it is an AF."""
    out = AF(domain, {p: trace_form(j, b) for p, b in zip(domain.pivots, domain.basis)})
    out.check()
    return out


def is_a2_1d(g: Group) -> bool:
    """One-dimensional (or trivial) with pairwise non-interacting support roots."""
    if g.dim == 0:
        return True
    if g.dim > 1:
        return False
    sup = list(g.basis[0])
    for k, (i, j) in enumerate(sup):
        for (a, b) in sup[k + 1 :]:
            # roots e_i - e_j and e_a - e_b: sum or difference is a root iff
            # they share an index in a compatible way, or are opposite
            if (i, j) == (b, a):
                return False
            if j == a or b == i:
                return False  # sum is a root
            if i == a or j == b:
                return False  # difference is a root
    return True


def h_minimal(v: Group, contains: Callable[[dict], bool]) -> bool:
    """No proper root projection p(V) of the a2-1d group V lies in H."""
    from itertools import combinations

    if not is_a2_1d(v):
        raise DomainError("not an a2-1d group")
    if v.dim == 0:
        return True
    b = v.basis[0]
    keys = sorted(b)
    for r in range(1, len(keys)):
        for sub in combinations(keys, r):
            if contains({k: b[k] for k in sub}):
                return False
    return True


def stab_torus_weights(f: AF) -> list[list[Fraction]]:
    """Basis of the Lie algebra of the diagonal torus stabilizer of f."""
    n = f.n
    cons = []
    for b, v in f.pairs():
        keys = list(b)
        for a, c in zip(keys, keys[1:]):
            coeffs = [Fraction(0)] * n
            coeffs[a[0] - 1] += 1
            coeffs[a[1] - 1] -= 1
            coeffs[c[0] - 1] -= 1
            coeffs[c[1] - 1] += 1
            cons.append((coeffs, Fraction(0)))
        if not is_zero(v):
            (i, j) = keys[0]
            coeffs = [Fraction(0)] * n
            coeffs[i - 1] += 1
            coeffs[j - 1] -= 1
            cons.append((coeffs, Fraction(0)))
    if not cons:
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    sol = affine_solve(cons, n)
    assert sol is not None
    return [list(k) for k in sol.kernel]


def stab_torus_components(f: AF) -> list[frozenset]:
    """Index sets of the components of the connected torus stabilizer.

    Indices i and j are in one component when every weight vector of the
    stabilizer takes the same value at i and j.
    """
    n = f.n
    weights = stab_torus_weights(f)
    classes: dict[tuple, list[int]] = {}
    for i in range(n):
        sig = tuple(w[i] for w in weights)
        classes.setdefault(sig, []).append(i + 1)
    return sorted((frozenset(c) for c in classes.values()), key=min)
