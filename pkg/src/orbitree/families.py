"""Builders and closed forms for the composed AF families.

The families are all of the form ``j(K) ∘ FF``: FF is an AF on a parabolic
radical with descending Levi blocks whose nonzero values chain the blocks
together, and j transports an AF K of GL_n into the stabilizer of FF in the
Levi.  Every nonzero coefficient is 1.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from . import lie
from .af import AF, Group, compose, lower_right
from .scalars import is_zero
from .partitions import Partition, compare, minimal_elements, normalize, orbit_dim, partitions, transpose, truncate

ONE = Fraction(1)


@dataclass
class FamilySpec:
    variant: str
    params: dict
    af: AF
    ff: Optional[AF] = None  # outer factor on the parabolic radical
    inner: Optional[AF] = None  # K, the AF of GL_n transported by j
    jmap: Optional[Callable[[dict], dict]] = field(default=None, repr=False)
    blocks: tuple = ()

    @property
    def n_ambient(self) -> int:
        return self.af.n


# ---------------------------------------------------------------- basic AFs


def whittaker(n: int) -> AF:
    """W_n: the AF on U_n equal to 1 on every simple root."""
    pos = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    return AF.on_roots(n, pos, {(i, i + 1): ONE for i in range(1, n)})


def j_k(k: int, n: Optional[int] = None) -> AF:
    """J_k in GL_n: the first k-1 rows full, 1 on the simple roots there."""
    n = k if n is None else n
    pos = [(i, j) for i in range(1, k) for j in range(i + 1, n + 1)]
    return AF.on_roots(n, pos, {(i, i + 1): ONE for i in range(1, k)})


def block_starts(blocks: Sequence[int]) -> list[int]:
    out, s = [], 0
    for b in blocks:
        out.append(s)
        s += b
    return out


def radical_af(blocks: Sequence[int], ones: Sequence[tuple]) -> AF:
    dom = Group.radical(blocks)
    return AF(dom, {p: (ONE if p in set(ones) else 0) for p in dom.pivots})


# ---------------------------------------------------------------- FF_{n,k,l}


def fnkl_blocks(n: int, k: int, l: int) -> list[int]:
    return [n] * l + [n - 1] * (k - l)


def build_ff(n: int, k: int, l: int) -> AF:
    """Chain AF on the radical with l blocks of size n then k-l of size n-1.

    Equal adjacent blocks are matched row r to column r; from the last
    size-n block to the first size-(n-1) block rows 2..n go to columns
    1..n-1, so the first row of block l carries no value.
    """
    _check_nkl(n, k, l)
    blocks = fnkl_blocks(n, k, l)
    st = block_starts(blocks)
    ones = []
    for b in range(len(blocks) - 1):
        if blocks[b] == blocks[b + 1]:
            ones += [(st[b] + r, st[b + 1] + r) for r in range(1, blocks[b] + 1)]
        else:
            ones += [(st[b] + r, st[b + 1] + r - 1) for r in range(2, blocks[b] + 1)]
    return radical_af(blocks, ones)


def ff_embedding(n: int, k: int, l: int) -> Callable[[dict], dict]:
    """Inverse of the first-block projection of the Levi stabilizer of FF.

    e_ab goes to its copies in the size-n blocks plus, when a, b >= 2, the
    copies of e_{a-1,b-1} in the size-(n-1) blocks.
    """
    blocks = fnkl_blocks(n, k, l)
    st = block_starts(blocks)

    def jmap(x: dict) -> dict:
        out: dict = {}
        for (a, b), v in x.items():
            for blk, s in zip(blocks, st):
                if blk == n:
                    out[(s + a, s + b)] = out.get((s + a, s + b), 0) + v
                elif a >= 2 and b >= 2:
                    out[(s + a - 1, s + b - 1)] = out.get((s + a - 1, s + b - 1), 0) + v
        return {p: c for p, c in out.items() if c != 0}

    return jmap


def transport(jmap: Callable[[dict], dict], k_af: AF, n: int) -> AF:
    return k_af.transform(jmap, n)


def _check_nkl(n: int, k: int, l: int) -> None:
    if not (n >= 1 and k >= 2 and k >= l >= 1):
        raise ValueError(f"need n>=1, k>=2, k>=l>=1; got {(n, k, l)}")


def build_fnkl(n: int, k: int, l: int) -> FamilySpec:
    """F_{n,k,l} = j(W_n) ∘ FF_{n,k,l} in GL_N, N = (n-1)k + l."""
    _check_nkl(n, k, l)
    ff = build_ff(n, k, l)
    jm = ff_embedding(n, k, l)
    w = whittaker(n)
    big = ff.n
    f = compose(transport(jm, w, big), ff)
    return FamilySpec("fnkl", {"n": n, "k": k, "l": l}, f, ff, w, jm, tuple(fnkl_blocks(n, k, l)))


# ---------------------------------------------------------------- K_a, F_{a,k}


def k_blocks(a: Sequence[int]) -> list[int]:
    return sorted(transpose(normalize(a)))


def build_ka(a: Sequence[int]) -> AF:
    """K_a: radical with ascending blocks transpose(a); row r of a block
    matched to the r-th index of the next block."""
    blocks = k_blocks(a)
    st = block_starts(blocks)
    ones = []
    for b in range(len(blocks) - 1):
        ones += [(st[b] + r, st[b + 1] + r) for r in range(1, blocks[b] + 1)]
    return radical_af(blocks, ones)


def build_fak(a: Sequence[int], k: int) -> FamilySpec:
    """F_{a,k} = j(K_a) ∘ FF_{n,k,k} in GL_{nk}."""
    a = normalize(a)
    if k < 2 or not a:
        raise ValueError("need k >= 2 and a nonempty partition")
    n = sum(a)
    ff = build_ff(n, k, k)
    jm = ff_embedding(n, k, k)
    ka = build_ka(a)
    f = compose(transport(jm, ka, ff.n), ff)
    return FamilySpec("fak", {"a": list(a), "k": k}, f, ff, ka, jm, tuple(fnkl_blocks(n, k, k)))


# ---------------------------------------------------------------- embedding family


def build_embedj(a: Sequence[int], k: int) -> FamilySpec:
    """Lower-right copy of K_a (an AF of Prime_n[a]) composed with J_k in GL_{k+n}."""
    a = normalize(a)
    if k < 1 or not a:
        raise ValueError("need k >= 1 and a nonempty partition")
    n = sum(a)
    big = k + n
    fa = lower_right(build_ka(a), big)
    jk = j_k(k, big)
    f = compose(fa, jk)
    return FamilySpec("embedJ", {"a": list(a), "k": k}, f, jk, build_ka(a), None, tuple(k_blocks(a)))


def a_set(a: Sequence[int], k: int) -> set[Partition]:
    """{[k', a'_1, ...] : 0 <= a'_i <= a_i, k' = k + n - sum a'_i}."""
    a = normalize(a)
    n = sum(a)
    out: set[Partition] = set()

    def rec(i: int, chosen: list[int]) -> None:
        if i == len(a):
            out.add(normalize([k + n - sum(chosen)] + chosen))
            return
        for x in range(a[i] + 1):
            rec(i + 1, chosen + [x])

    rec(0, [])
    return out


def a_set_min(a: Sequence[int], k: int) -> Partition:
    mins = minimal_elements(a_set(a, k))
    if len(mins) != 1:
        raise ValueError(f"no unique minimum in A_(a,k): {sorted(mins)}")
    return next(iter(mins))


# ---------------------------------------------------------------- closed forms


def _rep(x: int, t: int) -> list[int]:
    return [x] * t


def _alt_tail(n: int, k: int) -> list[int]:
    """The repeated (k+2, k-2) segment closing on k-1 (n odd) or k+1, k-2 (n even)."""
    if n % 2:
        return [k + 2, k - 2] * ((n - 3) // 2) + [k - 1]
    return [k + 2, k - 2] * (n // 2 - 2) + [k + 1, k - 2]


def thd1_closed(n: int, k: int, l: int) -> set[Partition]:
    if not (n >= 2 and k >= 2 and l >= 2 and l <= k):
        raise ValueError(f"need n>=2, 2<=l<=k; got {(n, k, l)}")
    a = normalize([k + n - 1, l - 1] + _rep(k - 1, n - 2))
    if n == 2:
        return {a}
    out = {a}
    if l - n + 1 >= 0:
        out.add(normalize(_rep(k + 1, n - 1) + [l - n + 1]))
    if l != k:
        out.add(normalize([k + 2, l - 1] + _alt_tail(n, k)))
    if k - n - l + 3 >= 0:
        out.add(normalize([k + 2, l - 1] + _rep(k + 1, n - 3) + [k - n + 2]))
    return out


def thd2_closed(n: int, k: int) -> set[Partition]:
    if not (n >= 3 and k >= 2):
        raise ValueError(f"need n>=3, k>=2; got {(n, k)}")
    a = normalize([n + k - 1] + _rep(k - 1, n - 2))
    if k == 2:
        b = _rep(4, (n - 1) // 2) + [1] if n % 2 else _rep(4, (n - 2) // 2) + [3]
        return {a, normalize(b)}
    out = {a, normalize([k + 2] + _alt_tail(n, k))}
    if k - n + 2 >= 0:
        out.add(normalize([k + 2] + _rep(k + 1, n - 3) + [k - n + 2]))
    return out


def thd3_closed(a: Sequence[int], k: int) -> set[Partition]:
    a = normalize(a)
    n = sum(a)
    if not (n >= 1 and k >= 2):
        raise ValueError("need n>=1, k>=2")
    m = len(a)
    out = {normalize([k + x - 1 for x in a] + _rep(k - 1, n - m))}
    if k - a[0] + 1 >= 0:
        out.add(normalize(_rep(k + 1, n - m) + [k - x + 1 for x in a]))
    return out


def thd3_beta_closed(k: int, pairs: Sequence[tuple[int, int]]) -> set[Partition]:
    """The orbit [[k+1]^{n-m}, l_i - a_i + 1, ...] when every l_i - a_i + 1 >= 0."""
    n = sum(x for x, _ in pairs)
    m = len(pairs)
    tail = [li - ai + 1 for ai, li in pairs]
    if any(x < 0 for x in tail):
        return set()
    return {normalize(_rep(k + 1, n - m) + tail)}


# ---------------------------------------------------------------- verification


@dataclass
class VerifyReport:
    which: str
    params: dict
    expected: list
    computed: list
    passed: bool
    runtime_ms: int
    tree_digest: Optional[str] = None
    notes: dict = field(default_factory=dict)

    def as_json(self) -> dict:
        return {
            "which": self.which,
            "params": self.params,
            "expected": self.expected,
            "computed": self.computed,
            "pass": self.passed,
            "runtime_ms": self.runtime_ms,
            "tree_digest": self.tree_digest,
            **({"notes": self.notes} if self.notes else {}),
        }


def _sorted(s) -> list:
    return [list(a) for a in sorted(s, key=lambda a: [-x for x in a])]


def critical_report(f: AF):
    """omega_report in critical mode plus the dimension check on every class."""
    from .canonical import OrbitError, omega_report

    rep = omega_report(f, mode="critical")
    for a in rep.omega_fin:
        if orbit_dim(a) // 2 != f.dim:
            raise OrbitError(f"{a} in Ω_fin with orbit_dim/2 != dim D")
    return rep


def verify_theorem(which: str, certified: bool = False, **params) -> VerifyReport:
    """Engine Ω_fin against the closed form for one instance.

    With ``certified`` the family's certified path is built and validated
    first; a failure raises.
    """
    from .io import tree_digest

    t0 = time.perf_counter()
    notes: dict = {}
    if which == "thD1":
        spec = build_fnkl(params["n"], params["k"], params["l"])
        expected = thd1_closed(params["n"], params["k"], params["l"])
    elif which == "thD2":
        spec = build_fnkl(params["n"], params["k"], 1)
        expected = thd2_closed(params["n"], params["k"])
    elif which in ("thD3a", "thD3b"):
        a = normalize(params["a"])
        k = params["k"]
        spec = build_fak(a, k)
        expected = thd3_closed(a, k) if which == "thD3a" else thd3_beta_closed(k, [(x, k) for x in a])
    elif which == "embedding":
        return embedding_verify(params["a"], params["k"], certified)
    else:
        raise ValueError(f"unknown theorem {which!r}")
    if certified:
        notes["certified_stages"] = len(certify(spec).stages)
    rep = critical_report(spec.af)
    computed = set(rep.omega_fin)
    if which == "thD3b":
        computed = truncate(computed, params["k"] + 1)
    notes["dim"] = spec.af.dim
    ms = int((time.perf_counter() - t0) * 1000)
    return VerifyReport(
        which, params, _sorted(expected), _sorted(computed), computed == expected, ms, tree_digest(rep.tree), notes
    )


def embedding_verify(a: Sequence[int], k: int, certified: bool = False) -> VerifyReport:
    """Ω of K_a ∘' J_k against min A_(a,k); finiteness against max(a) <= k."""
    from .canonical import INFINITE, omega_report
    from .io import tree_digest

    t0 = time.perf_counter()
    a = normalize(a)
    spec = build_embedj(a, k)
    stages = len(certify(spec).stages) if certified else None
    rep = omega_report(spec.af, mode="full")
    expected = {a_set_min(a, k)}
    finite_claim = max(a) <= k
    b = next(iter(rep.omega)) if len(rep.omega) == 1 else None
    mult = rep.mult.get(b) if b is not None else None
    finite = mult is not None and mult != INFINITE
    cond_c = b == normalize([k] + list(a)) if b is not None else None
    ok = rep.omega == expected and finite == finite_claim
    notes = {
        "mult": mult,
        "finite_iff_max_le_k": finite == finite_claim,
        "condition_c": cond_c,
        "c_agrees_with_d": cond_c == finite_claim,
        "critical_dims": all(orbit_dim(x) // 2 == spec.af.dim for x in rep.omega_fin),
    }
    if stages is not None:
        notes["certified_stages"] = stages
    ms = int((time.perf_counter() - t0) * 1000)
    return VerifyReport("embedding", {"a": list(a), "k": k}, _sorted(expected), _sorted(rep.omega), ok, ms, tree_digest(rep.tree), notes)


def acceptance_grid(which: str, max_n: int = 16) -> list[dict]:
    """Parameter sets of the standard verification grids."""
    if which == "thD1":
        return [
            {"n": n, "k": k, "l": l}
            for n in (2, 3, 4)
            for k in range(2, 5)
            for l in range(2, k + 1)
            if (n - 1) * k + l <= max_n
        ]
    if which == "thD2":
        return [{"n": n, "k": k} for n, k in ((3, 2), (3, 3), (4, 2), (4, 3)) if (n - 1) * k + 1 <= max_n]
    if which in ("thD3a", "thD3b"):
        return [
            {"a": list(a), "k": k}
            for n in range(1, 5)
            for a in partitions(n)
            for k in (2, 3)
            if n * k <= max_n
        ]
    if which == "embedding":
        return [{"a": list(a), "k": k} for n in range(1, 5) for a in partitions(n) for k in (1, 2, 3) if n + k <= max_n]
    raise ValueError(which)


# ---------------------------------------------------------------- certificates


def certify(spec: FamilySpec):
    """A validated certified path ending at the family's AF."""
    from .bpaths import BPathError, brow_path, sgen_bpath

    if spec.variant in ("fnkl", "fak"):
        p = sgen_bpath(spec.inner, spec.ff, spec.jmap)
    else:
        p = brow_path(spec.af)
    if p.end != spec.af:
        raise BPathError("certified path ends elsewhere")
    return p


def seam_check(n: int, k: int) -> bool:
    """F_{n,k,1} equals the lower-right copy of F_{n-1,k,k} composed with J_2."""
    if n < 2:
        raise ValueError("need n >= 2")
    a = build_fnkl(n, k, 1).af
    b = compose(lower_right(build_fnkl(n - 1, k, k).af, a.n), j_k(2, a.n))
    return a == b


# ---------------------------------------------------------------- generator chains


def family_generators(spec: FamilySpec) -> list[Group]:
    """One-dimensional generators of the domain: radical roots of FF plus j of K's roots."""
    n = spec.af.n
    gens = [Group.roots(n, [p]) for p in sorted(spec.ff.domain.root_positions)]
    if spec.jmap is not None:
        for p in sorted(spec.inner.domain.root_positions):
            gens.append(Group.span(n, [spec.jmap({p: ONE})]))
    return gens


def _support(g: Group) -> set:
    return set(g.support)


def _hull(n: int, g: Group) -> Group:
    """Smallest root-generated group containing g."""
    return Group.roots(n, sorted(_support(g)))


def _bracket_group(n: int, a: Group, b: Group) -> Group:
    return Group.span(n, [lie.bracket(x, y) for x in a.basis for y in b.basis])


def chain_conditions(n: int, gens: Sequence[Group]) -> dict:
    """Conditions (i)-(iv) on a list of one-dimensional generators."""
    from .af import is_a2_1d

    out = {"i": True, "ii": True, "iii": True, "iv": True}
    seen: set = set()
    for g in gens:
        s = _support(g)
        if seen & s:
            out["iii"] = False
        seen |= s
        if any(i >= j for i, j in s):
            out["iv"] = False
    for a in gens:
        for b in gens:
            br = _bracket_group(n, a, b)
            hull_br = _bracket_group(n, _hull(n, a), _hull(n, b))
            if not is_a2_1d(br) or _hull(n, br) != hull_br:
                out["i"] = False
            if br.dim == 0:
                continue
            sup = _support(hull_br)
            s3 = [g for g in gens if _support(g) & sup]
            ok = set().union(*(_support(g) for g in s3)) == sup
            ok = ok and all(_bracket_group(n, x, y).dim == 0 for x in s3 for y in s3)
            ok = ok and Group.span(n, [v for g in s3 for v in g.basis]).contains_group(br)
            if not ok:
                out["ii"] = False
    return out


def eu_chain_lemma_check(gens: Sequence[Group], f: AF) -> dict:
    """First exchange of I^st(f) on a domain generated by one-dimensional groups.

    Checks coverage of entries, the predicted generators of the new domain and
    that the hypotheses persist.  Raises ValueError when a hypothesis fails.
    """
    from .canonical import i_st, window

    n = f.n
    gens = list(gens)
    pre = chain_conditions(n, gens)
    if not all(pre.values()):
        raise ValueError(f"hypothesis failure: {pre}")
    if Group.generated(n, [v for g in gens for v in g.basis]) != f.domain:
        raise ValueError("generators do not generate the domain")
    if window(f) != 1:
        raise ValueError("the first row is already peeled off")
    p = i_st(f)
    if p.step is None or p.step.kind != "eu":
        raise ValueError("I^st does not start with an exchange")
    roots = f.domain.root_positions
    l1 = max(j for j in range(2, n + 1) if (1, j) in roots and not is_zero(f.evaluate(lie.unit(1, j))))
    sup_all = set().union(*(_support(g) for g in gens))
    k = max(i for i in range(1, l1) if (i, l1) in f.domain.support)
    out: dict = {"k": k, "l1": l1}
    out["I"] = f.domain.support <= sup_all
    y = next(g for g in gens if (k, l1) in _support(g))
    new = [g for g in gens if g is not y]
    x = Group.roots(n, [(1, k)])
    if (1, k) in f.domain.support:
        vk = next(g for g in gens if (1, k) in _support(g))
        new = [g for g in new if g is not vk]
        rest = {q: c for q, c in vk.basis[0].items() if q != (1, k)}
        if rest:
            new.append(Group.span(n, [rest]))
    new.append(x)
    out["x_matches"] = p.step.x == x
    fp = p.children[0].af
    out["II"] = Group.generated(n, [v for g in new for v in g.basis]) == fp.domain
    post = chain_conditions(n, new)
    out["III"] = all(post.values())
    out["passed"] = out["I"] and out["II"] and out["III"] and out["x_matches"]
    return out
