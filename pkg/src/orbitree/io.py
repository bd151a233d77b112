"""JSON and DOT serialization of AFs, trees and reports.

All output is deterministic: keys and sequences are emitted in a fixed
order and nothing depends on object identity or time.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

from .af import AF, Group
from .linalg import Mat
from .scalars import parse, to_str
from .steps import Marker, Node, Step, TermFamily


class FormatError(ValueError):
    """Unsupported payload/format combination or malformed input."""


# ---------------------------------------------------------------- vectors


def vec_to_json(v: dict) -> list:
    return [[i, j, to_str(c)] for (i, j), c in sorted(v.items())]


def vec_from_json(data: list) -> dict:
    out = {}
    for item in data:
        if len(item) != 3:
            raise FormatError(f"bad matrix entry {item!r}")
        i, j, c = item
        out[(int(i), int(j))] = parse(c)
    return out


def group_to_json(g: Group) -> dict:
    return {"n": g.n, "basis": [vec_to_json(b) for b in g.basis]}


def group_from_json(data: dict) -> Group:
    return Group.span(int(data["n"]), [vec_from_json(b) for b in data["basis"]])


# ---------------------------------------------------------------- AFs


def af_to_json(f: AF) -> dict:
    return {"n": f.n, "pairs": [{"vector": vec_to_json(b), "value": to_str(v)} for b, v in f.pairs()]}


def af_from_json(data: dict) -> AF:
    """Accepts ``pairs`` (general domain) or ``roots`` + ``values`` shorthand."""
    try:
        n = int(data["n"])
        if "pairs" in data:
            pairs = [(vec_from_json(p["vector"]), parse(p["value"])) for p in data["pairs"]]
            f = AF.from_pairs(n, pairs)
        else:
            roots = [tuple(r) for r in data["roots"]]
            values = {(int(i), int(j)): parse(c) for i, j, c in data.get("values", [])}
            f = AF.on_roots(n, roots, values)
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed AF: {exc}") from None
    f.check()
    return f


def matrix_from_json(data) -> Mat:
    rows = data["matrix"] if isinstance(data, dict) else data
    m = [[parse(x) for x in row] for row in rows]
    if any(len(r) != len(m) for r in m):
        raise FormatError("matrix is not square")
    return m


# ---------------------------------------------------------------- trees


def step_to_json(s: Step) -> dict:
    out: dict[str, Any] = {"kind": s.kind}
    if s.note:
        out["note"] = s.note
    if s.vector is not None:
        out["vector"] = vec_to_json(s.vector)
    for name in ("x", "y", "c"):
        g = getattr(s, name)
        if g is not None:
            out[name] = group_to_json(g)
    if s.g is not None:
        out["g"] = vec_to_json(s.g)
        out["ginv"] = vec_to_json(s.ginv)
    return out


def step_from_json(d: dict) -> Step:
    grp = lambda k: group_from_json(d[k]) if k in d else None  # noqa: E731
    return Step(
        d["kind"],
        vector=vec_from_json(d["vector"]) if "vector" in d else None,
        x=grp("x"),
        y=grp("y"),
        c=grp("c"),
        g=vec_from_json(d["g"]) if "g" in d else None,
        ginv=vec_from_json(d["ginv"]) if "ginv" in d else None,
        note=d.get("note", ""),
    )


def family_to_json(fam: TermFamily) -> dict:
    out: dict[str, Any] = {"af": af_to_json(fam.rep), "marker": fam.marker.value}
    if fam.param is not None:
        out["param"] = fam.param
    if fam.witness is not None:
        w = fam.witness
        wj: dict[str, Any] = {"kind": w["kind"], "vector": vec_to_json(w["vector"])}
        if w["kind"] == "torus":
            wj["weights"] = [to_str(x) for x in w["weights"]]
        else:
            wj["root"] = list(w["root"])
        out["witness"] = wj
    return out


def family_from_json(d: dict) -> TermFamily:
    w = d.get("witness")
    witness = None
    if w is not None:
        witness = {"kind": w["kind"], "vector": vec_from_json(w["vector"])}
        if w["kind"] == "torus":
            witness["weights"] = [parse(x) for x in w["weights"]]
        else:
            witness["root"] = tuple(w["root"])
    return TermFamily(af_from_json(d["af"]), Marker(d["marker"]), d.get("param"), witness)


def tree_to_json(node: Node) -> dict:
    out: dict[str, Any] = {"family": family_to_json(node.family)}
    if node.step is not None:
        out["step"] = step_to_json(node.step)
        out["children"] = [tree_to_json(c) for c in node.children]
    if node.pruned:
        out["pruned"] = True
    if node.orbit is not None:
        out["orbit"] = list(node.orbit)
    return out


def tree_from_json(d: dict) -> Node:
    return Node(
        family_from_json(d["family"]),
        step_from_json(d["step"]) if "step" in d else None,
        tuple(tree_from_json(c) for c in d.get("children", ())),
        bool(d.get("pruned", False)),
        tuple(d["orbit"]) if "orbit" in d else None,
    )


def tree_digest(node: Node) -> str:
    """SHA-256 over the tree structure; shared subtrees are hashed once."""
    memo: dict[int, str] = {}

    def go(nd: Node) -> str:
        key = id(nd)
        if key in memo:
            return memo[key]
        head = {"family": family_to_json(nd.family), "pruned": nd.pruned, "orbit": nd.orbit}
        if nd.step is not None:
            head["step"] = step_to_json(nd.step)
        head["children"] = [go(c) for c in nd.children]
        h = hashlib.sha256(json.dumps(head, sort_keys=True).encode()).hexdigest()
        memo[key] = h
        return h

    return go(node)


# ---------------------------------------------------------------- DOT


def _short(f: AF) -> str:
    nz = [f"{i}{j}:{to_str(v)}" for (i, j), v in sorted(f.values.items()) if to_str(v) != "0"]
    return f"n={f.n} dim={f.dim}" + (" | " + " ".join(nz) if nz else "")


def tree_to_dot(node: Node, max_nodes: int = 5000) -> str:
    lines = ["digraph tree {", "  node [shape=box, fontname=monospace];"]
    count = [0]

    def go(nd: Node) -> str:
        if count[0] >= max_nodes:
            raise FormatError(f"tree has more than {max_nodes} vertices")
        name = f"v{count[0]}"
        count[0] += 1
        label = _short(nd.label)
        if nd.family.marker != Marker.SINGLE:
            label = f"[{nd.family.marker.value}] " + label
        if nd.orbit is not None:
            label += " | class " + ",".join(map(str, nd.orbit))
        if nd.pruned:
            label += " | pruned"
        lines.append(f'  {name} [label="{label}"];')
        for ch in nd.children:
            cname = go(ch)
            edge = nd.step.kind + (f" ({nd.step.note})" if nd.step.note else "")
            lines.append(f'  {name} -> {cname} [label="{edge}"];')
        return name

    go(node)
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- emit


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def emit(fmt: str, payload) -> bytes:
    """Serialize a payload; raises FormatError on unsupported combinations."""
    from .canonical import OrbitReport
    from .render import PictureGrid, render, to_ascii, to_svg

    if fmt == "json":
        if isinstance(payload, AF):
            return dumps(af_to_json(payload)).encode()
        if isinstance(payload, Node):
            return dumps(tree_to_json(payload)).encode()
        if isinstance(payload, OrbitReport):
            return dumps(payload.as_json()).encode()
        if isinstance(payload, PictureGrid):
            return dumps(payload.as_json()).encode()
    elif fmt == "dot":
        if isinstance(payload, Node):
            return tree_to_dot(payload).encode()
    elif fmt in ("ascii", "svg"):
        if isinstance(payload, AF):
            payload = render(payload)
        if isinstance(payload, PictureGrid):
            return (to_ascii(payload) if fmt == "ascii" else to_svg(payload)).encode()
    raise FormatError(f"cannot emit {type(payload).__name__} as {fmt}")
