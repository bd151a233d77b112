"""Command line front end (``orbitree``).

Exit codes: 0 on success, 1 on a verification mismatch, 2 on bad input.
Input errors are reported as one JSON line on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import signal
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional, Sequence

from . import io
from .af import DomainError
from .partitions import jordan_type

DEFAULT_MAX_N = 32


class InputError(ValueError):
    pass


class InstanceTimeout(Exception):
    pass


def max_n() -> int:
    raw = os.environ.get("ORBITREE_MAX_N")
    if raw is None:
        return DEFAULT_MAX_N
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"ORBITREE_MAX_N is not an integer: {raw!r}") from None


def _check_size(n: int) -> None:
    if n > max_n():
        raise InputError(f"n={n} exceeds the size envelope {max_n()} (set ORBITREE_MAX_N)")


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _load_af(path: str):
    data = _load_json(path)
    if not isinstance(data, dict) or "n" not in data:
        raise InputError(f"{path}: not an AF object")
    _check_size(int(data["n"]))
    return io.af_from_json(data)


def _partition(text: str) -> list[int]:
    try:
        parts = [int(x) for x in text.replace("[", "").replace("]", "").split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a partition: {text!r}") from None
    if not parts or any(x <= 0 for x in parts):
        raise argparse.ArgumentTypeError(f"not a partition: {text!r}")
    return sorted(parts, reverse=True)


def _write(data: bytes, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(data.decode())
    else:
        with open(out, "wb") as fh:
            fh.write(data)


# ---------------------------------------------------------------- instances


def _alarm(_sig, _frame):
    raise InstanceTimeout()


def run_instance(which: str, params: dict, timeout_s: Optional[float], certified: bool) -> dict:
    """One verification instance; isolated so it can run in a worker process."""
    from .families import verify_theorem

    use_alarm = timeout_s is not None and hasattr(signal, "SIGALRM")
    if use_alarm:
        old = signal.signal(signal.SIGALRM, _alarm)
        signal.setitimer(signal.ITIMER_REAL, timeout_s)
    try:
        return verify_theorem(which, certified=certified, **params).as_json()
    except InstanceTimeout:
        return {"which": which, "params": params, "pass": False, "error": f"timeout after {timeout_s}s"}
    except (AssertionError, ValueError) as exc:
        return {"which": which, "params": params, "pass": False, "error": f"{type(exc).__name__}: {exc}"}
    finally:
        if use_alarm:
            signal.setitimer(signal.ITIMER_REAL, 0)
            signal.signal(signal.SIGALRM, old)


def _theorem_params(args) -> dict:
    w = args.which
    if w in ("thD1",):
        if None in (args.n, args.k, args.l):
            raise InputError("thD1 needs --n, --k and --l")
        return {"n": args.n, "k": args.k, "l": args.l}
    if w == "thD2":
        if None in (args.n, args.k):
            raise InputError("thD2 needs --n and --k")
        return {"n": args.n, "k": args.k}
    if None in (args.a, args.k):
        raise InputError(f"{w} needs --a and --k")
    return {"a": args.a, "k": args.k}


# ---------------------------------------------------------------- commands


def cmd_jordan(args) -> int:
    m = io.matrix_from_json(_load_json(args.matrix))
    _check_size(len(m))
    print(json.dumps({"jordan": list(jordan_type(m))}))
    return 0


def cmd_omega(args) -> int:
    from .canonical import guided_tree, omega_report

    f = _load_af(args.af)
    if args.strategy == "guided":
        rep = omega_report(f, "guided", tree=guided_tree(f, args.mode), mode=args.mode)
    else:
        rep = omega_report(f, mode=args.mode)
    _write(io.emit("json", rep), args.out)
    return 0


def cmd_tree(args) -> int:
    from .canonical import i_st, xi_st
    from .prime import radexpress
    from .steps import validate_tree

    f = _load_af(args.af)
    if args.kind == "xi-st":
        tree = xi_st(f, args.mode)
    elif args.kind == "i-st":
        tree = i_st(f)
    else:
        tree = radexpress(f)
    validate_tree(tree)
    if args.dot is None and args.json is None:
        _write(io.emit("json", tree), None)
    if args.dot is not None:
        _write(io.emit("dot", tree), args.dot)
    if args.json is not None:
        _write(io.emit("json", tree), args.json)
    return 0


def cmd_render(args) -> int:
    from .render import render

    f = _load_af(args.af)
    _write(io.emit(args.format, render(f)), args.out)
    return 0


def cmd_verify(args) -> int:
    params = _theorem_params(args)
    if "n" in params:
        _check_size((params["n"] - 1) * params["k"] + params.get("l", 1))
    rep = run_instance(args.which, params, args.timeout_s, args.certified)
    print(json.dumps(rep, sort_keys=True))
    return 0 if rep.get("pass") else 1


def cmd_verify_grid(args) -> int:
    from .families import acceptance_grid

    grid = acceptance_grid(args.which, min(args.max_N, max_n()))
    jobs = max(1, args.jobs)
    if jobs == 1:
        results = [run_instance(args.which, p, args.timeout_s, args.certified) for p in grid]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futs = [pool.submit(run_instance, args.which, p, args.timeout_s, args.certified) for p in grid]
            results = [fu.result() for fu in futs]
    ok = True
    for rep in results:
        ok = ok and bool(rep.get("pass"))
        print(json.dumps(rep, sort_keys=True))
    print(json.dumps({"which": args.which, "instances": len(results), "pass": ok}))
    return 0 if ok else 1


def cmd_build(args) -> int:
    from .families import build_embedj, build_fak, build_fnkl

    if args.family == "fnkl":
        if None in (args.n, args.k, args.l):
            raise InputError("fnkl needs --n, --k and --l")
        _check_size((args.n - 1) * args.k + args.l)
        spec = build_fnkl(args.n, args.k, args.l)
    else:
        if None in (args.a, args.k):
            raise InputError(f"{args.family} needs --a and --k")
        size = sum(args.a) * args.k if args.family == "fak" else sum(args.a) + args.k
        _check_size(size)
        spec = (build_fak if args.family == "fak" else build_embedj)(args.a, args.k)
    _write(io.emit("json", spec.af), args.out)
    return 0


# ---------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    """Usage errors become the same one-line diagnostic as input errors."""

    def error(self, message):
        sys.exit(_fail("usage", message))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="orbitree", description="Orbit computations for additive functionals.")
    p.add_argument("--seed", type=int, default=0, help="seed for any sampling (default 0)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("jordan", help="Jordan type of a nilpotent matrix")
    s.add_argument("matrix")
    s.set_defaults(func=cmd_jordan)

    s = sub.add_parser("omega", help="orbit report of an AF")
    s.add_argument("af")
    s.add_argument("--strategy", choices=["canonical", "guided"], default="canonical")
    s.add_argument("--mode", choices=["full", "critical"], default="full")
    s.add_argument("--out")
    s.set_defaults(func=cmd_omega)

    s = sub.add_parser("tree", help="build and validate a step tree")
    s.add_argument("kind", choices=["xi-st", "i-st", "radexpress"])
    s.add_argument("af")
    s.add_argument("--mode", choices=["full", "critical"], default="full")
    s.add_argument("--dot")
    s.add_argument("--json")
    s.set_defaults(func=cmd_tree)

    s = sub.add_parser("render", help="grid picture of an AF")
    s.add_argument("af")
    s.add_argument("--format", choices=["ascii", "svg", "json"], default="ascii")
    s.add_argument("--out")
    s.set_defaults(func=cmd_render)

    for name, func in (("verify", cmd_verify), ("verify-grid", cmd_verify_grid)):
        s = sub.add_parser(name, help="check the engine against a closed form")
        if name == "verify":
            s.add_argument("which", choices=["thD1", "thD2", "thD3a", "thD3b", "embedding"])
            s.add_argument("--n", type=int)
            s.add_argument("--k", type=int)
            s.add_argument("--l", type=int)
            s.add_argument("--a", type=_partition)
        else:
            s.add_argument("--which", required=True, choices=["thD1", "thD2", "thD3a", "thD3b", "embedding"])
            s.add_argument("--max-N", dest="max_N", type=int, default=16)
            s.add_argument("--jobs", type=int, default=1)
        s.add_argument("--certified", action="store_true", help="also build and validate the certified path")
        s.add_argument("--timeout-s", dest="timeout_s", type=float)
        s.set_defaults(func=func)

    s = sub.add_parser("build", help="emit a family AF as JSON")
    s.add_argument("family", choices=["fnkl", "fak", "embedJ"])
    s.add_argument("--n", type=int)
    s.add_argument("--k", type=int)
    s.add_argument("--l", type=int)
    s.add_argument("--a", type=_partition)
    s.add_argument("--out")
    s.set_defaults(func=cmd_build)
    return p


def _fail(kind: str, msg: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": msg}) + "\n")
    return 2


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    random.seed(args.seed)
    try:
        return args.func(args)
    except InputError as exc:
        return _fail("input", str(exc))
    except io.FormatError as exc:
        return _fail("format", str(exc))
    except DomainError as exc:
        return _fail("domain", str(exc))
    except (KeyError, TypeError, ValueError) as exc:
        return _fail("input", f"{type(exc).__name__}: {exc}")
