"""Exact scalars: rationals and rational functions in formal parameters.

Rationals are :class:`fractions.Fraction` (or plain ``int``).  A value that
depends on a generic parameter is an element of a sympy rational function
field over QQ.  Zero tests on parametric values answer for a *generic*
parameter and are logged to the active :class:`ZeroTestLog`, so callers can
recover the finitely many special parameter values afterwards.
"""

from __future__ import annotations

import contextlib
from fractions import Fraction
from typing import Iterator, Union

from sympy import QQ, Poly, factor_list
from sympy.polys.fields import FracElement

Rational = Union[int, Fraction]
Scalar = Union[int, Fraction, FracElement]

PARAM_NAMES = ("t", "s", "u", "v", "w")
FIELD = QQ.frac_field(*PARAM_NAMES)
PARAMS = FIELD.gens
T = PARAMS[0]

_LOGS: list["ZeroTestLog"] = []


class ZeroTestLog:
    """Collects numerators of parametric values that were tested for zero."""

    def __init__(self) -> None:
        self.numerators: list = []

    def add(self, num) -> None:
        if num not in self.numerators:
            self.numerators.append(num)


@contextlib.contextmanager
def zero_test_log() -> Iterator[ZeroTestLog]:
    """Log every generic zero test made inside the ``with`` block."""
    log = ZeroTestLog()
    _LOGS.append(log)
    try:
        yield log
    finally:
        _LOGS.pop()


def forward(numerators) -> None:
    """Re-log numerators into the enclosing log, if any."""
    if _LOGS:
        for num in numerators:
            _LOGS[-1].add(num)


def is_param(x) -> bool:
    return isinstance(x, FracElement)


def simplify(x: Scalar) -> Scalar:
    """Return a parameter-free field element as a Fraction."""
    if isinstance(x, FracElement):
        if x.numer.is_ground and x.denom.is_ground:
            return Fraction(str(QQ.to_sympy(x.numer.LC))) / Fraction(str(QQ.to_sympy(x.denom.LC)))
        return x
    if isinstance(x, int):
        return Fraction(x)
    return x


def is_zero(x: Scalar) -> bool:
    """Exact zero test; parametric values are judged generically and logged."""
    if isinstance(x, FracElement):
        if not x.numer:
            return True
        if x.numer.is_ground:
            return False
        if _LOGS:
            _LOGS[-1].add(x.numer)
        return False
    return x == 0


def depends_on(x: Scalar, index: int) -> bool:
    return isinstance(x, FracElement) and (
        x.numer.degree(index) > 0 or x.denom.degree(index) > 0
    )


def substitute(x: Scalar, index: int, value: Scalar) -> Scalar:
    """Replace the parameter ``PARAMS[index]`` by ``value``."""
    if not isinstance(x, FracElement):
        return x
    if isinstance(value, Fraction):
        value = FIELD(value.numerator) / value.denominator
    num = x.numer.compose(x.numer.ring.gens[index], _as_poly_value(x.numer.ring, value))
    den = x.denom.compose(x.denom.ring.gens[index], _as_poly_value(x.denom.ring, value))
    return simplify(FIELD(num) / FIELD(den))


def _as_poly_value(ring, value):
    if isinstance(value, int):
        return ring(value)
    if isinstance(value, FracElement):
        if not value.denom.is_ground:
            raise NotImplementedError("substituting a non-polynomial rational function")
        return ring(value.numer) * ring(QQ.to_sympy(1 / value.denom.LC))
    return ring(QQ.convert(value))


def special_values(numerators, index: int) -> tuple[list[Scalar], list]:
    """Roots in ``PARAMS[index]`` of the logged numerators.

    Returns the distinct roots and the numerators that do not involve the
    parameter at all (these belong to an outer parameter).  Roots must be
    rational or linear in the parameter; anything else raises.
    """
    roots: list[Scalar] = []
    outer = []
    gen = PARAMS[index]
    for num in numerators:
        if num.degree(index) == 0:
            outer.append(num)
            continue
        expr = num.as_expr()
        free = [g for g in expr.free_symbols if str(g) != str(gen.as_expr())]
        if not free:
            _, factors = factor_list(Poly(expr, gen.as_expr()))
            for fac, _mult in factors:
                if fac.degree() == 1:
                    a, b = fac.all_coeffs()
                    r = Fraction(str(-b / a))
                    if r not in roots:
                        roots.append(r)
                elif fac.degree() > 1:
                    raise NotImplementedError(f"irrational special value from {fac}")
        else:
            if num.degree(index) != 1:
                raise NotImplementedError(f"nonlinear special locus {expr}")
            ring = num.ring
            coeff1 = FIELD(ring.zero)
            coeff0 = FIELD(ring.zero)
            for monom, c in num.terms():
                rest = list(monom)
                e = rest[index]
                rest[index] = 0
                term = FIELD(ring({tuple(rest): c}))
                if e == 1:
                    coeff1 += term
                else:
                    coeff0 += term
            r = simplify(-coeff0 / coeff1)
            if r not in roots:
                roots.append(r)
    return roots, outer


def fresh_param(x_values) -> int:
    """Index of the first parameter not occurring in any of the values."""
    used = set()
    for x in x_values:
        if isinstance(x, FracElement):
            for i in range(len(PARAMS)):
                if depends_on(x, i):
                    used.add(i)
    for i in range(len(PARAMS)):
        if i not in used:
            return i
    raise RuntimeError("parameter pool exhausted")


def to_str(x: Scalar) -> str:
    """Serialize a scalar: ``p/q`` for rationals, a sympy expression otherwise."""
    x = simplify(x)
    if isinstance(x, FracElement):
        return str(x.as_expr())
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse(text: Union[str, int, float]) -> Scalar:
    """Inverse of :func:`to_str`."""
    if isinstance(text, bool):
        raise ValueError("boolean is not a scalar")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise ValueError("floating point scalars are not accepted")
    try:
        return Fraction(text)
    except ValueError:
        pass
    from sympy import sympify

    expr = sympify(text, locals={name: s.as_expr() for name, s in zip(PARAM_NAMES, PARAMS)})
    return simplify(FIELD.from_sympy(expr))
