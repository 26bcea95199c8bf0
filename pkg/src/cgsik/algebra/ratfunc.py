"""Rational functions in parameters and polynomials with such coefficients.

A :class:`RationalFunction` is a reduced quotient of two polynomials over Q
in the parameter ring.  The denominator is kept primitive over Z with a
positive leading coefficient, so equal functions have equal representations.
The multivariate gcd needed for reduction is obtained from an ideal
intersection: ``lcm(a, b)`` generates ``<a> ∩ <b>`` and ``gcd = a*b / lcm``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .groebner import buchberger, reduce
from .poly import MonomialOrder, Poly, lex


class DegeneratePointError(ZeroDivisionError):
    """A coefficient denominator vanishes at the requested parameter point."""


_ELIM = "_t"


def _exact_quotient(a: Poly, b: Poly) -> Poly:
    (q,), r = reduce(a, [b])
    if r:
        raise ArithmeticError("polynomial division is not exact")
    return q


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic greatest common divisor of two polynomials in one ring."""
    if a.is_zero():
        return b.monic() if b else b
    if b.is_zero():
        return a.monic()
    if a.is_constant() or b.is_constant():
        return Poly.constant(a.order, 1)
    if not reduce(a, [b])[1]:
        return b.monic()
    if not reduce(b, [a])[1]:
        return a.monic()
    names = a.order.variables
    if _ELIM in names:
        raise ValueError(f"variable name {_ELIM!r} is reserved")
    ring = lex(_ELIM, *names)
    t = Poly.var(ring, _ELIM)
    A, B = a.reorder(ring), b.reorder(ring)
    gb = buchberger([t * A, (1 - t) * B], ring)
    free = [g for g in gb if g.degree(_ELIM) <= 0]
    if not free:
        raise ArithmeticError("ideal intersection produced no generator")
    lcm = min(free, key=lambda g: (g.total_degree(), len(g))).reorder(a.order)
    return _exact_quotient(a * b, lcm).monic()


def _normalize_den(num: Poly, den: Poly) -> tuple:
    """Scale so that ``den`` is primitive over Z with positive leading coefficient."""
    prim = den.primitive()
    scale = prim.leading_coefficient() / den.leading_coefficient()
    return num * scale, prim


class RationalFunction:
    """Immutable reduced quotient ``num / den`` of parameter polynomials."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, reduced: bool = False):
        if den is None:
            den = Poly.constant(num.order, 1)
        if den.order != num.order:
            raise ValueError("numerator and denominator must share a ring")
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            den = Poly.constant(num.order, 1)
        elif not reduced and not den.is_constant():
            g = poly_gcd(num, den)
            if not g.is_constant():
                num, den = _exact_quotient(num, g), _exact_quotient(den, g)
        self.num, self.den = _normalize_den(num, den)

    @property
    def order(self) -> MonomialOrder:
        return self.num.order

    @classmethod
    def constant(cls, order: MonomialOrder, c) -> "RationalFunction":
        return cls(Poly.constant(order, c))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def _lift(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Poly):
            return RationalFunction(other)
        return RationalFunction.constant(self.order, other)

    def __add__(self, other):
        o = self._lift(other)
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, reduced=True)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            other = self._lift(other)
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def evaluate(self, point: Mapping) -> Fraction:
        d = self.den.evaluate(point)
        if d == 0:
            raise DegeneratePointError(f"denominator {self.den} vanishes at the parameter point")
        return Fraction(self.num.evaluate(point)) / d

    def __str__(self):
        if self.den.is_constant():
            return str(self.num)
        return f"({self.num})/({self.den})"

    __repr__ = __str__


class ParametricPoly:
    """Polynomial in main variables with :class:`RationalFunction` coefficients."""

    __slots__ = ("order", "params", "terms")

    def __init__(self, order: MonomialOrder, params: MonomialOrder, terms: Mapping):
        self.order = order
        self.params = params
        self.terms = {tuple(e): c for e, c in terms.items() if not c.is_zero()}

    @classmethod
    def from_block(cls, p: Poly, main: tuple, main_order: MonomialOrder | None = None) -> "ParametricPoly":
        """Split a polynomial in main variables and parameters into main
        monomials with polynomial-in-parameter coefficients."""
        names = p.order.variables
        main = tuple(main)
        params = tuple(v for v in names if v not in main)
        mo = main_order or lex(*main)
        po = lex(*params)
        mi = [names.index(v) for v in main]
        pi = [names.index(v) for v in params]
        groups: dict = {}
        for e, c in p.terms.items():
            groups.setdefault(tuple(e[i] for i in mi), {})[tuple(e[i] for i in pi)] = c
        terms = {m: RationalFunction(Poly(po, t), reduced=True) for m, t in groups.items()}
        return cls(mo, po, terms)

    def leading_monomial(self) -> tuple:
        return max(self.terms, key=self.order.key)

    def leading_coefficient(self) -> RationalFunction:
        return self.terms[self.leading_monomial()]

    def monic(self) -> "ParametricPoly":
        lc = self.leading_coefficient()
        return ParametricPoly(self.order, self.params, {e: c / lc for e, c in self.terms.items()})

    def __str__(self):
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda t: self.order.key(t[0]), reverse=True):
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.order.variables, e) if k
            )
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts) or "0"


def specialize(p, point: Mapping, order: MonomialOrder | None = None) -> Poly:
    """Substitute parameter values, leaving a polynomial over Q in the main variables.

    ``p`` is either a :class:`ParametricPoly` or a :class:`Poly` whose ring
    contains the parameters as variables.  A vanishing coefficient denominator
    raises :class:`DegeneratePointError`.
    """
    if isinstance(p, ParametricPoly):
        missing = [v for v in p.params.variables if v not in point]
        if missing:
            raise KeyError(f"unassigned parameters: {missing}")
        out = {}
        for e, c in p.terms.items():
            v = c.evaluate(point)
            if v:
                out[e] = v
        return Poly(order or p.order, out)
    return p.subs(point, order)
