"""Sparse multivariate polynomials with an attached monomial order.

Monomials are dense exponent tuples indexed by the order's variable
precedence, so ``order.variables`` doubles as the ring's variable list.
Coefficients are :class:`fractions.Fraction` by default; any exact field
element supporting ``+ - * /`` and truthiness (e.g. a rational function)
works as well.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

Exp = tuple


class RingMismatchError(ValueError):
    """Operands live in different rings or carry different orders."""


def _lex_key(e):
    return e


def _grevlex_key(e):
    return (sum(e),) + tuple(-x for x in reversed(e))


@dataclass(frozen=True)
class MonomialOrder:
    """A monomial order over an ordered list of variables.

    ``kind`` is ``"lex"``, ``"grevlex"`` or ``"block"``.  A block order
    compares the first ``split`` variables lexicographically and breaks ties
    with grevlex on the remaining ones; it eliminates the leading block and is
    what the comprehensive Groebner system code uses (main variables first,
    parameters last).
    """

    kind: str
    variables: tuple
    split: int = 0
    key: Callable = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variables in monomial order")
        if self.kind == "lex":
            k = _lex_key
        elif self.kind == "grevlex":
            k = _grevlex_key
        elif self.kind == "block":
            s = self.split
            if not 0 <= s <= len(self.variables):
                raise ValueError("block split out of range")

            def k(e, s=s):
                return e[:s] + _grevlex_key(e[s:])
        else:
            raise ValueError(f"unknown monomial order {self.kind!r}")
        object.__setattr__(self, "key", k)

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        return self.variables.index(name)

    def restrict(self, names: Iterable[str]) -> "MonomialOrder":
        """Same kind of order over a sub-list of the variables (precedence kept)."""
        keep = set(names)
        vs = tuple(v for v in self.variables if v in keep)
        if self.kind == "block":
            main = tuple(v for v in self.variables[: self.split] if v in keep)
            if not main:
                return MonomialOrder("grevlex", vs)
            return MonomialOrder("block", vs, len(main))
        return MonomialOrder(self.kind, vs)


def lex(*names: str) -> MonomialOrder:
    return MonomialOrder("lex", names)


def grevlex(*names: str) -> MonomialOrder:
    return MonomialOrder("grevlex", names)


def block(main: Iterable[str], params: Iterable[str]) -> MonomialOrder:
    main = tuple(main)
    return MonomialOrder("block", main + tuple(params), len(main))


def _coerce(c):
    if isinstance(c, int):
        return Fraction(c)
    return c


def monomial_divides(a: Exp, b: Exp) -> bool:
    return all(x <= y for x, y in zip(a, b))


def monomial_lcm(a: Exp, b: Exp) -> Exp:
    return tuple(x if x > y else y for x, y in zip(a, b))


def monomial_quotient(b: Exp, a: Exp) -> Exp:
    return tuple(y - x for x, y in zip(a, b))


class Poly:
    """Immutable sparse polynomial; ``terms`` maps exponent tuples to coefficients."""

    __slots__ = ("order", "terms")

    def __init__(self, order: MonomialOrder, terms: Mapping | None = None):
        self.order = order
        clean = {}
        if terms:
            n = order.nvars
            for e, c in terms.items():
                if len(e) != n:
                    raise RingMismatchError("exponent length does not match ring")
                if c:
                    clean[tuple(e)] = _coerce(c)
        self.terms = clean

    # construction -------------------------------------------------------
    @classmethod
    def _raw(cls, order, terms):
        p = cls.__new__(cls)
        p.order = order
        p.terms = terms
        return p

    @classmethod
    def constant(cls, order: MonomialOrder, c) -> "Poly":
        return cls(order, {(0,) * order.nvars: c})

    @classmethod
    def var(cls, order: MonomialOrder, name: str) -> "Poly":
        e = [0] * order.nvars
        e[order.index(name)] = 1
        return cls._raw(order, {tuple(e): Fraction(1)})

    @classmethod
    def gens(cls, order: MonomialOrder) -> list:
        return [cls.var(order, v) for v in order.variables]

    @classmethod
    def parse(cls, text: str, order: MonomialOrder) -> "Poly":
        return parse_poly(text, order)

    # basic queries --------------------------------------------------------
    @property
    def ring(self) -> tuple:
        return self.order.variables

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def __len__(self):
        return len(self.terms)

    def sorted_terms(self) -> list:
        """Terms in strictly descending order."""
        k = self.order.key
        return sorted(self.terms.items(), key=lambda t: k(t[0]), reverse=True)

    def leading_monomial(self) -> Exp:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms, key=self.order.key)

    def leading_coefficient(self):
        return self.terms[self.leading_monomial()]

    def leading_term(self) -> "Poly":
        m = self.leading_monomial()
        return Poly._raw(self.order, {m: self.terms[m]})

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree(self, name: str) -> int:
        i = self.order.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def variables_used(self) -> tuple:
        used = [False] * self.order.nvars
        for e in self.terms:
            for i, x in enumerate(e):
                if x:
                    used[i] = True
        return tuple(v for v, u in zip(self.order.variables, used) if u)

    def coefficient(self, monomial: Exp):
        return self.terms.get(tuple(monomial), 0)

    # arithmetic -----------------------------------------------------------
    def _check(self, other: "Poly"):
        if self.order != other.order:
            raise RingMismatchError(
                f"ring mismatch: {self.order.variables}/{self.order.kind} vs "
                f"{other.order.variables}/{other.order.kind}"
            )

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        return Poly.constant(self.order, other)

    def __add__(self, other):
        other = self._lift(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            v = t.get(e)
            if v is None:
                t[e] = c
            else:
                v = v + c
                if v:
                    t[e] = v
                else:
                    del t[e]
        return Poly._raw(self.order, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.order, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            other = _coerce(other)
            if not other:
                return Poly._raw(self.order, {})
            return Poly._raw(self.order, {e: c * other for e, c in self.terms.items()})
        self._check(other)
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = t.get(e)
                t[e] = c1 * c2 if v is None else v + c1 * c2
        return Poly._raw(self.order, {e: c for e, c in t.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, Poly):
            raise TypeError("use reduce() or exact_divide() for polynomial division")
        scalar = _coerce(scalar)
        return Poly._raw(self.order, {e: c / scalar for e, c in self.terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = Poly.constant(self.order, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def mul_term(self, monomial: Exp, coeff) -> "Poly":
        return Poly._raw(
            self.order,
            {tuple(a + b for a, b in zip(e, monomial)): c * coeff for e, c in self.terms.items()},
        )

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.order == other.order and self.terms == other.terms
        if not self.terms:
            return other == 0
        return self.is_constant() and next(iter(self.terms.values())) == other

    def __hash__(self):
        return hash((self.order.variables, frozenset(self.terms.items())))

    def monic(self) -> "Poly":
        if not self.terms:
            return self
        return self / self.leading_coefficient()

    def primitive(self) -> "Poly":
        """Scale rational coefficients to coprime integers with positive leading coefficient."""
        if not self.terms:
            return self
        from math import gcd, lcm

        den = 1
        for c in self.terms.values():
            den = lcm(den, c.denominator)
        ints = {e: c.numerator * (den // c.denominator) for e, c in self.terms.items()}
        g = 0
        for v in ints.values():
            g = gcd(g, v)
        if ints[self.leading_monomial()] < 0:
            g = -g
        return Poly._raw(self.order, {e: Fraction(v // g) for e, v in ints.items()})

    # evaluation -----------------------------------------------------------
    def evaluate(self, point: Mapping):
        """Evaluate at a full assignment ``{name: value}``; returns a scalar."""
        vals = [point[v] for v in self.order.variables]
        total = 0
        for e, c in self.terms.items():
            t = c
            for v, k in zip(vals, e):
                if k:
                    t = t * v**k
            total = total + t
        return total

    def subs(self, point: Mapping, order: MonomialOrder | None = None) -> "Poly":
        """Substitute values for some variables; the result lives in the
        restricted ring (or in ``order`` when given)."""
        names = self.order.variables
        fixed = [i for i, v in enumerate(names) if v in point]
        free = [i for i, v in enumerate(names) if v not in point]
        if order is None:
            order = self.order.restrict(names[i] for i in free)
        pos = [order.index(names[i]) for i in free]
        vals = [point[names[i]] for i in fixed]
        powcache: list = [dict() for _ in fixed]
        t: dict = {}
        n = order.nvars
        for e, c in self.terms.items():
            v = c
            for j, i in enumerate(fixed):
                k = e[i]
                if k:
                    pw = powcache[j].get(k)
                    if pw is None:
                        pw = vals[j] ** k
                        powcache[j][k] = pw
                    v = v * pw
            ne = [0] * n
            for i, p in zip(free, pos):
                ne[p] = e[i]
            ne = tuple(ne)
            old = t.get(ne)
            t[ne] = v if old is None else old + v
        return Poly(order, {e: c for e, c in t.items() if c})

    def reorder(self, order: MonomialOrder) -> "Poly":
        """Re-embed into a ring whose variables include all used variables."""
        names = self.order.variables
        idx = []
        for i, v in enumerate(names):
            if v in order.variables:
                idx.append((i, order.index(v)))
        n = order.nvars
        t = {}
        for e, c in self.terms.items():
            ne = [0] * n
            for i, j in idx:
                ne[j] = e[i]
            for i, x in enumerate(e):
                if x and names[i] not in order.variables:
                    raise RingMismatchError(f"variable {names[i]} not in target ring")
            t[tuple(ne)] = c
        return Poly._raw(order, t)

    def derivative(self, name: str) -> "Poly":
        i = self.order.index(name)
        t = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                t[tuple(ne)] = c * e[i]
        return Poly._raw(self.order, t)

    def univariate_coeffs(self, name: str) -> list:
        """Dense ascending coefficient list when only ``name`` occurs."""
        i = self.order.index(name)
        out = [Fraction(0)] * (max(0, self.degree(name)) + 1)
        for e, c in self.terms.items():
            if any(x for j, x in enumerate(e) if j != i):
                raise ValueError("polynomial is not univariate in " + name)
            out[e[i]] = c
        return out

    def coefficients_in(self, name: str) -> dict:
        """Map degree-in-``name`` -> coefficient polynomial (same ring, ``name`` removed)."""
        i = self.order.index(name)
        groups: dict = {}
        for e, c in self.terms.items():
            k = e[i]
            ne = e[:i] + (0,) + e[i + 1 :]
            groups.setdefault(k, {})[ne] = c
        return {k: Poly._raw(self.order, t) for k, t in groups.items()}

    # text -----------------------------------------------------------------
    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)!r}, {self.order.kind}{self.order.variables})"


def _fmt_coeff(c) -> str:
    if isinstance(c, Fraction):
        return str(c)
    s = str(c)
    return f"({s})"


def format_poly(p: Poly) -> str:
    """Deterministic human-readable form, e.g. ``3/2*x^2*y - 1``."""
    if not p.terms:
        return "0"
    parts = []
    names = p.order.variables
    for idx, (e, c) in enumerate(p.sorted_terms()):
        mono = "*".join(
            (n if k == 1 else f"{n}^{k}") for n, k in zip(names, e) if k
        )
        neg = False
        if isinstance(c, Fraction) and c < 0:
            neg, c = True, -c
        cs = _fmt_coeff(c)
        if mono:
            body = mono if cs == "1" else f"{cs}*{mono}"
        else:
            body = cs
        if idx == 0:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts)


_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def parse_poly(text: str, order: MonomialOrder) -> Poly:
    """Parse sums/products/powers of variables and rational literals."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial near {text[pos:]!r}")
        num, name, op = m.groups()
        if num is not None:
            tokens.append(("num", Fraction(num)))
        elif name is not None:
            tokens.append(("var", name))
        else:
            tokens.append(("op", "^" if op == "**" else op))
        pos = m.end()
    tokens.append(("end", None))
    i = 0

    def peek():
        return tokens[i]

    def take():
        nonlocal i
        t = tokens[i]
        i += 1
        return t

    def expr():
        sign = 1
        if peek() == ("op", "-"):
            take()
            sign = -1
        elif peek() == ("op", "+"):
            take()
        acc = term() * sign
        while peek() in (("op", "+"), ("op", "-")):
            op = take()[1]
            t = term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term():
        acc = power()
        while peek() in (("op", "*"), ("op", "/")):
            op = take()[1]
            f = power()
            if op == "*":
                acc = acc * f
            else:
                if not f.is_constant() or f.is_zero():
                    raise ValueError("division only by nonzero constants")
                acc = acc / f.terms[(0,) * order.nvars]
        return acc

    def power():
        base = atom()
        if peek() == ("op", "^"):
            take()
            kind, val = take()
            if kind != "num" or val.denominator != 1:
                raise ValueError("exponent must be a non-negative integer")
            base = base ** int(val)
        return base

    def atom():
        kind, val = take()
        if kind == "num":
            return Poly.constant(order, val)
        if kind == "var":
            if val not in order.variables:
                raise ValueError(f"unknown variable {val!r}")
            return Poly.var(order, val)
        if (kind, val) == ("op", "("):
            e = expr()
            if take() != ("op", ")"):
                raise ValueError("unbalanced parentheses")
            return e
        if (kind, val) == ("op", "-"):
            return -atom()
        raise ValueError(f"unexpected token {val!r}")

    result = expr()
    if peek()[0] != "end":
        raise ValueError(f"trailing input in polynomial: {tokens[i:]}")
    return result
