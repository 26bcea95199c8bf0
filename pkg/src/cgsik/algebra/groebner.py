"""Multivariate division and Buchberger's algorithm over the rationals.

The engine works on primitive integer polynomials (fraction-free reduction
with periodic content removal), which is considerably faster in pure Python
than Fraction arithmetic.  Rational functions in parameters are handled by the
caller by treating parameters as extra variables under a block order.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .poly import (
    MonomialOrder,
    Poly,
    RingMismatchError,
    monomial_divides,
    monomial_lcm,
    monomial_quotient,
)


class ResourceLimitExceeded(RuntimeError):
    """A Groebner computation hit its configured pair, degree or time cap."""


@dataclass(frozen=True)
class ResourceCaps:
    max_pairs: int = 20000
    max_degree: int = 60
    max_seconds: float | None = None


DEFAULT_CAPS = ResourceCaps()


@dataclass(frozen=True)
class GroebnerBasis:
    generators: tuple
    order: MonomialOrder
    reduced: bool = True

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)

    def __getitem__(self, i):
        return self.generators[i]

    def is_unit(self) -> bool:
        return any(g.is_constant() and not g.is_zero() for g in self.generators)

    def reduce(self, p: Poly) -> Poly:
        return normal_form(p, self.generators)

    def contains(self, p: Poly) -> bool:
        return normal_form(p, self.generators).is_zero()


# ---------------------------------------------------------------------------
# public division algorithm (exact field arithmetic, returns quotients)


def reduce(p: Poly, divisors: Sequence[Poly], order: MonomialOrder | None = None):
    """Multivariate division: ``p = sum(q_i * d_i) + r`` with no term of ``r``
    divisible by any leading term.  Returns ``(quotients, remainder)``."""
    order = order or p.order
    for d in divisors:
        if d.order != p.order:
            raise RingMismatchError("divisor ring differs from dividend ring")
    if p.order != order:
        raise RingMismatchError("order argument differs from the polynomials' order")
    divs = [(d.leading_monomial(), d.leading_coefficient(), d) for d in divisors if d]
    quotients = [dict() for _ in divisors]
    index_of = [i for i, d in enumerate(divisors) if d]
    key = order.key
    work = dict(p.terms)
    rem: dict = {}
    while work:
        m = max(work, key=key)
        c = work[m]
        for slot, (lm, lc, d) in enumerate(divs):
            if monomial_divides(lm, m):
                q = monomial_quotient(m, lm)
                f = c / lc
                qi = quotients[index_of[slot]]
                qi[q] = qi.get(q, 0) + f
                for e, dc in d.terms.items():
                    ne = tuple(a + b for a, b in zip(e, q))
                    v = work.get(ne, 0) - f * dc
                    if v:
                        work[ne] = v
                    else:
                        work.pop(ne, None)
                break
        else:
            rem[m] = c
            del work[m]
    return [Poly(p.order, q) for q in quotients], Poly(p.order, rem)


def normal_form(p: Poly, basis: Sequence[Poly]) -> Poly:
    return reduce(p, list(basis))[1]


def s_polynomial(f: Poly, g: Poly) -> Poly:
    lf, lg = f.leading_monomial(), g.leading_monomial()
    m = monomial_lcm(lf, lg)
    return (f.mul_term(monomial_quotient(m, lf), 1 / f.leading_coefficient())
            - g.mul_term(monomial_quotient(m, lg), 1 / g.leading_coefficient()))


def is_groebner(polys: Sequence[Poly]) -> bool:
    """Buchberger's criterion: every S-polynomial reduces to zero."""
    gs = [p for p in polys if p]
    for i in range(len(gs)):
        for j in range(i + 1, len(gs)):
            if normal_form(s_polynomial(gs[i], gs[j]), gs):
                return False
    return True


def same_ideal(a: Sequence[Poly], b: Sequence[Poly], order: MonomialOrder | None = None) -> bool:
    """True when ``a`` and ``b`` generate the same ideal."""
    ga = buchberger(a, order)
    gb = buchberger(b, order)
    return all(gb.contains(p) for p in ga) and all(ga.contains(p) for p in gb)


# ---------------------------------------------------------------------------
# integer engine


def _to_int_terms(p: Poly) -> dict:
    den = 1
    for c in p.terms.values():
        d = c.denominator
        den = den * d // gcd(den, d)
    return {e: c.numerator * (den // c.denominator) for e, c in p.terms.items()}


def _content(*dicts) -> int:
    g = 0
    for d in dicts:
        for v in d.values():
            g = gcd(g, v)
            if g == 1:
                return 1
    return g


class _IPoly:
    __slots__ = ("lm", "lc", "terms", "deg")

    def __init__(self, lm, terms):
        self.lm = lm
        self.lc = terms[0][1]
        self.terms = terms  # list of (exp, coeff) in descending order
        self.deg = sum(lm)


class _Engine:
    def __init__(self, order: MonomialOrder, caps: ResourceCaps):
        self.order = order
        self.key = order.key
        self.caps = caps
        self._neg = {}
        self.t0 = time.perf_counter()

    def negkey(self, e):
        k = self._neg.get(e)
        if k is None:
            k = tuple(-x for x in self.key(e))
            self._neg[e] = k
        return k

    def make(self, terms: dict) -> _IPoly | None:
        if not terms:
            return None
        g = _content(terms)
        key = self.key
        items = sorted(terms.items(), key=lambda t: key(t[0]), reverse=True)
        if items[0][1] < 0:
            g = -g
        if g != 1:
            items = [(e, c // g) for e, c in items]
        return _IPoly(items[0][0], items)

    def check_time(self):
        ms = self.caps.max_seconds
        if ms is not None and time.perf_counter() - self.t0 > ms:
            raise ResourceLimitExceeded(f"time cap of {ms}s exceeded")

    def reduce(self, f: dict, basis: list, full: bool = True) -> dict:
        """Fraction-free normal form of ``f`` (dict exp->int) modulo ``basis``."""
        heap = [(self.negkey(e), e) for e in f]
        heapq.heapify(heap)
        rem: dict = {}
        steps = 0
        while heap:
            _, m = heapq.heappop(heap)
            c = f.get(m)
            if c is None:
                continue
            g = None
            for b in basis:
                lm = b.lm
                for x, y in zip(lm, m):
                    if x > y:
                        break
                else:
                    g = b
                    break
            if g is None:
                del f[m]
                rem[m] = c
                if not full:
                    for e, v in f.items():
                        rem[e] = v
                    return rem
                continue
            a = g.lc
            h = gcd(a, c)
            fa, fc = a // h, c // h
            if fa < 0:
                fa, fc = -fa, -fc
            if fa != 1:
                for e in f:
                    f[e] *= fa
                for e in rem:
                    rem[e] *= fa
            q = tuple(y - x for x, y in zip(g.lm, m))
            del f[m]
            for e, v in g.terms[1:]:
                ne = tuple(x + y for x, y in zip(e, q))
                old = f.get(ne)
                if old is None:
                    f[ne] = -fc * v
                    heapq.heappush(heap, (self.negkey(ne), ne))
                else:
                    nv = old - fc * v
                    if nv:
                        f[ne] = nv
                    else:
                        del f[ne]
            steps += 1
            if steps % 16 == 0:
                ct = _content(f, rem)
                if ct > 1:
                    for e in f:
                        f[e] //= ct
                    for e in rem:
                        rem[e] //= ct
                self.check_time()
        return rem

    def spoly(self, p: _IPoly, q: _IPoly) -> dict:
        L = monomial_lcm(p.lm, q.lm)
        mp = monomial_quotient(L, p.lm)
        mq = monomial_quotient(L, q.lm)
        h = gcd(p.lc, q.lc)
        ap, aq = q.lc // h, p.lc // h
        out: dict = {}
        for e, v in p.terms[1:]:
            ne = tuple(x + y for x, y in zip(e, mp))
            out[ne] = out.get(ne, 0) + ap * v
        for e, v in q.terms[1:]:
            ne = tuple(x + y for x, y in zip(e, mq))
            nv = out.get(ne, 0) - aq * v
            if nv:
                out[ne] = nv
            else:
                out.pop(ne, None)
        return out


def _gm_update(G: list, active: list, pairs: list, h_idx: int) -> tuple:
    """Gebauer-Moeller UPDATE: install ``G[h_idx]`` and prune pairs with
    Buchberger's first (coprime) and second (chain) criteria."""
    h = G[h_idx]
    lm_h = h.lm
    C = [(g, monomial_lcm(G[g].lm, lm_h)) for g in active]
    D = []
    while C:
        g1, L1 = C.pop(0)
        coprime = all(not (a and b) for a, b in zip(G[g1].lm, lm_h))
        if coprime or not any(
            monomial_divides(L2, L1) for _, L2 in C
        ) and not any(monomial_divides(L2, L1) for _, L2, _ in D):
            D.append((g1, L1, coprime))
    E = [(g, h_idx, L) for g, L, cp in D if not cp]
    kept = []
    for (i, j, L) in pairs:
        if (
            monomial_divides(lm_h, L)
            and monomial_lcm(G[i].lm, lm_h) != L
            and monomial_lcm(G[j].lm, lm_h) != L
        ):
            continue
        kept.append((i, j, L))
    new_active = [g for g in active if not monomial_divides(lm_h, G[g].lm)]
    new_active.append(h_idx)
    return new_active, kept + E


def _buchberger_int(polys: list, order: MonomialOrder, caps: ResourceCaps) -> list:
    eng = _Engine(order, caps)
    key = order.key
    G: list = []
    active: list = []
    pairs: list = []
    inputs = []
    for p in polys:
        ip = eng.make(_to_int_terms(p))
        if ip is not None:
            inputs.append(ip)
    inputs.sort(key=lambda ip: key(ip.lm))

    def install(terms) -> bool:
        nonlocal active, pairs
        new = eng.make(terms)
        if new is None:
            return False
        if new.deg == 0:
            G[:] = [new]
            return True
        if new.deg > caps.max_degree:
            raise ResourceLimitExceeded(
                f"degree cap of {caps.max_degree} exceeded (new element of degree {new.deg})"
            )
        G.append(new)
        active, pairs = _gm_update(G, active, pairs, len(G) - 1)
        return False

    for ip in inputs:
        r = eng.reduce(dict(ip.terms), [G[g] for g in active])
        if install(r):
            return G
    processed = 0
    while pairs:
        best = min(range(len(pairs)), key=lambda k: (key(pairs[k][2]), pairs[k][0], pairs[k][1]))
        i, j, _ = pairs.pop(best)
        processed += 1
        if processed > caps.max_pairs:
            raise ResourceLimitExceeded(f"S-pair cap of {caps.max_pairs} exceeded")
        eng.check_time()
        s = eng.spoly(G[i], G[j])
        if not s:
            continue
        r = eng.reduce(s, [G[g] for g in active])
        if install(r):
            return G
    return [G[g] for g in active]


def _interreduce(eng: _Engine, polys: list) -> list:
    """Minimal + reduced basis from a Groebner basis (integer primitive form)."""
    key = eng.key
    polys = sorted(polys, key=lambda p: key(p.lm))
    minimal = []
    for p in polys:
        if not any(monomial_divides(q.lm, p.lm) for q in minimal):
            minimal = [q for q in minimal if not monomial_divides(p.lm, q.lm)]
            minimal.append(p)
    out = []
    for idx, p in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1 :]
        # no other leading monomial divides lm(p), so the leading term survives
        out.append(eng.make(eng.reduce(dict(p.terms), others)))
    return sorted(out, key=lambda p: key(p.lm), reverse=True)


def _from_int(order: MonomialOrder, ip: _IPoly, monic: bool) -> Poly:
    if monic:
        lc = ip.lc
        return Poly._raw(order, {e: Fraction(c, lc) for e, c in ip.terms})
    return Poly._raw(order, {e: Fraction(c) for e, c in ip.terms})


def buchberger(
    gens: Sequence[Poly],
    order: MonomialOrder | None = None,
    caps: ResourceCaps = DEFAULT_CAPS,
    monic: bool = True,
) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by ``gens``.

    Raises :class:`ResourceLimitExceeded` when ``caps`` are exceeded; the
    computation is never silently truncated.
    """
    gens = [g for g in gens]
    if not gens:
        raise ValueError("buchberger needs at least one generator")
    order = order or gens[0].order
    for g in gens:
        if g.order != order:
            raise RingMismatchError("generators must share the requested ring and order")
    if all(g.is_zero() for g in gens):
        return GroebnerBasis((), order, True)
    eng = _Engine(order, caps)
    raw = _buchberger_int(gens, order, caps)
    red = _interreduce(eng, raw)
    return GroebnerBasis(tuple(_from_int(order, p, monic) for p in red), order, True)
