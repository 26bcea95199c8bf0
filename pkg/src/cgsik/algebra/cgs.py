"""Comprehensive Groebner systems by leading-coefficient case splitting.

Parametric polynomials live in one ring holding both the main variables and
the parameters, under a block order that eliminates the main block.  The
splitting follows Kapur, Sun and Wang: compute a reduced basis ``G`` of
``F ∪ E``, keep the minimal Dickson subset of ``G`` outside ``Q[params]``,
emit the segment where the product of its leading coefficients is nonzero,
then recurse with each leading coefficient added to the equations.

Segment constraints are polynomials in the parameters only and are tested
exactly at rational parameter points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from math import gcd
from typing import Mapping, Sequence

from .groebner import DEFAULT_CAPS, GroebnerBasis, ResourceCaps, ResourceLimitExceeded, buchberger, reduce
from .poly import MonomialOrder, Poly, block, grevlex, lex, monomial_divides
from .ratfunc import DegeneratePointError

_RABINOWITSCH = "_r"


def _common_denominator(values: list) -> int:
    den = 1
    for v in values:
        d = v.denominator
        den = den * d // gcd(den, d)
    return den


def _horner(terms: list, j: int, n: int):
    """Nested Horner form of integer terms ``(exponents, coeff)`` from
    variable ``j`` on: an int, or ``(j, ((exp, child), ...))`` with
    exponents descending."""
    if j == n:
        return sum(c for _, c in terms)
    by: dict = {}
    for h, c in terms:
        by.setdefault(h[j], []).append((h, c))
    if len(by) == 1 and 0 in by:
        return _horner(terms, j + 1, n)
    return (j, tuple((e, _horner(by[e], j + 1, n)) for e in sorted(by, reverse=True)))


def _emit_horner(node, lines: list, names) -> str:
    if node.__class__ is int:
        return repr(node)
    j, items = node
    t = f"t{next(names)}"
    prev = None
    for e, child in items:
        v = _emit_horner(child, lines, names)
        lines.append(f"{t} = {v}" if prev is None else f"{t} = {t} * P{j}[{prev - e}] + {v}")
        prev = e
    if prev:
        lines.append(f"{t} = {t} * P{j}[{prev}]")
    return t


def _compile_horner(trees: list, nvars: int):
    """A function of the power tables ``P0..P{nvars-1}`` returning the values
    of ``trees`` as a tuple.  Straight-line code avoids one Python call per
    Horner node, which dominates the evaluation cost otherwise."""
    lines: list = []
    names = iter(range(1 << 30))
    outs = [_emit_horner(t, lines, names) for t in trees]
    args = ", ".join(f"P{j}" for j in range(nvars))
    body = "\n".join("    " + ln for ln in lines) or "    pass"
    src = f"def _f({args}):\n{body}\n    return ({', '.join(outs)},)\n"
    scope: dict = {}
    exec(compile(src, "<segment-evaluator>", "exec"), scope)
    return scope["_f"]


class _IntEvaluator:
    """Polynomial split into main monomials with integer parameter polynomials,
    evaluated exactly with integer arithmetic at parameter values ``ints / den``."""

    __slots__ = ("monomials", "trees", "degree", "nvars", "_fn")

    def __init__(self, p: Poly, split: int):
        den = 1
        for c in p.terms.values():
            den = den * c.denominator // gcd(den, c.denominator)
        deg = max(sum(e[split:]) for e in p.terms)
        groups: dict = {}
        for e, c in p.terms.items():
            pe = e[split:]
            # homogenized: the last slot is the power of the common denominator
            groups.setdefault(e[:split], []).append((pe + (deg - sum(pe),), int(c * den)))
        self.nvars = len(p.order.variables) - split + 1
        self.monomials = tuple(groups)
        self.trees = [_horner(groups[m], 0, self.nvars) for m in self.monomials]
        self.degree = deg
        self._fn = None

    def evaluate(self, ints: list, den: int, cache: dict) -> dict:
        """Main monomial -> value times ``den**degree`` (an integer, up to the
        constant coefficient denominator).  ``cache`` holds power tables for
        one parameter point and may be shared between evaluators."""
        if self._fn is None:
            self._fn = _compile_horner(self.trees, self.nvars)
        D = self.degree
        pows = cache.get("pows")
        if pows is None or len(pows[0]) <= D:
            pows = []
            for x in list(ints) + [den]:
                row = [1]
                for _ in range(max(D, 16)):
                    row.append(row[-1] * x)
                pows.append(row)
            cache["pows"] = pows
        vals = self._fn(*pows)
        return {m: v for m, v in zip(self.monomials, vals) if v}


def _main_part(exp: tuple, split: int) -> tuple:
    return exp[:split]


def _is_param_only(p: Poly, split: int) -> bool:
    return all(not any(e[:split]) for e in p.terms)


def main_leading(p: Poly, split: int) -> tuple:
    """Leading main monomial and its coefficient as a polynomial in the same ring."""
    lm = max((_main_part(e, split) for e in p.terms), key=lambda m: m)
    coeff = {}
    for e, c in p.terms.items():
        if e[:split] == lm:
            coeff[(0,) * split + e[split:]] = c
    return lm, Poly(p.order, coeff)


def _minimal_dickson(polys: list, split: int) -> list:
    """Elements whose main leading monomial is not a proper multiple of
    another's; among equal leading monomials keep the smallest coefficient."""
    heads = []
    for p in polys:
        lm, lc = main_leading(p, split)
        heads.append((lm, lc, p))
    heads.sort(key=lambda t: (t[0], t[1].total_degree(), len(t[1]), len(t[2])))
    kept = []
    for lm, lc, p in heads:
        if any(monomial_divides(k[0], lm) for k in kept):
            continue
        kept.append((lm, lc, p))
    return kept


@dataclass(frozen=True)
class CgsSegment:
    """One cell of a comprehensive Groebner system.

    ``equations`` and ``inequations`` are polynomials in the parameters
    (embedded in the full ring); on points where every equation vanishes and
    no inequation does, specializing ``basis`` gives a Groebner basis of the
    specialized ideal.
    """

    equations: tuple
    inequations: tuple
    basis: tuple
    order: MonomialOrder

    @property
    def split(self) -> int:
        return self.order.split

    @property
    def main(self) -> tuple:
        return self.order.variables[: self.split]

    @property
    def params(self) -> tuple:
        return self.order.variables[self.split :]

    def is_unit(self) -> bool:
        return any(g.is_constant() for g in self.basis)

    def _values(self, point: Mapping) -> dict:
        full = {v: Fraction(point[v]) for v in self.params}
        full.update({v: Fraction(0) for v in self.main})
        return full

    @cached_property
    def _compiled(self) -> tuple:
        split = self.split
        return (
            [_IntEvaluator(p, split) for p in self.equations],
            [_IntEvaluator(p, split) for p in self.inequations],
            [_IntEvaluator(p, split) for p in self.basis],
        )

    def _integral(self, point: Mapping) -> tuple:
        vals = [Fraction(point[v]) for v in self.params]
        den = _common_denominator(vals)
        return [int(v.numerator) * (den // int(v.denominator)) for v in vals], int(den)

    def contains(self, point: Mapping) -> bool:
        ints, den = self._integral(point)
        eqs, neqs, _ = self._compiled
        cache: dict = {}
        return all(not e.evaluate(ints, den, cache) for e in eqs) and all(
            n.evaluate(ints, den, cache) for n in neqs
        )

    def specialize(self, point: Mapping, check: bool = True) -> GroebnerBasis:
        """Specialized basis over Q in the main variables (lex order)."""
        pt = {v: Fraction(point[v]) for v in self.params}
        if check and not self.contains(pt):
            raise DegeneratePointError("parameter point lies outside the segment")
        ring = lex(*self.main)
        out = []
        # primitive integer coefficients instead of monic; rescaling by a
        # nonzero constant keeps the ideal and the leading terms
        ints, den = self._integral(pt)
        cache: dict = {}
        for ev in self._compiled[2]:
            vals = ev.evaluate(ints, den, cache)
            if vals:
                g = 0
                for c in vals.values():
                    g = gcd(g, c)
                out.append(Poly._raw(ring, {m: Fraction(c // g) for m, c in vals.items()}))
        return GroebnerBasis(tuple(out), ring, reduced=False)

    def as_dict(self) -> dict:
        from .poly import format_poly

        return {
            "equations": [format_poly(p) for p in self.equations],
            "inequations": [format_poly(p) for p in self.inequations],
            "basis": [format_poly(p) for p in self.basis],
        }

    @classmethod
    def from_dict(cls, data: Mapping, order: MonomialOrder) -> "CgsSegment":
        from .poly import parse_poly

        return cls(
            tuple(parse_poly(s, order) for s in data["equations"]),
            tuple(parse_poly(s, order) for s in data["inequations"]),
            tuple(parse_poly(s, order) for s in data["basis"]),
            order,
        )


def _param_ring(order: MonomialOrder) -> MonomialOrder:
    return grevlex(*order.variables[order.split :])


def _to_params(p: Poly, order: MonomialOrder) -> Poly:
    return p.reorder(_param_ring(order)) if p.order != _param_ring(order) else p


def branch_is_empty(equations: Sequence[Poly], inequations: Sequence[Poly], order: MonomialOrder,
                    caps: ResourceCaps = DEFAULT_CAPS) -> bool:
    """True when ``V(equations) \\ V(prod inequations)`` is empty over C.

    Tested by the Rabinowitsch trick: the set is empty iff
    ``1 ∈ <equations, 1 - r * prod(inequations)>``.
    """
    pr = _param_ring(order)
    ring = grevlex(_RABINOWITSCH, *pr.variables)
    h = Poly.constant(ring, 1)
    for n in inequations:
        h = h * _to_params(n, order).reorder(ring)
    if not equations:
        return h.is_zero()
    eqs = [_to_params(e, order).reorder(ring) for e in equations]
    r = Poly.var(ring, _RABINOWITSCH)
    gb = buchberger(eqs + [1 - r * h], ring, caps)
    return gb.is_unit()


@dataclass
class _Budget:
    max_segments: int
    count: int = 0
    stack: list = field(default_factory=list)


def _embed(p: Poly, order: MonomialOrder) -> Poly:
    return p if p.order == order else p.reorder(order)


def cgs(gens: Sequence[Poly], params: Sequence[str], order: MonomialOrder | None = None,
        equations: Sequence[Poly] = (), inequations: Sequence[Poly] = (),
        caps: ResourceCaps = DEFAULT_CAPS, max_segments: int = 200) -> list:
    """Comprehensive Groebner system of ``gens`` with the given parameters.

    ``order`` must be a block order whose trailing block is exactly
    ``params``; it defaults to lex on the main variables and grevlex on the
    parameters.  Optional initial ``equations``/``inequations`` restrict the
    parameter space being covered.  Raises :class:`ResourceLimitExceeded` when
    any Groebner computation hits ``caps`` or more than ``max_segments``
    segments would be produced.
    """
    gens = list(gens)
    if not gens:
        raise ValueError("cgs needs at least one generator")
    params = tuple(params)
    if order is None:
        main = tuple(v for v in gens[0].order.variables if v not in params)
        order = block(main, params)
    if order.kind != "block" or order.variables[order.split :] != params:
        raise ValueError("cgs needs a block order ending with the parameter block")
    F = [_embed(g, order) for g in gens]
    E = [_embed(e, order) for e in equations]
    N = [_embed(n, order) for n in inequations]
    budget = _Budget(max_segments)
    out: list = []
    _cgs_main(E, N, F, order, caps, budget, out)
    return out


def _product(polys: Sequence[Poly], order: MonomialOrder) -> Poly:
    h = Poly.constant(order, 1)
    for p in polys:
        h = h * p
    return h


def _cgs_main(E: list, N: list, F: list, order, caps, budget: _Budget, out: list) -> None:
    split = order.split
    if branch_is_empty(E, N, order, caps):
        return
    G = list(buchberger(F + E, order, caps))
    if any(g.is_constant() for g in G):
        _emit(out, budget, E, N, (Poly.constant(order, 1),), order)
        return
    GU = [g for g in G if _is_param_only(g, split)]
    GR = [g for g in G if not _is_param_only(g, split)]
    # off V(GU) the specialized ideal is the unit ideal
    fresh = [g for g in GU if not _in_ideal(g, E, order, caps)]
    for i, g in enumerate(fresh):
        eqs, neqs = E + fresh[:i], N + [g]
        if not branch_is_empty(eqs, neqs, order, caps):
            _emit(out, budget, eqs, neqs, (Poly.constant(order, 1),), order)
    if GU and branch_is_empty(GU, N, order, caps):
        return
    heads = _minimal_dickson(GR, split)
    lcs = []
    for _lm, lc, _p in heads:
        if lc.is_constant():
            continue
        lc = lc.primitive()
        if lc not in lcs:
            lcs.append(lc)
    basis = tuple(p for _lm, _lc, p in heads)
    Nh = N + lcs
    if not branch_is_empty(GU, Nh, order, caps):
        _emit(out, budget, GU, Nh, basis, order)
    for i, h in enumerate(lcs):
        _cgs_main(GU + [h], N + lcs[:i], G, order, caps, budget, out)


def _in_ideal(p: Poly, E: Sequence[Poly], order, caps) -> bool:
    if not E:
        return p.is_zero()
    return buchberger(list(E), order, caps).contains(p)


def _emit(out, budget, E, N, basis, order) -> None:
    budget.count += 1
    if budget.count > budget.max_segments:
        raise ResourceLimitExceeded(f"segment cap of {budget.max_segments} exceeded")
    eqs = tuple(sorted({e.primitive() for e in E}, key=str))
    neqs = tuple(sorted({n.primitive() for n in N if not n.is_constant()}, key=str))
    out.append(CgsSegment(eqs, neqs, tuple(basis), order))


def find_segment(segments: Sequence[CgsSegment], point: Mapping) -> CgsSegment | None:
    """The first segment whose constraints hold exactly at ``point``."""
    for s in segments:
        if s.contains(point):
            return s
    return None


def sample_segment_point(segment: CgsSegment, rng, tries: int = 200, span: int = 20):
    """A random rational parameter point on a segment, or ``None``.

    The equations are satisfied one at a time, most constrained first: all
    but one of an equation's parameters are drawn from small rationals and
    the last is solved for (a rational root).  Leftover parameters are drawn
    freely and the point is kept when the inequations hold too.  ``None``
    means no point was found, which is certain for segments without rational
    points and possible for high-degree ones.
    """
    eqs = [_to_param_lex(e, segment.order) for e in segment.equations]
    for _ in range(tries):
        pt = _draw_on_equations(eqs, rng, span)
        if pt is None:
            continue
        for v in segment.params:
            if v not in pt:
                pt[v] = _small_rational(rng, span)
        if segment.contains(pt):
            return pt
    return None


def _free_vars(p: Poly) -> list:
    return [v for v in p.order.variables if p.degree(v) > 0]


def _pick_target(p: Poly, used: list) -> str:
    linear = [v for v in used if p.degree(v) == 1]
    for v in linear:
        if p.coefficients_in(v)[1].is_constant():
            return v
    if linear:
        return linear[0]
    return min(used, key=p.degree)


def _draw_on_equations(eqs: list, rng, span: int) -> dict | None:
    pt: dict = {}
    while True:
        pending = []
        for e in eqs:
            r = e.subs(pt) if pt else e
            if r.is_zero():
                continue
            if r.is_constant():
                return None
            pending.append(r)
        if not pending:
            return pt
        e = min(pending, key=lambda p: (len(_free_vars(p)), p.total_degree()))
        used = _free_vars(e)
        target = _pick_target(e, used)
        for v in used:
            if v != target:
                pt[v] = _small_rational(rng, span)
        rest = e.subs(pt)
        val = _small_rational(rng, span) if rest.is_zero() else _solve_one(rest, target, rng)
        if val is None:
            return None
        pt[target] = val


def _small_rational(rng, span: int) -> Fraction:
    return Fraction(int(rng.integers(-span, span + 1)), int(rng.integers(1, 6)))


def _to_param_lex(p: Poly, order: MonomialOrder) -> Poly:
    return p.reorder(lex(*order.variables[order.split :]))


def _solve_one(p: Poly, var: str, rng=None) -> Fraction | None:
    """A rational root of a univariate polynomial in ``var`` (None if none found)."""
    if any(p.degree(v) > 0 for v in p.order.variables if v != var):
        return None
    coeffs = p.univariate_coeffs(var)
    if len(coeffs) == 2:
        return -coeffs[0] / coeffs[1]
    from .roots import rational_roots

    roots = rational_roots(coeffs)
    if not roots:
        return None
    return roots[int(rng.integers(len(roots)))] if rng is not None else roots[0]


def generic_segment(gens: Sequence[Poly], params: Sequence[str], order: MonomialOrder | None = None,
                    caps: ResourceCaps = DEFAULT_CAPS) -> CgsSegment:
    """Only the first (generic) segment of the system: no equations, the
    leading coefficients of the minimal Dickson basis as inequations."""
    gens = list(gens)
    params = tuple(params)
    if order is None:
        main = tuple(v for v in gens[0].order.variables if v not in params)
        order = block(main, params)
    F = [_embed(g, order) for g in gens]
    G = list(buchberger(F, order, caps))
    split = order.split
    GU = [g for g in G if _is_param_only(g, split)]
    if any(g.is_constant() for g in G):
        return CgsSegment((), (), (Poly.constant(order, 1),), order)
    heads = _minimal_dickson([g for g in G if not _is_param_only(g, split)], split)
    lcs = []
    for _lm, lc, _p in heads:
        if not lc.is_constant() and lc.primitive() not in lcs:
            lcs.append(lc.primitive())
    eqs = tuple(sorted({g.primitive() for g in GU}, key=str))
    return CgsSegment(eqs, tuple(sorted(lcs, key=str)), tuple(p for _l, _c, p in heads), order)
