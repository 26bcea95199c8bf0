"""Real solutions of zero-dimensional systems from a lex Groebner basis.

Back-substitution runs from the lowest variable upwards.  At each level the
already-fixed coordinates are replaced by high-precision rational
approximations, the basis elements whose leading variable is the current one
become univariate, and the one of least degree with a non-vanishing leading
coefficient is solved by certified isolation.  The remaining elements of the
level act as a filter: a candidate survives only if they all vanish to within
the working precision.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

from .groebner import GroebnerBasis
from .roots import _cauchy_log2, _deriv, _dy, _isolate_positive, refine_dyadic, squarefree_decomposition


class PositiveDimensionalError(ValueError):
    """The ideal has infinitely many solutions; back-substitution is undefined."""


class RealSolutions(list):
    """List of real solution tuples ordered like ``variables``.

    ``inconsistent`` is set when the basis is the unit ideal.
    """

    def __init__(self, items=(), variables=(), inconsistent=False, fixed=(), bits=0):
        super().__init__(items)
        self.variables = tuple(variables)
        self.inconsistent = inconsistent
        self._fixed = list(fixed)
        self._bits = bits

    @property
    def exact(self) -> list:
        """The solutions as exact dyadic rationals (the fixed-point values)."""
        one = 1 << self._bits
        return [tuple(Fraction(v, one) for v in s) for s in self._fixed]

    def as_dicts(self) -> list:
        return [dict(zip(self.variables, s)) for s in self]


def leading_variable(exp: tuple) -> int:
    for i, e in enumerate(exp):
        if e:
            return i
    return -1


def is_zero_dimensional(basis) -> bool:
    """True when every variable has a pure power among the leading monomials."""
    gens = list(basis)
    if not gens:
        return False
    n = gens[0].order.nvars
    seen = set()
    for g in gens:
        lm = g.leading_monomial()
        nz = [i for i, e in enumerate(lm) if e]
        if len(nz) == 1:
            seen.add(nz[0])
        elif not nz:
            return True  # unit ideal
    return len(seen) == n


@lru_cache(maxsize=64)
def _bits(tol: float) -> int:
    """Smallest b with 2^-b <= tol."""
    t = Fraction(tol)
    b = 0
    while Fraction(1, 1 << b) > t:
        b += 1
    return b


def _div_round(a: int, b: int) -> int:
    """Nearest integer to a / b."""
    if b < 0:
        a, b = -a, -b
    return (2 * a + b) // (2 * b)


def _fixed_roots(coeffs: list, B: int) -> list:
    """Real roots of an integer polynomial (ascending) as integers scaled by 2^B."""
    if len(coeffs) == 2:
        return [_div_round(-coeffs[0] << B, coeffs[1])]
    if len(coeffs) == 3:
        c, b, a = coeffs
        disc = b * b - 4 * a * c
        if disc < 0:
            return []
        if disc == 0:
            return [_div_round(-b << B, 2 * a)]
        s = isqrt(disc << (2 * B))
        bs = b << B
        q = -(bs + s) if b >= 0 else -(bs - s)  # 2q, scaled
        return [_div_round(q, 2 * a), _div_round(c << (2 * B + 1), q)]
    out = []
    for factor, _mult in squarefree_decomposition(coeffs):
        p = factor
        if p[0] == 0:
            out.append(0)
            p = p[1:]
        if len(p) <= 1:
            continue
        if len(p) == 2:
            out.append(_div_round(-p[0] << B, p[1]))
            continue
        lb = _cauchy_log2(p)
        for sign in (1, -1):
            q = p if sign == 1 else [c if i % 2 == 0 else -c for i, c in enumerate(p)]
            for num, k, exact in _isolate_positive(q, lb):
                if exact:
                    r = round(_dy(num, k) * (1 << B))
                elif k <= B - 8:
                    r = _newton_fixed(q, num << (B - k), (num + 1) << (B - k), B)
                else:
                    lo, hi, kk = refine_dyadic(q, num, k, B + 2)
                    r = round(_dy(lo + hi, kk + 1) * (1 << B))
                out.append(sign * r)
    return out


def _eval_fixed(p: list, X: int, B: int) -> int:
    """p(X / 2^B) * 2^(B * deg p) exactly."""
    n = len(p) - 1
    acc = 0
    for i in range(n, -1, -1):
        acc = acc * X + (p[i] << (B * (n - i)))
    return acc


def _newton_fixed(p: list, lo: int, hi: int, B: int) -> int:
    """The simple root of ``p`` isolated in the open interval (lo, hi)
    (fixed point, scale 2^B), to within one unit.  Newton steps that leave
    the bracket are replaced by bisection."""
    dp = _deriv(p)
    s_lo = _eval_fixed(p, lo, B)
    s_lo = (s_lo > 0) - (s_lo < 0)
    if s_lo == 0:
        # a root on the endpoint belongs to the neighbouring interval
        d = _eval_fixed(dp, lo, B)
        s_lo = (d > 0) - (d < 0)
    x = (lo + hi) >> 1
    while hi - lo > 2:
        v = _eval_fixed(p, x, B)
        if v == 0:
            return x
        if (v > 0) - (v < 0) == s_lo:
            lo = x
        else:
            hi = x
        d = _eval_fixed(dp, x, B)
        if d:
            step = _div_round(v, d)
            if -1 <= step <= 1:
                return x - step
            nx = x - step
        else:
            nx = x
        if not lo < nx < hi:
            nx = (lo + hi) >> 1
        x = nx
    return (lo + hi) >> 1


def _int_terms(g) -> list:
    den = 1
    for c in g.terms.values():
        den = den * c.denominator // gcd(den, c.denominator)
    if den == 1:
        return [(e, c.numerator) for e, c in g.terms.items()]
    return [(e, c.numerator * (den // c.denominator)) for e, c in g.terms.items()]


class _Level:
    """Basis elements sharing one leading variable, as integer term lists."""

    __slots__ = ("var", "polys")

    def __init__(self, var):
        self.var = var
        self.polys = []  # (terms, max degree in the other variables)


def _univariate_at(terms: list, other_deg: int, var: int, point: dict, B: int, cache: dict) -> tuple:
    """Integer coefficients in ``var`` after substituting the fixed-point
    ``point`` (common scale 2^(B*other_deg)) and matching magnitude sums."""
    coeffs: dict = {}
    mags: dict = {}
    for e, c in terms:
        v = c
        d_other = 0
        for j, k in enumerate(e):
            if k and j != var:
                key = (j, k)
                pw = cache.get(key)
                if pw is None:
                    pw = point[j] ** k
                    cache[key] = pw
                v *= pw
                d_other += k
        if d_other < other_deg:
            v <<= B * (other_deg - d_other)
        d = e[var]
        coeffs[d] = coeffs.get(d, 0) + v
        mags[d] = mags.get(d, 0) + abs(v)
    deg = max(coeffs)
    return [coeffs.get(i, 0) for i in range(deg + 1)], [mags.get(i, 0) for i in range(deg + 1)]


def _residual_ok(coeffs: list, mags: list, r: int, B: int, guard: int) -> bool:
    """|p(r)| <= 2^-guard * (sum of |term| values) in fixed point."""
    n = len(coeffs) - 1
    val = 0
    scale = 0
    ar = abs(r)
    for i in range(n, -1, -1):
        val = val * r + (coeffs[i] << (B * (n - i)))
        scale = scale * ar + (mags[i] << (B * (n - i)))
    return scale == 0 or (abs(val) << guard) <= scale


def _significant(c: int, m: int, guard: int) -> bool:
    return m != 0 and (abs(c) << guard) > m


def solve_triangular(basis: GroebnerBasis, refine_to: float = 1e-12, precision_bits: int | None = None) -> RealSolutions:
    """All real solutions of a zero-dimensional ideal given by a lex basis.

    Coordinates are carried as fixed-point integers with ``precision_bits``
    fractional bits (default: 40 bits beyond ``refine_to``, at least 110).
    Raises :class:`PositiveDimensionalError` for ideals with infinitely many
    solutions; the unit ideal yields an empty result flagged ``inconsistent``.
    """
    gens = [g for g in basis if not g.is_zero()]
    order = basis.order
    names = order.variables
    if order.kind != "lex":
        raise ValueError("solve_triangular needs a lexicographic basis")
    if any(g.is_constant() for g in gens):
        return RealSolutions([], names, inconsistent=True)
    if not is_zero_dimensional(gens):
        raise PositiveDimensionalError("ideal is not zero-dimensional")
    n = order.nvars
    B = precision_bits or max(110, _bits(refine_to) + 40)
    guard = B // 3

    levels = [_Level(i) for i in range(n)]
    for g in gens:
        lv = leading_variable(g.leading_monomial())
        terms = _int_terms(g)
        other = max(sum(e) - e[lv] for e, _ in terms)
        levels[lv].polys.append((terms, other))

    partial = [dict()]
    for i in reversed(range(n)):
        level = levels[i]
        grown = []
        for pt in partial:
            cache: dict = {}
            unis = [_univariate_at(t, od, i, pt, B, cache) for t, od in level.polys]
            unis.sort(key=lambda cm: len(cm[0]))
            pivot = None
            for coeffs, mags in unis:
                # a leading coefficient that vanishes here is dropped
                while len(coeffs) > 1 and not _significant(coeffs[-1], mags[-1], guard):
                    coeffs, mags = coeffs[:-1], mags[:-1]
                if len(coeffs) > 1:
                    pivot = (coeffs, mags)
                    break
            if pivot is None:
                raise PositiveDimensionalError(f"variable {names[i]} is free above a partial solution")
            coeffs, mags = pivot
            g = 0
            for c in coeffs:
                g = gcd(g, c)
            icoeffs = [c // g for c in coeffs] if g > 1 else coeffs
            cands = _fixed_roots(icoeffs, B)
            if len(coeffs) > 2:
                # a double root may split into a complex pair once the lower
                # coordinates are approximated; recover it from the derivative
                dco = [k * c for k, c in enumerate(icoeffs)][1:]
                for r in _fixed_roots(dco, B):
                    if _residual_ok(coeffs, mags, r, B, guard):
                        cands.append(r)
            kept = []
            for r in sorted(cands):
                if kept and abs(r - kept[-1]) <= max(1 << (B - guard), abs(r) >> guard):
                    continue
                if all(_residual_ok(c, m, r, B, guard) for c, m in unis):
                    kept.append(r)
            for r in kept:
                q = dict(pt)
                q[i] = r
                grown.append(q)
        partial = grown
        if not partial:
            break

    one = 1 << B
    fixed = sorted(tuple(pt[i] for i in range(n)) for pt in partial)
    items = [tuple(v / one for v in s) for s in fixed]
    return RealSolutions(items, names, inconsistent=False, fixed=fixed, bits=B)
