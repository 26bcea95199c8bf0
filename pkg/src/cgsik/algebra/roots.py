"""Certified real-root isolation for univariate polynomials over Q.

Polynomials are handled as dense integer coefficient lists (ascending).
Isolation uses Descartes' rule of signs with bisection on dyadic intervals;
refinement bisects with exact integer sign evaluation.  Sturm sequences are
provided as an independent root-counting method.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd
from typing import Sequence

from .poly import Poly


@dataclass(frozen=True)
class RealRoot:
    lo: Fraction
    hi: Fraction
    value: float
    multiplicity: int = 1

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2


# ---------------------------------------------------------------------------
# dense integer helpers


def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def to_int_coeffs(coeffs: Sequence) -> list:
    """Primitive integer coefficients (ascending) with positive leading term."""
    fr = [Fraction(c) for c in coeffs]
    den = 1
    for c in fr:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = _trim([c.numerator * (den // c.denominator) for c in fr])
    return _primitive(ints)


def _primitive(p: list) -> list:
    if not p:
        return p
    g = 0
    for c in p:
        g = gcd(g, c)
    if p[-1] < 0:
        g = -g
    return [c // g for c in p]


def _deriv(p: list) -> list:
    return [i * p[i] for i in range(1, len(p))]


def _qmonic(p: list) -> list:
    p = _trim([Fraction(c) for c in p])
    lc = p[-1]
    return [c / lc for c in p]


def _qdivmod(a: list, b: list) -> tuple:
    a = [Fraction(c) for c in a]
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lb = b[-1]
    for k in range(len(q) - 1, -1, -1):
        c = a[k + len(b) - 1] / lb
        q[k] = c
        if c:
            for i, bc in enumerate(b):
                a[i + k] -= c * bc
    return q, _trim(a[: len(b) - 1] if len(b) > 1 else [])


def _qgcd(a: list, b: list) -> list:
    a, b = _trim([Fraction(c) for c in a]), _trim([Fraction(c) for c in b])
    while b:
        a, b = b, _qdivmod(a, b)[1]
    return _qmonic(a)


def _qsub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return _trim([x - y for x, y in zip(a, b)])


_PRIME = (1 << 61) - 1


def _gcd_degree_mod(a: list, b: list, q: int) -> int:
    """Degree of gcd(a, b) over GF(q); polynomials ascending."""
    a = [c % q for c in a]
    b = [c % q for c in b]
    while a and a[-1] == 0:
        a.pop()
    while b and b[-1] == 0:
        b.pop()
    while b:
        inv = pow(b[-1], -1, q)
        while len(a) >= len(b):
            f = a[-1] * inv % q
            off = len(a) - len(b)
            for i, c in enumerate(b):
                a[off + i] = (a[off + i] - f * c) % q
            while a and a[-1] == 0:
                a.pop()
        a, b = b, a
    return len(a) - 1


def is_squarefree(p: list) -> bool:
    """Cheap sufficient test: gcd(p, p') is constant modulo a large prime that
    does not divide the leading coefficient.  ``False`` means "not proven"."""
    if len(p) <= 2:
        return True
    if p[-1] % _PRIME == 0:
        return False
    return _gcd_degree_mod(p, _deriv(p), _PRIME) == 0


def squarefree_decomposition(p: list) -> list:
    """Yun's algorithm over Q: list of (integer factor, multiplicity)."""
    if p and all(isinstance(c, int) for c in p) and is_squarefree(_trim(list(p))):
        return [(_primitive(_trim(list(p))), 1)]
    p = _trim([Fraction(c) for c in p])
    if len(p) <= 1:
        return []
    p = _qmonic(p)
    dp = _deriv(p)
    a = _qgcd(p, dp)
    b = _qdivmod(p, a)[0]
    c = _qdivmod(dp, a)[0]
    d = _qsub(c, _deriv(b))
    out = []
    i = 1
    while len(b) > 1:
        a = _qgcd(b, d) if d else _qmonic(b)
        if len(a) > 1:
            out.append((to_int_coeffs(a), i))
        b = _qdivmod(b, a)[0]
        c = _qdivmod(d, a)[0] if d else []
        d = _qsub(c, _deriv(b))
        i += 1
    return out


def _eval_sign_dyadic(p: list, num: int, k: int) -> int:
    """Sign of p(num / 2**k) using integer arithmetic."""
    n = len(p) - 1
    acc = 0
    # Horner on p(num/2^k) * 2^(k n)
    for i in range(n, -1, -1):
        acc = acc * num + p[i] * (1 << (k * (n - i)))
    return (acc > 0) - (acc < 0)


def _sign_variations(seq) -> int:
    v = 0
    last = 0
    for c in seq:
        if c:
            s = 1 if c > 0 else -1
            if last and s != last:
                v += 1
            last = s
    return v


def _taylor_shift1(p: list) -> list:
    p = list(p)
    n = len(p)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            p[j] += p[j + 1]
    return p


def _descartes_01(p: list) -> int:
    """Sign-variation bound for roots of p in the open interval (0, 1)."""
    return _sign_variations(_taylor_shift1(list(reversed(p))))


def _cauchy_log2(p: list) -> int:
    lead = abs(p[-1])
    m = max(abs(c) for c in p[:-1]) if len(p) > 1 else 0
    bound = 1 + Fraction(m, lead)
    k = 0
    while (1 << k) < bound:
        k += 1
    return k


def _isolate_positive(p: list, log2b: int) -> list:
    """Isolating dyadic intervals (num, k): roots in (num/2^k, (num+1)/2^k)
    within (0, 2^log2b); also returns exact dyadic roots as (num, k, True)."""
    n = len(p) - 1
    # q(x) = p(2^b x), roots in (0,1)
    if log2b >= 0:
        q = [c << (log2b * i) for i, c in enumerate(p)]
    else:
        s = -log2b
        q = [c << (s * (n - i)) for i, c in enumerate(p)]
    q = _primitive(q)
    out = []
    stack = [(q, 0, 0)]  # poly on (0,1) for interval (c/2^k, (c+1)/2^k) in q-coordinates
    while stack:
        q, c, k = stack.pop()
        v = _descartes_01(q)
        if v == 0:
            continue
        if v == 1:
            out.append((c, k, False))
            continue
        # left half: 2^n q(x/2); right half: left(x+1)
        nq = len(q) - 1
        left = [coef << (nq - i) for i, coef in enumerate(q)]
        right = _taylor_shift1(left)
        if right[0] == 0:
            out.append((2 * c + 1, k + 1, True))
            right = right[1:]
            # dividing by x keeps (0,1) roots of the right half intact
        stack.append((_primitive(left), 2 * c, k + 1))
        stack.append((_primitive(right), 2 * c + 1, k + 1))
    res = []
    for c, k, exact in out:
        kk = k - log2b
        res.append((c, kk, exact))
    return res


def _dy(num: int, k: int) -> Fraction:
    return Fraction(num, 1 << k) if k >= 0 else Fraction(num * (1 << -k))


def _sign_at(p: list, num: int, k: int) -> int:
    if k >= 0:
        return _eval_sign_dyadic(p, num, k)
    return _eval_sign_dyadic(p, num << -k, 0)


def refine_dyadic(p: list, num: int, k: int, bits: int) -> tuple:
    """Shrink the open isolating interval (num/2^k, (num+1)/2^k) of a simple
    root of the square-free integer polynomial ``p`` until its width is at most
    2^-bits.  Returns ``(lo_num, hi_num, k)``; ``lo_num == hi_num`` marks an
    exact dyadic root."""
    # a zero on an endpoint belongs to a neighbouring interval, so take the
    # sign just inside from the derivative
    slo = _sign_at(p, num, k) or _sign_at(_deriv(p), num, k)
    lo = num
    while k < bits:
        lo <<= 1
        k += 1
        sm = _sign_at(p, lo + 1, k)
        if sm == 0:
            return lo + 1, lo + 1, k
        if sm == slo:
            lo += 1
    return lo, lo + 1, k


def _bits_for(tol) -> int:
    b = 0
    while Fraction(1, 1 << b) > tol:
        b += 1
    return b


def _isolate_squarefree(p: list, tol: Fraction) -> list:
    """Sorted (lo, hi) isolating intervals of a square-free integer polynomial."""
    roots = []
    if p and p[0] == 0:
        p = p[1:]
        roots.append((Fraction(0), Fraction(0)))
    if len(p) <= 1:
        return roots
    bits = _bits_for(tol)
    b = _cauchy_log2(p)
    for sign in (1, -1):
        q = p if sign == 1 else [c if i % 2 == 0 else -c for i, c in enumerate(p)]
        for num, k, exact in _isolate_positive(q, b):
            if exact:
                lo = hi = _dy(num, k)
            else:
                a, c, kk = refine_dyadic(q, num, k, bits)
                lo, hi = _dy(a, kk), _dy(c, kk)
            if sign == -1:
                lo, hi = -hi, -lo
            roots.append((lo, hi))
    roots.sort()
    return roots


def isolate_real_roots(p, refine_to: float = 1e-12) -> list:
    """All distinct real roots of a nonzero univariate polynomial over Q.

    ``p`` is a :class:`Poly` in a single variable or an ascending coefficient
    list.  Roots come back sorted, each with a certified isolating interval of
    width at most ``refine_to`` and its multiplicity.
    """
    coeffs = _coeff_list(p)
    ints = to_int_coeffs(coeffs)
    if not ints:
        raise ValueError("zero polynomial has no isolated roots")
    tol = Fraction(refine_to)
    out = []
    for factor, mult in squarefree_decomposition(ints):
        for lo, hi in _isolate_squarefree(factor, tol):
            out.append(RealRoot(lo, hi, float((lo + hi) / 2), mult))
    out.sort(key=lambda r: (r.lo, r.hi))
    return out


def rational_roots(p, max_den: int = 10**6) -> list:
    """Real roots of ``p`` that are rationals with denominator <= ``max_den``."""
    coeffs = [Fraction(c) for c in _coeff_list(p)]
    out = []
    for r in isolate_real_roots(coeffs, refine_to=1e-15):
        for cand in {r.lo, r.hi, Fraction(r.value).limit_denominator(max_den)}:
            if cand.denominator <= max_den and _eval(coeffs, cand) == 0 and cand not in out:
                out.append(cand)
    return sorted(out)


def _coeff_list(p) -> list:
    if isinstance(p, Poly):
        used = p.variables_used()
        if len(used) > 1:
            raise ValueError("polynomial is not univariate")
        if not used:
            return [p.terms.get((0,) * p.order.nvars, Fraction(0))]
        return p.univariate_coeffs(used[0])
    return list(p)


# ---------------------------------------------------------------------------
# Sturm sequences (independent counting)


def sturm_sequence(p: Sequence) -> list:
    p0 = [Fraction(c) for c in p]
    _trim(p0)
    seq = [p0, _trim([Fraction(i * p0[i]) for i in range(1, len(p0))])]
    while seq[-1] and len(seq[-1]) > 1:
        a, b = seq[-2], seq[-1]
        r = list(a)
        while len(r) >= len(b) and r:
            f = r[-1] / b[-1]
            k = len(r) - len(b)
            for i, c in enumerate(b):
                r[i + k] -= f * c
            _trim(r)
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if s]


def _eval(p, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def sturm_count(p: Sequence, lo=None, hi=None) -> int:
    """Number of distinct real roots in (lo, hi]; infinite ends when None."""
    seq = sturm_sequence(_coeff_list(p))

    def var_at(x):
        if x is None:
            return None
        return _sign_variations([_eval(s, Fraction(x)) for s in seq])

    def var_inf(sign):
        vals = []
        for s in seq:
            deg = len(s) - 1
            lc = s[-1]
            vals.append(lc if sign > 0 or deg % 2 == 0 else -lc)
        return _sign_variations(vals)

    vlo = var_inf(-1) if lo is None else var_at(lo)
    vhi = var_inf(1) if hi is None else var_at(hi)
    return vlo - vhi


def binomial_shift(p: Sequence, a) -> list:
    """Coefficients of p(x + a), ascending."""
    n = len(p)
    out = [Fraction(0)] * n
    for i, c in enumerate(p):
        for j in range(i + 1):
            out[j] += Fraction(c) * comb(i, j) * Fraction(a) ** (i - j)
    return out
