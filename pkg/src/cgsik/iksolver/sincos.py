"""Joint angles from the wrist point through a Groebner basis in sines and cosines.

Twelve polynomials in ``s_i = sin(theta_i)``, ``c_i = cos(theta_i)`` encode
the same relations as the closed-form chain:

=====  ==========================================================
f1,f2  flange-frame position of P gives s6, c6
f3,f4  vertical component of joint 4's axis, with s5^2 + c5^2 = 1
f5,f6  horizontal components of joint 4's axis give s1, c1
f7,f8  shoulder distance gives c3, with s3^2 + c3^2 = 1
f9,f10 height of P gives (s2, c2), with s2^2 + c2^2 = 1
f11,f12 vertical component of joint 5's axis, with s4^2 + c4^2 = 1
=====  ==========================================================

The pose and P enter only through fourteen derived quantities (see
:data:`SINCOS_PARAMS`), which keeps the parametric basis small enough to
precompute.  Without a template the system is specialized and a lex basis is
computed per wrist point.
"""

from __future__ import annotations

from fractions import Fraction

from ..algebra.groebner import GroebnerBasis, buchberger
from ..algebra.poly import Poly, block, lex
from ..algebra.ratfunc import DegeneratePointError
from ..algebra.triangular import PositiveDimensionalError, solve_triangular
from .chain import SinCosPair

SINCOS_VARS = ("s4", "c4", "s2", "c2", "s3", "c3", "s1", "c1", "s5", "c5", "s6", "c6")
SINCOS_PARAMS = ("S", "C", "K", "n3", "n1", "n2", "l1", "l2", "m1", "m2", "l3", "m3", "R", "z")
SINCOS_ORDER = lex(*SINCOS_VARS)
SINCOS_BLOCK = block(SINCOS_VARS, SINCOS_PARAMS)

# inputs are rounded to multiples of 2^-SNAP_BITS; exact dyadic values keep
# the specialized coefficients integral and small
SNAP_BITS = 44


def build_sincos_system(geom, values=None) -> list:
    """f1..f12; parametric in :data:`SINCOS_PARAMS` when ``values`` is None."""
    if values is None:
        order = SINCOS_BLOCK
        par = {k: Poly.var(order, k) for k in SINCOS_PARAMS}
    else:
        order = SINCOS_ORDER
        par = {k: Fraction(values[k]) for k in SINCOS_PARAMS}
    v = {k: Poly.var(order, k) for k in SINCOS_VARS}
    s1, c1, s2, c2, s3, c3 = v["s1"], v["c1"], v["s2"], v["c2"], v["s3"], v["c3"]
    s4, c4, s5, c5, s6, c6 = v["s4"], v["c4"], v["s5"], v["c5"], v["s6"], v["c6"]
    d1, a2, a3, d4, d5 = geom.d1, geom.a2, geom.a3, geom.d4, geom.d5
    c23 = c2 * c3 - s2 * s3
    s23 = s2 * c3 + c2 * s3
    return [
        d5 * s6 - par["S"],
        d5 * c6 - par["C"],
        d5 * par["n3"] * s5 + par["K"] * c5,
        s5 * s5 + c5 * c5 - 1,
        s1 + par["n1"] * s5 - c5 * (par["l1"] * c6 - par["m1"] * s6),
        c1 - par["n2"] * s5 + c5 * (par["l2"] * c6 - par["m2"] * s6),
        2 * a2 * a3 * c3 - (par["R"] - a2 * a2 - a3 * a3 - d4 * d4),
        s3 * s3 + c3 * c3 - 1,
        d1 + a2 * c2 + a3 * c23 - par["z"],
        s2 * s2 + c2 * c2 - 1,
        c23 * c4 - s23 * s4 + par["m3"] * c6 + par["l3"] * s6,
        s4 * s4 + c4 * c4 - 1,
    ]


def snap_dyadic(v, bits: int = SNAP_BITS) -> Fraction:
    """Nearest multiple of 2^-bits."""
    return Fraction(round(Fraction(v) * (1 << bits)), 1 << bits)


def sincos_parameters(pose, point, geom, bits: int = SNAP_BITS) -> dict:
    """Exact dyadic values of the derived parameters at a pose and wrist point."""
    q = lambda v: snap_dyadic(v, bits)  # noqa: E731
    l1, l2, l3 = (q(c) for c in pose.l)
    m1, m2, m3 = (q(c) for c in pose.m)
    n1, n2, n3 = (q(c) for c in pose.n)
    p1, p2, p3 = (q(c) for c in pose.p)
    x, y, z = (q(c) for c in point)
    dx, dy, dz = x - p1, y - p2, z - p3
    return {
        "S": l1 * dx + l2 * dy + l3 * dz,
        "C": m1 * dx + m2 * dy + m3 * dz,
        "K": n2 * (p1 - x) - n1 * (p2 - y),
        "n3": n3, "n1": n1, "n2": n2,
        "l1": l1, "l2": l2, "m1": m1, "m2": m2, "l3": l3, "m3": m3,
        "R": x * x + y * y + (z - geom.d1) ** 2,
        "z": z,
    }


def sincos_basis_direct(geom, values: dict, caps) -> GroebnerBasis:
    return buchberger(build_sincos_system(geom, values), SINCOS_ORDER, caps)


def solutions_to_pairs(sols) -> list:
    """Solution dicts keyed by sine/cosine names -> six SinCosPair per solution."""
    out = []
    for s in sols.as_dicts():
        out.append(tuple(SinCosPair(float(s[f"s{i}"]), float(s[f"c{i}"])) for i in range(1, 7)))
    return out


def sincos_candidates(pose, point, geom, template, options) -> list:
    """IK candidates for one wrist point via the sine/cosine basis.

    With a template carrying the parametric basis the basis is specialized;
    at a point where one of its leading coefficients vanishes, or without a
    template, the lex basis is computed directly.  Returns ``None`` when the
    system is not zero-dimensional there (the caller uses the closed form).
    """
    from .solver import BranchRecord, IkCandidate

    values = sincos_parameters(pose, point, geom)
    gb = None
    how = "sincos-direct"
    if template is not None and template.has_sincos():
        try:
            gb = template.sincos_basis(values)
            how = "sincos-template"
        except DegeneratePointError:
            gb = None
    if gb is None:
        gb = sincos_basis_direct(geom, values, options.caps)
    try:
        sols = solve_triangular(gb, refine_to=options.root_tol)
    except PositiveDimensionalError:
        return None
    case = "coplanar" if point.system == "parallel" else (
        "self-motion" if point.path.startswith("circle-sample") else "generic")
    out = []
    for pairs in solutions_to_pairs(sols):
        signs = tuple(1 if p.s >= 0 else 0 for p in (pairs[4], pairs[2], pairs[1], pairs[3]))
        out.append(IkCandidate(pairs, BranchRecord(case, point.system, signs, how, point.path), point))
    return out
