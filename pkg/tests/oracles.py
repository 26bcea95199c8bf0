"""Independent reference computations shared by the test modules."""

import math

import numpy as np

from cgsik.algebra import buchberger, is_groebner
from cgsik.iksolver.systems import POINT_ORDER


def random_q(geom, rng):
    lo = np.array([a for a, _ in geom.limits])
    hi = np.array([b for _, b in geom.limits])
    return rng.uniform(lo, hi)


# -- an independent forward-kinematics oracle: elementary factors multiplied
#    with plain Python lists, no shared code with the package


def _mat(rows):
    return [list(r) for r in rows]


def _mul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(4)) for j in range(4)] for i in range(4)]


def _rz(t):
    c, s = math.cos(t), math.sin(t)
    return _mat([[c, -s, 0, 0], [s, c, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])


def _rx(t):
    c, s = math.cos(t), math.sin(t)
    return _mat([[1, 0, 0, 0], [0, c, -s, 0], [0, s, c, 0], [0, 0, 0, 1]])


def _tz(d):
    return _mat([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, d], [0, 0, 0, 1]])


def _tx(a):
    return _mat([[1, 0, 0, a], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])


def oracle_joint(row, theta):
    T = _rz(theta)
    for f in (_tz(float(row.d)), _tx(float(row.a)), _rx(row.alpha), _rz(row.delta)):
        T = _mul(T, f)
    return T


def oracle_chain(geom, q, upto=6):
    T = _mat(np.eye(4))
    for i in range(upto):
        T = _mul(T, oracle_joint(geom.rows[i], q[i]))
    return np.array(T)


def specialize_gens(gens, point):
    """Substitute a parameter point into block-ordered generators."""
    return [g.subs(point, POINT_ORDER) for g in gens]


def same_ideal_as_direct(segment, gens, point) -> bool:
    """The specialized segment basis is a Groebner basis of the ideal that a
    direct computation on the specialized generators produces."""
    specialized = list(segment.specialize(point))
    direct = buchberger(specialize_gens(gens, point))
    if direct.is_unit() or not specialized:
        return direct.is_unit() and any(g.is_constant() for g in specialized)
    specialized = [g.reorder(direct.order) for g in specialized]
    return (
        is_groebner(specialized)
        and all(direct.contains(g) for g in specialized)
        and all(_reduces(g, specialized) for g in direct)
    )


def _reduces(p, basis) -> bool:
    from cgsik.algebra import normal_form

    return normal_form(p, basis).is_zero()


def certified_real_empty(segment) -> bool:
    """A proof that a segment has no real parameter points, for the two
    shapes that occur: an equation in one parameter with no real roots, or a
    sum of even monomials (zero only at the origin of its parameters) whose
    zero makes some inequation vanish."""
    from cgsik.algebra import sturm_count
    from cgsik.algebra.cgs import _to_param_lex

    eqs = [_to_param_lex(e, segment.order) for e in segment.equations]
    neqs = [_to_param_lex(e, segment.order) for e in segment.inequations]
    for e in eqs:
        used = [v for v in e.order.variables if e.degree(v) > 0]
        if len(used) == 1 and sturm_count(e.univariate_coeffs(used[0])) == 0:
            return True
        even = all(all(k % 2 == 0 for k in m) for m in e.terms) and all(c > 0 for c in e.terms.values())
        if even and (0,) * e.order.nvars not in e.terms:
            origin = {v: 0 for v in used}
            if any(n.subs(origin).is_zero() for n in neqs):
                return True
    return False


def wrist_point(geom, q):
    """Common point of the joint 4 and 5 axes, from the oracle chain."""
    return oracle_chain(geom, q, 4)[:3, 3]


def approach(geom, q):
    return oracle_chain(geom, q)[:3, 2]


def horizontal_q(geom, q, joint):
    """Adjust one wrist joint so the approach vector becomes horizontal.

    n3 is affine in (cos, sin) of joints 4 and 5 separately, so two probes
    give the zero.  Joint index 3 leaves P in the vertical plane through n
    (the coplanar branch); joint index 4 forces |sin| of joint 5 to 1, which
    puts P off that plane on a circle of wrist points.
    """
    q = np.array(q, dtype=float)
    q[joint] = 0.0
    a = approach(geom, q)[2]
    q[joint] = math.pi / 2
    b = approach(geom, q)[2]
    q[joint] = math.atan2(-a, b)
    return q
