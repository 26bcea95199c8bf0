"""Polynomial systems for the wrist point P = (x, y, z).

P is the common point of the axes of joints 4 and 5.  Three conditions pin it
down in the generic case:

* ``plane``  - P lies on the plane at distance d6 behind the flange along n;
* ``sphere`` - |p - P|^2 = d5^2 + d6^2;
* ``offset`` - the squared form of ``y*c1 - x*s1 = -d4`` after substituting
  the closed-form expressions of s1 and c1 (a quartic).

When the approach vector is horizontal (n3 = 0) the generic system degenerates
and two replacement systems are used (see :func:`build_parallel_special_system`
and :func:`build_nonparallel_special_system`).

Every builder accepts either exact numbers for ``n`` and ``p`` (a specialized
system over Q in x, y, z) or ``parametric=True``, in which case n1..p3 become
ring variables under a block order with x, y, z eliminated first.
"""

from __future__ import annotations

from fractions import Fraction

from ..algebra.poly import Poly, block, lex
from ..kinematics import RobotGeometry

POINT_VARS = ("z", "y", "x")
POSE_PARAMS = ("n1", "n2", "n3", "p1", "p2", "p3")
HORIZONTAL_PARAMS = ("n1", "n2", "p1", "p2", "p3")

POINT_ORDER = lex(*POINT_VARS)


class SpecialPoseError(ValueError):
    """A special-orientation system was requested for a pose it does not fit."""


def _unpack(order, n, p, params):
    X, Y, Z = (Poly.var(order, v) for v in ("x", "y", "z"))
    if n is None:
        vals = {k: Poly.var(order, k) for k in params}
        n = (vals["n1"], vals["n2"], vals.get("n3", Fraction(0)))
        p = (vals["p1"], vals["p2"], vals["p3"])
    return X, Y, Z, n, p


def _plane_sphere(geom, X, Y, Z, n, p):
    n1, n2, n3 = n
    p1, p2, p3 = p
    d5, d6 = geom.d5, geom.d6
    plane = n1 * (p1 - X) + n2 * (p2 - Y) + n3 * (p3 - Z) - d6
    sphere = (p1 - X) ** 2 + (p2 - Y) ** 2 + (p3 - Z) ** 2 - (d5 * d5 + d6 * d6)
    return plane, sphere


def coplanarity(X, Y, n, p):
    """n2 (p1 - x) - n1 (p2 - y): zero when P, p and the vertical through P
    share a plane containing n."""
    n1, n2, _ = n
    p1, p2, _ = p
    return n2 * (p1 - X) - n1 * (p2 - Y)


def _offset_quartic(geom, X, Y, Z, n, p):
    n1, n2, n3 = n
    p1, p2, p3 = p
    d4, d5 = geom.d4, geom.d5
    k = coplanarity(X, Y, n, p)
    inner = (
        (n1 * n2 * X + (1 - n1 * n1) * Y) * (p1 - X)
        - (n1 * n2 * Y + (1 - n2 * n2) * X) * (p2 - Y)
        - n3 * (n1 * Y - n2 * X) * (p3 - Z)
    )
    return inner * inner - d4 * d4 * (d5 * d5 * n3 * n3 + k * k)


def _ring(parametric, params):
    return block(POINT_VARS, params) if parametric else POINT_ORDER


def build_generic_system(geom: RobotGeometry, n=None, p=None, parametric: bool = False) -> list:
    """[plane, sphere, offset quartic] in x, y, z."""
    order = _ring(parametric, POSE_PARAMS)
    X, Y, Z, n, p = _unpack(order, None if parametric else n, p, POSE_PARAMS)
    plane, sphere = _plane_sphere(geom, X, Y, Z, n, p)
    return [plane, sphere, _offset_quartic(geom, X, Y, Z, n, p)]


def build_parallel_special_system(geom: RobotGeometry, n=None, p=None, parametric: bool = False) -> list:
    """Horizontal approach with P coplanar: [plane, sphere, coplanarity]."""
    if not parametric and n[2] != 0:
        raise SpecialPoseError("parallel special system needs n3 = 0")
    order = _ring(parametric, HORIZONTAL_PARAMS)
    X, Y, Z, n, p = _unpack(order, None if parametric else n, p, HORIZONTAL_PARAMS)
    n = (n[0], n[1], 0)
    plane, sphere = _plane_sphere(geom, X, Y, Z, n, p)
    return [plane, sphere, coplanarity(X, Y, n, p)]


def offset_condition(geom: RobotGeometry, n, p) -> int:
    """For a horizontal n, +1 or -1 when n1 p1 + n2 p2 - d6 = +-d4, else 0."""
    h = n[0] * p[0] + n[1] * p[1] - geom.d6
    if h == geom.d4:
        return 1
    if h == -geom.d4:
        return -1
    return 0


def extra_quartic(geom: RobotGeometry, X, Y, n, n2_zero: bool):
    """Additional quartic used when the approach is horizontal and P is not
    coplanar; the variant is chosen by whether n2 vanishes."""
    n1, n2, _ = n
    d4 = geom.d4
    a = n1 * n1 * X * X
    b = n2 * n2 * Y * Y
    if n2_zero:
        return (d4 * d4 - a + b) ** 2 - 4 * d4 * d4 * b
    return (d4 * d4 + a - b) ** 2 - 4 * d4 * d4 * a


def build_nonparallel_special_system(geom: RobotGeometry, n=None, p=None, parametric: bool = False,
                                     n2_zero: bool | None = None) -> list:
    """Horizontal approach, P not coplanar: generic system plus one quartic.

    For exact inputs the solvability condition ``n1 p1 + n2 p2 - d6 = +-d4``
    must hold; otherwise :class:`SpecialPoseError` is raised.
    """
    if not parametric:
        if n[2] != 0:
            raise SpecialPoseError("nonparallel special system needs n3 = 0")
        if offset_condition(geom, n, p) == 0:
            raise SpecialPoseError("unreachable: special-orientation consistency violated")
        n2_zero = n[1] == 0
    elif n2_zero is None:
        raise ValueError("parametric build needs the n2_zero selector")
    order = _ring(parametric, HORIZONTAL_PARAMS)
    X, Y, Z, n, p = _unpack(order, None if parametric else n, p, HORIZONTAL_PARAMS)
    n = (n[0], n[1], 0)
    plane, sphere = _plane_sphere(geom, X, Y, Z, n, p)
    return [plane, sphere, _offset_quartic(geom, X, Y, Z, n, p), extra_quartic(geom, X, Y, n, n2_zero)]


def build_vertical_system(geom: RobotGeometry, sign: int = 1, p=None, parametric: bool = False) -> list:
    """Generic system with the approach vector fixed to (0, 0, sign)."""
    n = (Fraction(0), Fraction(0), Fraction(sign))
    params = ("p1", "p2", "p3")
    order = _ring(parametric, params)
    X, Y, Z = (Poly.var(order, v) for v in ("x", "y", "z"))
    if parametric:
        p = tuple(Poly.var(order, k) for k in params)
    plane, sphere = _plane_sphere(geom, X, Y, Z, n, p)
    return [plane, sphere, _offset_quartic(geom, X, Y, Z, n, p)]


def residuals(geom: RobotGeometry, n, p, point) -> dict:
    """Float residuals of the generic conditions at a point (x, y, z)."""
    x, y, z = (float(v) for v in point)
    n1, n2, n3 = (float(v) for v in n)
    p1, p2, p3 = (float(v) for v in p)
    d4, d5, d6 = float(geom.d4), float(geom.d5), float(geom.d6)
    k = n2 * (p1 - x) - n1 * (p2 - y)
    inner = (
        (n1 * n2 * x + (1 - n1 * n1) * y) * (p1 - x)
        - (n1 * n2 * y + (1 - n2 * n2) * x) * (p2 - y)
        - n3 * (n1 * y - n2 * x) * (p3 - z)
    )
    return {
        "plane": n1 * (p1 - x) + n2 * (p2 - y) + n3 * (p3 - z) - d6,
        "sphere": (p1 - x) ** 2 + (p2 - y) ** 2 + (p3 - z) ** 2 - d5 * d5 - d6 * d6,
        "offset": inner * inner - d4 * d4 * (d5 * d5 * n3 * n3 + k * k),
        "coplanarity": k,
    }
