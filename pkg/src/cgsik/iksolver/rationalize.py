"""Exact rational stand-ins for floating poses.

Positions are snapped to the simplest rational within ``tol``.  Unit vectors
are snapped through a rational parametrization of the sphere (or circle), so
the result is an exactly unit vector within about ``2 * tol`` of the input;
the polynomial systems then carry no rounding inconsistency between the
orientation and its norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..kinematics import Pose

SNAP_TOL = 1e-10


def rational_approx(v: float, tol: float = SNAP_TOL) -> Fraction:
    """Simplest-denominator rational with ``|r - v| <= tol``."""
    v = float(v)
    if not math.isfinite(v):
        raise ValueError("cannot rationalize a non-finite value")
    f = Fraction(v)
    cap = 64
    while True:
        r = f.limit_denominator(cap)
        if abs(r - f) <= tol:
            return r
        cap *= 16


def rational_unit(n, tol: float = SNAP_TOL) -> tuple:
    """Exact rational unit 3-vector near ``n`` via stereographic projection."""
    n1, n2, n3 = (float(c) for c in n)
    s = 1.0 if n3 >= 0 else -1.0
    u = rational_approx(n1 / (1.0 + s * n3), tol / 2)
    v = rational_approx(n2 / (1.0 + s * n3), tol / 2)
    q = 1 + u * u + v * v
    z = (1 - u * u - v * v) / q
    return (2 * u / q, 2 * v / q, z if s > 0 else -z)


def rational_circle(c: float, s: float, tol: float = SNAP_TOL) -> tuple:
    """Exact rational point ``(cos, sin)`` on the unit circle near ``(c, s)``."""
    norm = math.hypot(c, s)
    if norm == 0.0:
        raise ValueError("direction has no horizontal component")
    c, s = c / norm, s / norm
    flip = c < 0
    if flip:
        c, s = -c, -s
    t = rational_approx(s / (1.0 + c), tol / 2)
    q = 1 + t * t
    cc, ss = (1 - t * t) / q, 2 * t / q
    return (-cc, -ss) if flip else (cc, ss)


@dataclass(frozen=True, eq=False)
class RationalPose:
    """A pose together with its exact rational approach direction and position."""

    pose: Pose
    n: tuple
    p: tuple

    @property
    def n_float(self) -> np.ndarray:
        return np.array([float(c) for c in self.n])

    @property
    def p_float(self) -> np.ndarray:
        return np.array([float(c) for c in self.p])

    def is_horizontal(self) -> bool:
        return self.n[2] == 0


def rationalize_pose(pose: Pose, tol: float = SNAP_TOL) -> RationalPose:
    n = rational_unit(pose.n, tol)
    p = tuple(rational_approx(c, tol) for c in pose.p)
    return RationalPose(pose, n, p)


def horizontal_pose(pose: Pose, tol: float = SNAP_TOL) -> RationalPose:
    """Rational pose whose approach direction is forced exactly horizontal."""
    c, s = rational_circle(float(pose.n[0]), float(pose.n[1]), tol)
    p = tuple(rational_approx(v, tol) for v in pose.p)
    return RationalPose(pose, (c, s, Fraction(0)), p)
