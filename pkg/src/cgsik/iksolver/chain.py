"""Closed-form recovery of the joint angles from the wrist point P.

Each step returns sine/cosine pairs rather than angles so that sign branches
stay explicit.  Generic order: joint 6, then joints 5 and 1 together, 3, 2, 4.
Horizontal-approach coplanar order: 6, 3, 2, 1, 4, 5.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..kinematics import Pose, RobotGeometry

NORM_TOL = 1e-6


class ChainRejection(ValueError):
    """A candidate wrist point is inconsistent with the pose."""


@dataclass(frozen=True)
class SinCosPair:
    s: float
    c: float

    @property
    def theta(self) -> float:
        t = math.atan2(self.s, self.c)
        return math.pi if t <= -math.pi else t

    def norm_error(self) -> float:
        return abs(self.s * self.s + self.c * self.c - 1.0)

    def normalized(self) -> "SinCosPair":
        r = math.hypot(self.s, self.c)
        return SinCosPair(self.s / r, self.c / r)

    @classmethod
    def from_angle(cls, theta: float) -> "SinCosPair":
        return cls(math.sin(theta), math.cos(theta))


@dataclass(frozen=True)
class Lengths:
    d1: float
    a2: float
    a3: float
    d4: float
    d5: float
    d6: float

    @classmethod
    def of(cls, geom: RobotGeometry) -> "Lengths":
        return cls(*(float(v) for v in (geom.d1, geom.a2, geom.a3, geom.d4, geom.d5, geom.d6)))


def _lengths(geom) -> Lengths:
    return geom if isinstance(geom, Lengths) else Lengths.of(geom)


def _unit_circle(a: float, b: float, rhs: float, slack: float = 1e-9) -> list:
    """Solutions (c, s) of a*c + b*s = rhs with c^2 + s^2 = 1."""
    r2 = a * a + b * b
    if r2 == 0.0:
        return []
    disc = r2 - rhs * rhs
    if disc < -slack * r2:
        return []
    root = math.sqrt(max(disc, 0.0))
    if root <= 1e-12 * math.sqrt(r2):
        return [((a * rhs) / r2, (b * rhs) / r2)]
    return [
        ((a * rhs - b * root) / r2, (b * rhs + a * root) / r2),
        ((a * rhs + b * root) / r2, (b * rhs - a * root) / r2),
    ]


# ---------------------------------------------------------------------------
# individual joints


def theta6_from_point(pose: Pose, point, geom) -> SinCosPair:
    """Joint 6 from the position of P in the flange frame."""
    L = _lengths(geom)
    d = np.asarray(point, dtype=float) - pose.p
    s = float(pose.l @ d) / L.d5
    c = float(pose.m @ d) / L.d5
    pair = SinCosPair(s, c)
    if pair.norm_error() > NORM_TOL:
        raise ChainRejection(f"joint 6: s^2 + c^2 off by {pair.norm_error():.2e}")
    return pair.normalized()


def theta5_theta1_generic(pose: Pose, point, geom) -> list:
    """Both sign branches of joints 5 and 1 for a non-degenerate approach.

    Returns ``[(pair5, pair1), (pair5', pair1')]`` with the second branch the
    componentwise negation of the first.
    """
    L = _lengths(geom)
    n1, n2, n3 = (float(v) for v in pose.n)
    p1, p2, p3 = (float(v) for v in pose.p)
    x, y, z = (float(v) for v in point)
    k = n2 * (p1 - x) - n1 * (p2 - y)
    rad = L.d5 * L.d5 * n3 * n3 + k * k
    if rad <= 1e-18 * L.d5 * L.d5:
        raise ChainRejection("joints 5/1: radicand vanishes (special orientation)")
    r = math.sqrt(rad)
    s1 = (-n1 * n2 * (p1 - x) + (1 - n2 * n2) * (p2 - y) - n2 * n3 * (p3 - z)) / r
    c1 = ((1 - n1 * n1) * (p1 - x) - n1 * n2 * (p2 - y) - n1 * n3 * (p3 - z)) / r
    s5 = k / r
    c5 = -L.d5 * n3 / r
    out = []
    for sign in (1.0, -1.0):
        out.append((SinCosPair(sign * s5, sign * c5), SinCosPair(sign * s1, sign * c1).normalized()))
    return out


def theta3_from_point(geom, point) -> list:
    """Elbow angle from the distance between P and the shoulder."""
    L = _lengths(geom)
    x, y, z = (float(v) for v in point)
    c3 = (x * x + y * y + (z - L.d1) ** 2 - L.a2 ** 2 - L.a3 ** 2 - L.d4 ** 2) / (2 * L.a2 * L.a3)
    if abs(c3) > 1.0 + 1e-9:
        return []
    c3 = max(-1.0, min(1.0, c3))
    s3 = math.sqrt(max(0.0, 1.0 - c3 * c3))
    if s3 < 1e-7:
        return [SinCosPair(0.0, 1.0 if c3 > 0 else -1.0)]
    return [SinCosPair(s3, c3), SinCosPair(-s3, c3)]


def theta2_from_point(geom, point, t3: SinCosPair) -> list:
    """Shoulder angle from the height of P: d1 + a2 c2 + a3 c23 = z."""
    L = _lengths(geom)
    z = float(point[2])
    a = L.a2 + L.a3 * t3.c
    b = -L.a3 * t3.s
    rhs = z - L.d1
    return [SinCosPair(s, c) for c, s in _unit_circle(a, b, rhs)]


def theta4_from_chain(pose: Pose, t2: SinCosPair, t3: SinCosPair, t6: SinCosPair) -> list:
    """Wrist angle from the vertical component of joint 5's axis."""
    c23 = t2.c * t3.c - t2.s * t3.s
    s23 = t2.s * t3.c + t2.c * t3.s
    rhs = -float(pose.m[2]) * t6.c - float(pose.l[2]) * t6.s
    # c23*c4 - s23*s4 = rhs
    return [SinCosPair(s, c) for c, s in _unit_circle(c23, -s23, rhs)]


def theta1_from_special(geom, point, t2: SinCosPair, t3: SinCosPair) -> list:
    """Base angle from x = d4 s1 - c1 (a2 s2 + a3 s23)."""
    L = _lengths(geom)
    x = float(point[0])
    s23 = t2.s * t3.c + t2.c * t3.s
    reach = L.a2 * t2.s + L.a3 * s23
    return [SinCosPair(s, c) for c, s in _unit_circle(-reach, L.d4, x)]


def theta5_from_special(pose: Pose, t1: SinCosPair, t6: SinCosPair) -> SinCosPair:
    """Joint 5 from the horizontal components of joint 4's axis (2x2 solve)."""
    l, m, n = pose.l, pose.m, pose.n
    u1 = float(l[0]) * t6.c - float(m[0]) * t6.s
    u2 = float(l[1]) * t6.c - float(m[1]) * t6.s
    n1, n2 = float(n[0]), float(n[1])
    # -n1 s5 + u1 c5 = s1 ; -n2 s5 + u2 c5 = -c1
    det = -n1 * u2 + n2 * u1
    if abs(det) < 1e-12:
        raise ChainRejection("joint 5: singular 2x2 system")
    s5 = (t1.s * u2 + t1.c * u1) / det
    c5 = (n1 * t1.c + n2 * t1.s) / det
    pair = SinCosPair(s5, c5)
    if pair.norm_error() > NORM_TOL:
        raise ChainRejection(f"joint 5: s^2 + c^2 off by {pair.norm_error():.2e}")
    return pair.normalized()


def theta1_theta5_special(pose: Pose, point, geom, t2: SinCosPair, t3: SinCosPair, t6: SinCosPair,
                          prune_tol: float | None = None) -> list:
    """Joint 1 (up to two branches) then joint 5 for the coplanar special case."""
    out = []
    for t1 in theta1_from_special(geom, point, t2, t3):
        if prune_tol is not None and wrist_xy_residual(geom, point, t1, t2, t3) > prune_tol:
            continue
        try:
            out.append((t1, theta5_from_special(pose, t1, t6)))
        except ChainRejection:
            continue
    return out


# ---------------------------------------------------------------------------
# consistency residuals used for early pruning


def wrist_xy_residual(geom, point, t1: SinCosPair, t2: SinCosPair, t3: SinCosPair) -> float:
    """Mismatch of the horizontal coordinates of P predicted by joints 1-3."""
    L = _lengths(geom)
    x, y = float(point[0]), float(point[1])
    s23 = t2.s * t3.c + t2.c * t3.s
    reach = L.a2 * t2.s + L.a3 * s23
    px = L.d4 * t1.s - t1.c * reach
    py = -L.d4 * t1.c - t1.s * reach
    return max(abs(px - x), abs(py - y))


def offset_residual(geom, point, t1: SinCosPair) -> float:
    """|y c1 - x s1 + d4|, the lateral offset of P from joint 1's plane."""
    L = _lengths(geom)
    return abs(float(point[1]) * t1.c - float(point[0]) * t1.s + L.d4)


def approach_residual(pose: Pose, t1, t2, t3, t4, t6) -> float:
    """Mismatch of joint 5's axis direction between the arm and the flange."""
    s234 = math.sin(t2.theta + t3.theta + t4.theta)
    c234 = math.cos(t2.theta + t3.theta + t4.theta)
    w = -pose.m * t6.c - pose.l * t6.s
    pred = np.array([-t1.c * s234, -t1.s * s234, c234])
    return float(np.max(np.abs(pred - w)))


# ---------------------------------------------------------------------------
# candidate enumeration


@dataclass(frozen=True)
class ChainCandidate:
    pairs: tuple  # six SinCosPair, joint 1 first
    signs: tuple  # branch indices taken at each two-way step

    @property
    def theta(self) -> tuple:
        return tuple(p.theta for p in self.pairs)


def generic_candidates(pose: Pose, point, geom, prune_tol: float | None = 1e-4) -> list:
    """All branch combinations of the generic order (6, 5+1, 3, 2, 4)."""
    L = _lengths(geom)
    t6 = theta6_from_point(pose, point, L)
    out = []
    for i51, (t5, t1) in enumerate(theta5_theta1_generic(pose, point, L)):
        if prune_tol is not None and offset_residual(L, point, t1) > prune_tol:
            continue
        for i3, t3 in enumerate(theta3_from_point(L, point)):
            for i2, t2 in enumerate(theta2_from_point(L, point, t3)):
                if prune_tol is not None and wrist_xy_residual(L, point, t1, t2, t3) > prune_tol:
                    continue
                for i4, t4 in enumerate(theta4_from_chain(pose, t2, t3, t6)):
                    if prune_tol is not None and approach_residual(pose, t1, t2, t3, t4, t6) > prune_tol:
                        continue
                    out.append(ChainCandidate((t1, t2, t3, t4, t5, t6), (i51, i3, i2, i4)))
    return out


def special_candidates(pose: Pose, point, geom, prune_tol: float | None = 1e-4) -> list:
    """All branch combinations of the coplanar order (6, 3, 2, 1, 4, 5)."""
    L = _lengths(geom)
    t6 = theta6_from_point(pose, point, L)
    out = []
    for i3, t3 in enumerate(theta3_from_point(L, point)):
        for i2, t2 in enumerate(theta2_from_point(L, point, t3)):
            for i1, (t1, t5) in enumerate(theta1_theta5_special(pose, point, L, t2, t3, t6, prune_tol)):
                for i4, t4 in enumerate(theta4_from_chain(pose, t2, t3, t6)):
                    if prune_tol is not None and approach_residual(pose, t1, t2, t3, t4, t6) > prune_tol:
                        continue
                    out.append(ChainCandidate((t1, t2, t3, t4, t5, t6), (i1, i3, i2, i4)))
    return out
