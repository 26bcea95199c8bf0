"""Kinematic model of the six-joint chain.

Frames follow the DH convention with one extra rotation ``delta`` about the
new z-axis (the RViz frame offset), so each joint transform is
``Rz(theta) Tz(d) Tx(a) Rx(alpha) Rz(delta)``.  Lengths are millimetres,
angles radians.
"""

from __future__ import annotations

import configparser
import hashlib
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

TWO_PI = 2.0 * math.pi

ROW_KEYS = ("a", "alpha", "d", "delta")


class ProfileError(ValueError):
    """A geometry profile is malformed or violates the chain's structure."""


# ---------------------------------------------------------------------------
# angle strings

_ANGLE_RE = re.compile(
    r"^\s*(?P<sign>[+-])?\s*(?:(?P<coef>\d+(?:\.\d+)?)\s*\*?\s*)?pi(?:\s*/\s*(?P<den>\d+))?\s*$"
)


def parse_angle(text: str) -> float:
    """Parse ``pi/2``, ``-pi``, ``3*pi/4``, ``165deg`` or a plain radian value."""
    s = text.strip().lower()
    if s.endswith("deg"):
        return math.radians(float(Fraction(s[:-3].strip())))
    m = _ANGLE_RE.match(s)
    if m:
        coef = Fraction(m.group("coef") or 1)
        den = int(m.group("den") or 1)
        val = float(coef / den) * math.pi
        return -val if m.group("sign") == "-" else val
    try:
        return float(Fraction(s))
    except ValueError as exc:
        raise ProfileError(f"cannot parse angle {text!r}") from exc


def normalize_angle(theta: float) -> float:
    """Map an angle to (-pi, pi]."""
    t = math.fmod(theta, TWO_PI)
    if t <= -math.pi:
        t += TWO_PI
    elif t > math.pi:
        t -= TWO_PI
    return t


# ---------------------------------------------------------------------------
# geometry


@dataclass(frozen=True)
class DHRow:
    a: Fraction
    alpha: float
    d: Fraction
    delta: float
    alpha_text: str = "0"
    delta_text: str = "0"


# expected (alpha, delta) per joint and which of a/d must vanish
_STRUCTURE = (
    (math.pi / 2, -math.pi / 2, True, False),
    (0.0, 0.0, False, True),
    (0.0, -math.pi / 2, False, True),
    (math.pi / 2, math.pi / 2, True, False),
    (-math.pi / 2, 0.0, True, False),
    (0.0, 0.0, True, False),
)


@dataclass(frozen=True)
class RobotGeometry:
    """Six DH/RViz rows plus joint limits.

    ``rows[i]`` holds ``(a, alpha, d, delta)`` for joint ``i + 1``; lengths are
    exact rationals parsed from decimal strings so the solver can build its
    polynomial systems without rounding.
    """

    name: str
    rows: tuple
    limits: tuple
    source: str = ""

    def __post_init__(self):
        if len(self.rows) != 6:
            raise ProfileError("geometry needs exactly six joint rows")
        if len(self.limits) != 6:
            raise ProfileError("geometry needs six joint limits")
        for i, (lo, hi) in enumerate(self.limits, 1):
            if not lo < hi:
                raise ProfileError(f"joint {i}: lower limit must be below upper limit")

    # symbols of the closed-form chain (a2, a3 are the magnitudes of the
    # negative row entries)
    @property
    def d1(self) -> Fraction:
        return self.rows[0].d

    @property
    def a2(self) -> Fraction:
        return -self.rows[1].a

    @property
    def a3(self) -> Fraction:
        return -self.rows[2].a

    @property
    def d4(self) -> Fraction:
        return self.rows[3].d

    @property
    def d5(self) -> Fraction:
        return self.rows[4].d

    @property
    def d6(self) -> Fraction:
        return self.rows[5].d

    def link_lengths(self) -> dict:
        return {k: getattr(self, k) for k in ("d1", "a2", "a3", "d4", "d5", "d6")}

    def structure_violations(self) -> list:
        """Ways in which the rows depart from the layout the IK solver assumes."""
        out = []
        for i, (row, (alpha, delta, a_zero, d_zero)) in enumerate(zip(self.rows, _STRUCTURE), 1):
            if abs(row.alpha - alpha) > 1e-12:
                out.append(f"joint {i}: alpha must be {alpha:+.6f}")
            if abs(row.delta - delta) > 1e-12:
                out.append(f"joint {i}: delta must be {delta:+.6f}")
            if a_zero and row.a != 0:
                out.append(f"joint {i}: a must be 0")
            if d_zero and row.d != 0:
                out.append(f"joint {i}: d must be 0")
        if self.a2 == 0 or self.a3 == 0:
            out.append("joints 2 and 3 need nonzero link lengths")
        if self.d5 == 0:
            out.append("joint 5 needs a nonzero offset")
        return out

    def within_limits(self, theta, slack: float = 1e-9) -> bool:
        return all(lo - slack <= t <= hi + slack for t, (lo, hi) in zip(theta, self.limits))

    def reach(self) -> float:
        """Crude upper bound on |p - base| used as a sanity envelope."""
        return float(abs(self.d1) + abs(self.a2) + abs(self.a3) + abs(self.d4) + abs(self.d5) + abs(self.d6))

    def digest(self) -> str:
        return hashlib.sha256(self.source.encode()).hexdigest()[:16]

    # -- profile files -----------------------------------------------------

    @classmethod
    def from_text(cls, text: str, name: str | None = None) -> "RobotGeometry":
        cp = configparser.ConfigParser()
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ProfileError(str(exc)) from exc
        name = cp.get("robot", "name", fallback=name or "unnamed")
        rows, limits = [], []
        for i in range(1, 7):
            sec = f"joint{i}"
            if not cp.has_section(sec):
                raise ProfileError(f"missing section [{sec}]")
            s = cp[sec]
            try:
                a = Fraction(s["a"])
                d = Fraction(s["d"])
            except (KeyError, ValueError) as exc:
                raise ProfileError(f"[{sec}] needs exact decimal a and d") from exc
            alpha_t, delta_t = s.get("alpha", "0"), s.get("delta", "0")
            rows.append(DHRow(a, parse_angle(alpha_t), d, parse_angle(delta_t), alpha_t, delta_t))
            lo = parse_angle(s.get("lower", "-pi"))
            hi = parse_angle(s.get("upper", "pi"))
            limits.append((lo, hi))
        return cls(name, tuple(rows), tuple(limits), text)

    @classmethod
    def from_file(cls, path) -> "RobotGeometry":
        path = Path(path)
        return cls.from_text(path.read_text(), name=path.stem)

    @classmethod
    def builtin(cls, name: str) -> "RobotGeometry":
        try:
            text = resources.files("cgsik.profiles").joinpath(f"{name}.ini").read_text()
        except FileNotFoundError as exc:
            raise ProfileError(f"no built-in profile named {name!r}") from exc
        return cls.from_text(text, name=name)

    @classmethod
    def load(cls, name_or_path) -> "RobotGeometry":
        """Built-in profile name or path to a profile file."""
        p = Path(str(name_or_path))
        if p.suffix or p.exists():
            return cls.from_file(p)
        return cls.builtin(str(name_or_path))


def builtin_profiles() -> list:
    return sorted(
        Path(f.name).stem
        for f in resources.files("cgsik.profiles").iterdir()
        if f.name.endswith(".ini")
    )


# ---------------------------------------------------------------------------
# joint configurations and poses


@dataclass(frozen=True)
class JointConfig:
    """Six joint angles, normalized to (-pi, pi] on construction."""

    theta: tuple

    def __post_init__(self):
        t = tuple(normalize_angle(float(v)) for v in self.theta)
        if len(t) != 6:
            raise ValueError("a joint configuration has six angles")
        object.__setattr__(self, "theta", t)

    def __iter__(self):
        return iter(self.theta)

    def __getitem__(self, i):
        return self.theta[i]

    def as_array(self) -> np.ndarray:
        return np.array(self.theta)

    def distance(self, other) -> float:
        """Largest per-joint angular difference, wrapping around the circle."""
        return max(abs(normalize_angle(a - b)) for a, b in zip(self.theta, other))


def _frozen(v) -> np.ndarray:
    a = np.array(v, dtype=float).reshape(3)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Pose:
    """End-effector frame: rotation columns ``l, m, n`` and position ``p``."""

    l: np.ndarray
    m: np.ndarray
    n: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        for k in ("l", "m", "n", "p"):
            object.__setattr__(self, k, _frozen(getattr(self, k)))

    @classmethod
    def from_matrix(cls, T) -> "Pose":
        T = np.asarray(T, dtype=float)
        return cls(T[:3, 0], T[:3, 1], T[:3, 2], T[:3, 3])

    @classmethod
    def from_rpy(cls, position, rpy) -> "Pose":
        l, m, n = rpy_to_rotation(*rpy)
        return cls(l, m, n, position)

    @property
    def rotation(self) -> np.ndarray:
        return np.column_stack([self.l, self.m, self.n])

    @property
    def matrix(self) -> np.ndarray:
        T = np.eye(4)
        T[:3, :3] = self.rotation
        T[:3, 3] = self.p
        return T

    def rpy(self) -> tuple:
        return rotation_to_rpy(self.l, self.m, self.n)[:3]

    def as_dict(self) -> dict:
        return {k: [float(x) for x in getattr(self, k)] for k in ("l", "m", "n", "p")}


# ---------------------------------------------------------------------------
# transforms


def dh_matrix(a: float, alpha: float, d: float, delta: float, theta: float) -> np.ndarray:
    """Joint transform ``Rz(theta) Tz(d) Tx(a) Rx(alpha) Rz(delta)``."""
    ct, st = math.cos(theta), math.sin(theta)
    ca, sa = math.cos(alpha), math.sin(alpha)
    cd, sd = math.cos(delta), math.sin(delta)
    return np.array(
        [
            [cd * ct - ca * sd * st, -ca * cd * st - sd * ct, sa * st, a * ct],
            [ca * sd * ct + cd * st, ca * cd * ct - sd * st, -sa * ct, a * st],
            [sa * sd, sa * cd, ca, d],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def joint_transform(geom: RobotGeometry, i: int, theta_i: float) -> np.ndarray:
    """4x4 transform of joint ``i`` (1-based) at angle ``theta_i``."""
    if not 1 <= i <= 6:
        raise IndexError(f"joint index {i} outside 1..6")
    r = geom.rows[i - 1]
    return dh_matrix(float(r.a), r.alpha, float(r.d), r.delta, theta_i)


def chain_transform(geom: RobotGeometry, theta, upto: int = 6) -> np.ndarray:
    """Product of the first ``upto`` joint transforms."""
    T = np.eye(4)
    for i in range(upto):
        T = T @ joint_transform(geom, i + 1, theta[i])
    return T


def chain_transforms(geom: RobotGeometry, thetas) -> np.ndarray:
    """Full-chain transforms of many joint tuples at once, shape (k, 4, 4)."""
    Q = np.asarray(thetas, dtype=float).reshape(-1, 6)
    T = np.broadcast_to(np.eye(4), (len(Q), 4, 4)).copy()
    for i, r in enumerate(geom.rows):
        ct, st = np.cos(Q[:, i]), np.sin(Q[:, i])
        ca, sa = math.cos(r.alpha), math.sin(r.alpha)
        cd, sd = math.cos(r.delta), math.sin(r.delta)
        A = np.zeros((len(Q), 4, 4))
        A[:, 0, 0] = cd * ct - ca * sd * st
        A[:, 0, 1] = -ca * cd * st - sd * ct
        A[:, 0, 2] = sa * st
        A[:, 0, 3] = float(r.a) * ct
        A[:, 1, 0] = ca * sd * ct + cd * st
        A[:, 1, 1] = ca * cd * ct - sd * st
        A[:, 1, 2] = -sa * ct
        A[:, 1, 3] = float(r.a) * st
        A[:, 2, 0] = sa * sd
        A[:, 2, 1] = sa * cd
        A[:, 2, 2] = ca
        A[:, 2, 3] = float(r.d)
        A[:, 3, 3] = 1.0
        T = T @ A
    return T


def forward_kinematics(geom: RobotGeometry, q) -> Pose:
    theta = q.theta if isinstance(q, JointConfig) else tuple(q)
    return Pose.from_matrix(chain_transform(geom, theta))


def wrist_point(geom: RobotGeometry, q) -> np.ndarray:
    """Origin of frame 5, where the axes of joints 4 and 5 meet."""
    theta = q.theta if isinstance(q, JointConfig) else tuple(q)
    return chain_transform(geom, theta, upto=4)[:3, 3]


# ---------------------------------------------------------------------------
# roll-pitch-yaw


def rpy_to_rotation(alpha: float, beta: float, gamma: float) -> tuple:
    """Columns ``(l, m, n)`` of Rz(gamma) Ry(beta) Rx(alpha), transposed.

    The entries are laid out so that ``n = (-sin b, sin a cos b, cos a cos b)``.
    """
    ca, sa = math.cos(alpha), math.sin(alpha)
    cb, sb = math.cos(beta), math.sin(beta)
    cg, sg = math.cos(gamma), math.sin(gamma)
    l = np.array([cb * cg, sa * sb * cg - ca * sg, ca * sb * cg + sa * sg])
    m = np.array([cb * sg, sa * sb * sg + ca * cg, ca * sb * sg - sa * cg])
    n = np.array([-sb, sa * cb, ca * cb])
    return l, m, n


def rotation_to_rpy(l, m, n, gimbal_tol: float = 1e-9) -> tuple:
    """Inverse of :func:`rpy_to_rotation` on the principal branch.

    Returns ``(alpha, beta, gamma, gimbal_lock)``.  When ``|cos beta|`` is below
    ``gimbal_tol`` only ``alpha + gamma`` (or ``alpha - gamma``) is determined;
    alpha is then fixed to 0.
    """
    s = max(-1.0, min(1.0, -float(n[0])))
    beta = math.asin(s)
    cb = math.hypot(float(n[1]), float(n[2]))
    if cb < gimbal_tol:
        return 0.0, beta, math.atan2(-float(l[1]), float(m[1])), True
    alpha = math.atan2(float(n[1]), float(n[2]))
    gamma = math.atan2(float(m[0]), float(l[0]))
    return alpha, beta, gamma, False


# ---------------------------------------------------------------------------
# pose validation

RELATIONS = (
    "|l|=1",
    "|m|=1",
    "|n|=1",
    "l.m=0",
    "m.n=0",
    "n.l=0",
    "l=m x n",
    "m=n x l",
    "n=l x m",
)


def validate_pose(pose: Pose, tol: float = 1e-9) -> list:
    """Names of the violated frame relations (empty when the frame is valid)."""
    l, m, n = pose.l, pose.m, pose.n
    checks = (
        abs(l @ l - 1.0),
        abs(m @ m - 1.0),
        abs(n @ n - 1.0),
        abs(l @ m),
        abs(m @ n),
        abs(n @ l),
        float(np.max(np.abs(l - np.cross(m, n)))),
        float(np.max(np.abs(m - np.cross(n, l)))),
        float(np.max(np.abs(n - np.cross(l, m)))),
    )
    bad = [name for name, r in zip(RELATIONS, checks) if not r <= tol]
    if not np.all(np.isfinite(pose.p)):
        bad.append("p finite")
    return bad
