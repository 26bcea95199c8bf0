"""Top-level inverse kinematics: pose -> verified joint-angle sets.

Dispatch on the rationalized approach vector n:

* n3 != 0: generic system, generic chain;
* n3 == 0, P coplanar with n: parallel special system, coplanar chain;
* n3 == 0, P off that plane: nonparallel special system (a circle of wrist
  points, i.e. a self-motion), sampled and run through the generic chain.

Poses with |n3| within ``horizontal_eps`` of zero are routed through both the
generic and the horizontal branches; forward-kinematics verification and
deduplication merge the results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from ..algebra.ratfunc import DegeneratePointError
from ..algebra.groebner import ResourceCaps, ResourceLimitExceeded, buchberger
from ..algebra.triangular import PositiveDimensionalError, solve_triangular
from ..kinematics import JointConfig, Pose, RobotGeometry, chain_transforms, forward_kinematics, validate_pose
from . import chain
from .rationalize import RationalPose, horizontal_pose, rationalize_pose
from .systems import (
    POINT_ORDER,
    SpecialPoseError,
    build_generic_system,
    build_nonparallel_special_system,
    build_parallel_special_system,
    offset_condition,
    residuals,
)

MODES = ("direct", "template", "cgs", "groebner-sincos")


class PoseValidationError(ValueError):
    """The requested pose is not a rigid frame."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid pose: " + ", ".join(self.violations))


@dataclass(frozen=True)
class SolverOptions:
    mode: str = "direct"
    tol_mm: float = 0.1
    tol_rot: float = 1e-4
    strict: bool = True
    dedup_tol: float = 1e-6
    horizontal_eps: float = 1e-9
    offset_eps: float = 1e-6
    prune_tol: float | None = 1e-4
    candidate_cap: int = 64  # per wrist point
    snap_tol: float = 1e-10
    root_tol: float = 1e-12
    pose_tol: float = 1e-9
    caps: ResourceCaps = ResourceCaps(max_pairs=5000, max_degree=40, max_seconds=30.0)
    drop_out_of_limits: bool = False
    self_motion_samples: int = 24

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown solver mode {self.mode!r}; choose from {MODES}")
        for name in ("tol_rot", "dedup_tol", "snap_tol", "root_tol", "pose_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.tol_mm < 0:
            raise ValueError("tol_mm must be non-negative")


@dataclass(frozen=True)
class IntersectionPoint:
    x: float
    y: float
    z: float
    system: str = "generic"
    path: str = "direct"

    def __iter__(self):
        return iter((self.x, self.y, self.z))

    def __getitem__(self, i):
        return (self.x, self.y, self.z)[i]

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True)
class BranchRecord:
    case: str  # generic | coplanar | self-motion
    system: str  # generic | parallel | nonparallel
    signs: tuple = ()
    chain: str = "closed-form"  # closed-form | sincos-direct | sincos-template
    path: str = "direct"  # how P was obtained

    def as_dict(self) -> dict:
        return {"case": self.case, "system": self.system, "signs": list(self.signs),
                "chain": self.chain, "path": self.path}


@dataclass(frozen=True)
class FkResidual:
    position_mm: float
    orientation: float

    def as_dict(self) -> dict:
        return {"position_mm": self.position_mm, "orientation": self.orientation}


@dataclass(frozen=True)
class IkCandidate:
    pairs: tuple
    branch: BranchRecord
    point: IntersectionPoint
    residual: FkResidual | None = None
    in_limits: bool | None = None

    @property
    def theta(self) -> tuple:
        return tuple(p.theta for p in self.pairs)

    def joints(self) -> JointConfig:
        return JointConfig(self.theta)

    def as_dict(self) -> dict:
        out = {"theta": list(self.theta), "branch": self.branch.as_dict(),
               "point": [self.point.x, self.point.y, self.point.z]}
        if self.residual is not None:
            out["fk_residual_mm"] = self.residual.position_mm
            out["fk_residual_rot"] = self.residual.orientation
        if self.in_limits is not None:
            out["in_limits"] = self.in_limits
        return out


@dataclass
class IkSolutionSet:
    verified: list = field(default_factory=list)
    rejected: list = field(default_factory=list)  # (IkCandidate, FkResidual)
    flags: set = field(default_factory=set)
    notes: list = field(default_factory=list)
    points: list = field(default_factory=list)

    def __len__(self):
        return len(self.verified)

    def __iter__(self):
        return iter(self.verified)

    @property
    def thetas(self) -> list:
        return [c.theta for c in self.verified]

    def cases(self) -> set:
        return {c.branch.case for c in self.verified}

    def contains(self, q, tol: float = 1e-6) -> bool:
        q = JointConfig(tuple(q))
        return any(q.distance(c.theta) < tol for c in self.verified)

    def as_dict(self) -> dict:
        return {
            "solutions": [c.as_dict() for c in self.verified],
            "rejected": len(self.rejected),
            "flags": sorted(self.flags),
            "notes": list(self.notes),
        }


# ---------------------------------------------------------------------------
# verification


def verify_fk(geom: RobotGeometry, candidate, pose: Pose, tol_mm: float = 0.1,
              strict: bool = True, tol_rot: float = 1e-4) -> tuple:
    """Accept a candidate when FK reproduces the pose.

    Position error must be below ``tol_mm`` (strictly, so ``tol_mm = 0``
    accepts nothing but an exact hit); in strict mode the largest entry of the
    rotation difference must also stay below ``tol_rot``.  Returns
    ``(accepted, FkResidual)``.
    """
    theta = candidate.theta if hasattr(candidate, "theta") else tuple(candidate)
    if not all(math.isfinite(t) for t in theta):
        return False, FkResidual(math.inf, math.inf)
    got = forward_kinematics(geom, theta)
    pos = float(np.max(np.abs(got.p - pose.p)))
    rot = float(np.max(np.abs(got.rotation - pose.rotation)))
    res = FkResidual(pos, rot)
    ok = pos < tol_mm or (tol_mm == 0 and pos == 0.0)
    if strict:
        ok = ok and rot < tol_rot
    return ok, res


def _verify_all(geom: RobotGeometry, candidates: list, pose: Pose, options: SolverOptions) -> list:
    """:func:`verify_fk` for a batch of candidates with one vectorized FK."""
    if not candidates:
        return []
    Q = np.array([c.theta for c in candidates], dtype=float)
    finite = np.all(np.isfinite(Q), axis=1)
    T = chain_transforms(geom, np.where(finite[:, None], Q, 0.0))
    pos = np.max(np.abs(T[:, :3, 3] - pose.p), axis=1)
    rot = np.max(np.abs(T[:, :3, :3] - pose.rotation), axis=(1, 2))
    out = []
    for f, pe, re in zip(finite, pos.tolist(), rot.tolist()):
        if not f:
            out.append((False, FkResidual(math.inf, math.inf)))
            continue
        ok = pe < options.tol_mm or (options.tol_mm == 0 and pe == 0.0)
        if options.strict:
            ok = ok and re < options.tol_rot
        out.append((ok, FkResidual(pe, re)))
    return out


def _dedupe(cands: list, tol: float) -> list:
    kept: list = []
    for c in sorted(cands, key=lambda c: c.residual.position_mm):
        q = JointConfig(c.theta)
        if any(q.distance(k.theta) < tol for k in kept):
            continue
        kept.append(c)
    kept.sort(key=lambda c: c.theta)
    return kept


# ---------------------------------------------------------------------------
# intersection points


def _direct_points(polys, options: SolverOptions) -> list:
    gb = buchberger(polys, POINT_ORDER, caps=options.caps)
    sols = solve_triangular(gb, refine_to=options.root_tol)
    out = []
    for s in sols.as_dicts():
        out.append((s["x"], s["y"], s["z"]))
    return out


def _points_for(system: str, rpose: RationalPose, geom, template, options: SolverOptions, flags: set) -> tuple:
    """Solve one system; returns (points, path)."""
    n, p = rpose.n, rpose.p
    if template is not None and options.mode in ("template", "cgs"):
        try:
            got = template.solve(system, n, p, options)
        except DegeneratePointError:
            flags.add(f"direct-fallback:{system}")
            got = None
        if got is not None:
            return got
    if system == "generic":
        polys = build_generic_system(geom, n, p)
    elif system == "parallel":
        polys = build_parallel_special_system(geom, n, p)
    else:
        polys = build_nonparallel_special_system(geom, n, p)
    return _direct_points(polys, options), "direct"


def _circle_samples(geom, rpose: RationalPose, count: int) -> list:
    """Representative wrist points on the circle of a horizontal self-motion."""
    n = np.array([float(v) for v in rpose.n])
    p = np.array([float(v) for v in rpose.p])
    center = p - float(geom.d6) * n
    side = np.array([-n[1], n[0], 0.0])
    up = np.array([0.0, 0.0, 1.0])
    r = float(geom.d5)
    out = []
    for k in range(count):
        phi = 2 * math.pi * k / count
        if abs(math.cos(phi)) < 1e-9:
            continue  # those two points are coplanar and handled separately
        out.append(tuple(center + r * (math.cos(phi) * side + math.sin(phi) * up)))
    return out


def solve_intersection(template, geom: RobotGeometry, pose: Pose, options: SolverOptions | None = None) -> list:
    """All real wrist points for a pose, across the branches that apply."""
    options = options or SolverOptions()
    points, _flags, _notes = _intersections(template, geom, pose, options)
    return [pt for pt, _rp in points]


def _intersections(template, geom, pose: Pose, options: SolverOptions) -> tuple:
    flags: set = set()
    notes: list = []
    found: list = []  # (IntersectionPoint, RationalPose)
    n3 = float(pose.n[2])
    generic_pose = rationalize_pose(pose, options.snap_tol)
    near_horizontal = abs(n3) <= options.horizontal_eps
    if near_horizontal:
        flags.add("near-horizontal")

    def run(system, rp):
        try:
            pts, path = _points_for(system, rp, geom, template, options, flags)
        except ResourceLimitExceeded as exc:
            flags.add(f"resource-cap:{system}")
            notes.append(f"{system}: {exc}")
            return None
        except PositiveDimensionalError:
            return "positive"
        for x, y, z in pts:
            found.append((IntersectionPoint(x, y, z, system, path), rp))
        return pts

    if generic_pose.n[2] != 0:
        run("generic", generic_pose)
    if near_horizontal:
        hp = horizontal_pose(pose, options.snap_tol)
        got = run("parallel", hp)
        if got == "positive":
            flags.add("underdetermined special pose")
        # nonparallel case: needs n1 p1 + n2 p2 - d6 = +-d4 (within offset_eps)
        n1, n2 = hp.n[0], hp.n[1]
        h = n1 * hp.p[0] + n2 * hp.p[1] - geom.d6
        for sign in (1, -1):
            gap = sign * geom.d4 - h
            if abs(gap) <= options.offset_eps:
                shift = Fraction(gap) / (n1 * n1 + n2 * n2)
                adj = tuple(pi + shift * ni for pi, ni in zip(hp.p, hp.n))
                ap = RationalPose(pose, hp.n, adj)
                assert offset_condition(geom, ap.n, ap.p) == sign
                got = run("nonparallel", ap)
                if got == "positive":
                    flags.add("self-motion")
                    # the extra quartic differs by whether n2 vanishes; keep it on record
                    path = "circle-sample:" + ("n2zero" if ap.n[1] == 0 else "n2")
                    for pt in _circle_samples(geom, ap, options.self_motion_samples):
                        found.append((IntersectionPoint(*pt, "nonparallel", path), ap))
    return found, flags, notes


# ---------------------------------------------------------------------------
# top level


def _closed_form(pose, geom, point: IntersectionPoint, options) -> list:
    out = []
    try:
        if point.system == "parallel":
            raw = chain.special_candidates(pose, tuple(point), geom, options.prune_tol)
            case = "coplanar"
        else:
            raw = chain.generic_candidates(pose, tuple(point), geom, options.prune_tol)
            case = "self-motion" if point.path.startswith("circle-sample") else "generic"
    except chain.ChainRejection:
        return out
    for rc in raw:
        out.append(IkCandidate(rc.pairs, BranchRecord(case, point.system, rc.signs, "closed-form", point.path), point))
    return out


def _wants_sincos(template, options) -> bool:
    if options.mode == "groebner-sincos":
        return True
    return options.mode == "template" and template is not None and template.has_sincos()


def solve_ik(template, geom: RobotGeometry, pose: Pose, options: SolverOptions | None = None) -> IkSolutionSet:
    """All verified joint configurations reaching ``pose``."""
    options = options or SolverOptions()
    bad = validate_pose(pose, options.pose_tol)
    if bad:
        raise PoseValidationError(bad)
    found, flags, notes = _intersections(template, geom, pose, options)
    result = IkSolutionSet(flags=flags, notes=notes, points=[pt for pt, _ in found])

    candidates: list = []
    for point, _rp in found:
        got = None
        if point.system != "parallel" and _wants_sincos(template, options):
            from .sincos import sincos_candidates

            use_template = template if options.mode == "template" else None
            try:
                got = sincos_candidates(pose, point, geom, use_template, options)
            except ResourceLimitExceeded as exc:
                flags.add("resource-cap:sincos")
                notes.append(f"sincos: {exc}")
            if got is None:
                flags.add("sincos-fallback")
        got = got if got is not None else _closed_form(pose, geom, point, options)
        # the cap is per wrist point, so a noisy point cannot crowd out another branch
        if len(got) > options.candidate_cap:
            flags.add("candidate-cap")
            notes.append(f"{len(got)} candidates at one wrist point truncated to {options.candidate_cap}")
            got = got[: options.candidate_cap]
        candidates.extend(got)

    accepted = []
    for cand, (ok, res) in zip(candidates, _verify_all(geom, candidates, pose, options)):
        inside = geom.within_limits(cand.theta)
        cand = replace(cand, residual=res, in_limits=inside)
        if ok and (inside or not options.drop_out_of_limits):
            accepted.append(cand)
        else:
            result.rejected.append((cand, res))
    result.verified = _dedupe(accepted, options.dedup_tol)
    return result


def point_residuals(geom, rpose: RationalPose, point) -> dict:
    return residuals(geom, rpose.n, rpose.p, point)
