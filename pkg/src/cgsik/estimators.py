"""scikit-learn style wrappers around forward and inverse kinematics.

``ForwardKinematics`` is a stateless transformer from joint angles to poses.
``InverseKinematics`` does its expensive work in ``fit`` (loading or building
the solver template for a geometry) and then maps poses to solution sets in
``predict``::

    ik = InverseKinematics(profile="testbot", mode="template").fit()
    [solutions] = ik.predict([[65, -65, 411, 0, 0, 0]])
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .iksolver.solver import MODES, SolverOptions, solve_ik
from .iksolver.template import COMPONENTS, FAST_COMPONENTS, SolverTemplate
from .kinematics import Pose, RobotGeometry, forward_kinematics

OUTPUTS = ("rpy", "matrix")


def _geometry(profile) -> RobotGeometry:
    if isinstance(profile, RobotGeometry):
        return profile
    return RobotGeometry.load(profile)


def as_poses(X) -> list:
    """Poses from ``Pose`` objects, 4x4 matrices, or rows of 6 (position, RPY)
    or 12 (l, m, n, p columns) numbers."""
    if isinstance(X, Pose):
        return [X]
    items = list(X)
    out = []
    for item in items:
        if isinstance(item, Pose):
            out.append(item)
            continue
        a = np.asarray(item, dtype=float)
        if a.shape == (4, 4):
            out.append(Pose.from_matrix(a))
        elif a.shape == (6,):
            out.append(Pose.from_rpy(a[:3], a[3:]))
        elif a.shape == (12,):
            out.append(Pose(a[0:3], a[3:6], a[6:9], a[9:12]))
        else:
            raise ValueError(f"cannot read a pose from an array of shape {a.shape}")
    return out


class ForwardKinematics(TransformerMixin, BaseEstimator):
    """Joint angles (n, 6) in radians -> poses.

    ``output="rpy"`` yields rows ``(p1, p2, p3, alpha, beta, gamma)``;
    ``output="matrix"`` yields an (n, 4, 4) stack of homogeneous transforms.
    """

    def __init__(self, profile="testbot", output="rpy"):
        self.profile = profile
        self.output = output

    def fit(self, X=None, y=None):
        if self.output not in OUTPUTS:
            raise ValueError(f"output must be one of {OUTPUTS}")
        self.geometry_ = _geometry(self.profile)
        return self

    def transform(self, X):
        check_is_fitted(self, "geometry_")
        Q = np.atleast_2d(np.asarray(X, dtype=float))
        if Q.shape[1] != 6:
            raise ValueError(f"expected 6 joint angles per row, got {Q.shape[1]}")
        poses = [forward_kinematics(self.geometry_, q) for q in Q]
        if self.output == "matrix":
            return np.stack([p.matrix for p in poses])
        return np.array([[*p.p, *p.rpy()] for p in poses])

    def poses(self, X) -> list:
        check_is_fitted(self, "geometry_")
        return [forward_kinematics(self.geometry_, q) for q in np.atleast_2d(np.asarray(X, dtype=float))]


class InverseKinematics(BaseEstimator):
    """Poses -> verified joint solutions.

    ``fit`` prepares the solver template: the bundled one for a built-in
    profile, the file at ``template_path`` when given, or a fresh build of
    ``components`` ("fast" skips the slow generic basis, "all" builds it).
    Modes ``direct`` and ``groebner-sincos`` need no template.
    """

    def __init__(self, profile="testbot", mode="template", tol_mm=0.1, root_tol=1e-12, dedup_tol=1e-6,
                 template_path=None, components="fast", drop_out_of_limits=False):
        self.profile = profile
        self.mode = mode
        self.tol_mm = tol_mm
        self.root_tol = root_tol
        self.dedup_tol = dedup_tol
        self.template_path = template_path
        self.components = components
        self.drop_out_of_limits = drop_out_of_limits

    def _template(self, geom):
        if self.mode in ("direct", "groebner-sincos"):
            return SolverTemplate.direct(geom)
        if self.template_path is not None:
            return SolverTemplate.load(self.template_path, geom)
        if self.components == "fast" or self.components == "all":
            bundled = SolverTemplate.bundled(geom)
            if bundled is not None:
                return bundled
        comps = {"fast": FAST_COMPONENTS, "all": COMPONENTS}.get(self.components, self.components)
        return SolverTemplate.build(geom, tuple(comps))

    def fit(self, X=None, y=None):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; choose from {MODES}")
        self.geometry_ = _geometry(self.profile)
        self.options_ = SolverOptions(mode=self.mode, tol_mm=self.tol_mm, root_tol=self.root_tol,
                                      dedup_tol=self.dedup_tol, drop_out_of_limits=self.drop_out_of_limits)
        self.template_ = self._template(self.geometry_).warm()
        return self

    def solve(self, pose: Pose):
        check_is_fitted(self, "template_")
        return solve_ik(self.template_, self.geometry_, pose, self.options_)

    def predict(self, X) -> list:
        """One :class:`IkSolutionSet` per pose."""
        return [self.solve(p) for p in as_poses(X)]

    def score(self, X, y=None) -> float:
        """Fraction of poses with at least one verified solution."""
        sets = self.predict(X)
        return sum(1 for s in sets if len(s)) / len(sets) if sets else 0.0
