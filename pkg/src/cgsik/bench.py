"""Benchmark harness: round-trip accuracy, random-pose reachability, error rates.

A round trip samples joint angles uniformly within the limits, computes the
pose by forward kinematics, solves it back and checks the result.  A sample
counts as a success when some verified solution puts the end effector within
``tol_mm`` of the target; it is a "different solution" sample when it succeeds
but no returned tuple matches the original angles within ``match_tol`` rad.

Every trial draws from its own generator seeded with ``(seed, test, sample)``,
so a single trial can be replayed in isolation.  Wall times are the only
nondeterministic field; pass ``timer=None`` for byte-stable reports.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .iksolver.solver import SolverOptions, solve_ik
from .kinematics import JointConfig, Pose, RobotGeometry, forward_kinematics, normalize_angle

CHANNELS = ("alpha", "beta", "gamma", "p1", "p2", "p3")
ZERO_CHANNEL = 1e-9
MATCH_TOL = 1e-3
WARMUP = 10

ROUNDTRIP_COLUMNS = ("Test", "AvgTime", "Success", "DiffSoln", "AvgSoln")
POSE_COLUMNS = ("Test", "AvgTime", "Success", "AvgSoln")


@dataclass(frozen=True)
class WorkspaceBox:
    """Sampling region for random poses: a vertical cylinder about the base
    axis and a roll-pitch-yaw box."""

    radius: float = 280.0
    z_min: float = -150.0
    z_max: float = 410.0
    roll: tuple = (-math.pi, math.pi)
    pitch: tuple = (-math.pi / 2, math.pi / 2)
    yaw: tuple = (-math.pi, math.pi)

    def sample(self, rng: np.random.Generator) -> Pose:
        r = self.radius * math.sqrt(rng.uniform())
        phi = rng.uniform(-math.pi, math.pi)
        z = rng.uniform(self.z_min, self.z_max)
        rpy = (rng.uniform(*self.roll), rng.uniform(*self.pitch), rng.uniform(*self.yaw))
        return Pose.from_rpy((r * math.cos(phi), r * math.sin(phi), z), rpy)


@dataclass(frozen=True)
class ErrorRate:
    """Relative errors of the six pose channels for each returned solution.

    ``channels[i]`` holds the per-channel errors of solution ``i``,
    ``per_solution[i]`` their mean and ``E`` the mean over solutions.
    ``absolute`` names channels whose target was (near) zero, where the
    absolute error is used instead of the relative one.
    """

    channels: tuple
    per_solution: tuple
    E: float
    absolute: tuple = ()


def _channels(pose) -> tuple:
    if isinstance(pose, Pose):
        a, b, g = pose.rpy()
        return (a, b, g, *map(float, pose.p))
    v = tuple(float(x) for x in pose)
    if len(v) != 6:
        raise ValueError("a pose target has six channels (alpha, beta, gamma, p1, p2, p3)")
    return v


def error_metric(target, solutions) -> ErrorRate:
    """Mean relative error of the pose reproduced by each solution.

    ``target`` and each solution are a :class:`Pose` or six numbers
    ``(alpha, beta, gamma, p1, p2, p3)``.  Angle differences are wrapped to
    (-pi, pi] before dividing.
    """
    sols = list(solutions)
    if not sols:
        raise ValueError("the error rate needs at least one solution")
    x = _channels(target)
    absolute = tuple(name for name, v in zip(CHANNELS, x) if abs(v) < ZERO_CHANNEL)
    rows = []
    for s in sols:
        y = _channels(s)
        row = []
        for k, (xt, yt) in enumerate(zip(x, y)):
            diff = abs(normalize_angle(xt - yt)) if k < 3 else abs(xt - yt)
            row.append(diff if abs(xt) < ZERO_CHANNEL else diff / abs(xt))
        rows.append(tuple(row))
    per = tuple(sum(r) / 6.0 for r in rows)
    return ErrorRate(tuple(rows), per, sum(per) / len(per), absolute)


def sample_random_joints(geom: RobotGeometry, rng_seed) -> JointConfig:
    """Joint angles drawn uniformly and independently within each joint's limits."""
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    lo = np.array([a for a, _ in geom.limits])
    hi = np.array([b for _, b in geom.limits])
    return JointConfig(tuple(rng.uniform(lo, hi)))


@dataclass
class TrialRecord:
    test: int
    sample: int
    seed: list
    mode: str
    given: list
    seconds: float
    n_solutions: int
    success: bool
    matched: bool | None = None
    errors: list = field(default_factory=list)
    E: float | None = None
    flags: list = field(default_factory=list)

    def __post_init__(self):
        if self.seconds < 0 or self.n_solutions < 0:
            raise ValueError("times and counts are non-negative")
        if self.matched and self.n_solutions < 1:
            raise ValueError("a matched trial has at least one solution")


@dataclass
class TestRow:
    test: int
    avg_time: float
    success: int
    diff_soln: int | None
    avg_soln: float


def _rows(kind: str, trials: list) -> list:
    by_test: dict = {}
    for t in trials:
        by_test.setdefault(t.test, []).append(t)
    rows = []
    for k in sorted(by_test):
        ts = by_test[k]
        n = len(ts)
        diff = sum(1 for t in ts if t.success and not t.matched) if kind == "roundtrip" else None
        rows.append(TestRow(
            test=k,
            avg_time=sum(t.seconds for t in ts) / n,
            success=sum(1 for t in ts if t.success),
            diff_soln=diff,
            avg_soln=sum(t.n_solutions for t in ts) / n,
        ))
    return rows


@dataclass
class AccuracyReport:
    """Per-test aggregates with the trials they were computed from."""

    kind: str
    manifest: dict
    trials: list = field(default_factory=list)

    @property
    def rows(self) -> list:
        return _rows(self.kind, self.trials)

    @property
    def n_samples(self) -> int:
        return len(self.trials)

    @property
    def n_success(self) -> int:
        return sum(1 for t in self.trials if t.success)

    @property
    def n_failures(self) -> int:
        return self.n_samples - self.n_success

    @property
    def success_rate(self) -> float:
        return self.n_success / self.n_samples if self.trials else 0.0

    @property
    def avg_solutions(self) -> float:
        return sum(t.n_solutions for t in self.trials) / self.n_samples if self.trials else 0.0

    @property
    def avg_time(self) -> float:
        return sum(t.seconds for t in self.trials) / self.n_samples if self.trials else 0.0

    def error_fraction(self, below: float = 1e-6) -> float:
        """Share of all samples whose error rate E is below ``below``;
        samples without solutions count as failures."""
        if not self.trials:
            return 0.0
        return sum(1 for t in self.trials if t.E is not None and t.E < below) / self.n_samples

    def histogram(self) -> list:
        return error_histogram(self.trials)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "manifest": self.manifest,
            "rows": [asdict(r) for r in self.rows],
            "histogram": self.histogram(),
            "trials": [asdict(t) for t in self.trials],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AccuracyReport":
        return cls(data["kind"], data["manifest"], [TrialRecord(**t) for t in data["trials"]])


def error_histogram(trials, lo_exp: int = -17, hi_exp: int = 0) -> list:
    """Counts of E per decade [10^k, 10^(k+1)), split by whether the original
    angles were recovered.  Exact zeros and values beyond the range get their
    own end buckets."""
    edges = [None] + [10.0 ** k for k in range(lo_exp, hi_exp + 1)] + [None]
    buckets = []
    for a, b in zip(edges[:-1], edges[1:]):
        buckets.append({"lo": a, "hi": b, "matched": 0, "unmatched": 0})
    buckets[0]["lo"] = 0.0
    for t in trials:
        if t.E is None:
            continue
        if t.E == 0.0:
            i = 0
        elif t.E < edges[1]:
            i = 0
        else:
            i = min(len(buckets) - 1, int(math.floor(math.log10(t.E))) - lo_exp + 1)
        key = "matched" if t.matched or t.matched is None else "unmatched"
        buckets[i][key] += 1
    return buckets


def _manifest(kind: str, geom: RobotGeometry, template, options: SolverOptions, seed, n_tests, n_samples, **extra) -> dict:
    out = {
        "kind": kind,
        "seed": seed,
        "geometry": geom.name,
        "geometry_digest": geom.digest(),
        "mode": options.mode,
        "template": template.mode if template is not None else "direct",
        "template_fallbacks": template.fallbacks() if template is not None else [],
        "tol_mm": options.tol_mm,
        "root_tol": options.root_tol,
        "dedup_tol": options.dedup_tol,
        "n_tests": n_tests,
        "n_samples": n_samples,
        "version": __version__,
    }
    out.update(extra)
    return out


def _options(mode: str, options: SolverOptions | None) -> SolverOptions:
    if options is None:
        return SolverOptions(mode=mode)
    if options.mode != mode:
        from dataclasses import replace

        return replace(options, mode=mode)
    return options


def _warmup(template, geom, options, seed, count: int) -> None:
    rng = np.random.default_rng([seed, 2**31 - 1])
    for _ in range(count):
        q = sample_random_joints(geom, rng)
        solve_ik(template, geom, forward_kinematics(geom, q), options)


def _timed(timer, template, geom, pose, options):
    if timer is None:
        return solve_ik(template, geom, pose, options), 0.0
    t0 = timer()
    res = solve_ik(template, geom, pose, options)
    return res, max(0.0, timer() - t0)


def run_roundtrip(geom: RobotGeometry, template, n_tests: int, n_samples: int, mode: str = "template",
                  seed: int = 0, options: SolverOptions | None = None, match_tol: float = MATCH_TOL,
                  warmup: int = WARMUP, timer=time.perf_counter, progress=None) -> AccuracyReport:
    """FK -> IK -> compare over ``n_tests`` x ``n_samples`` random joint tuples."""
    if n_samples < 1 or n_tests < 1:
        raise ValueError("n_tests and n_samples must be at least 1")
    options = _options(mode, options)
    if warmup and timer is not None:
        _warmup(template, geom, options, seed, warmup)
    report = AccuracyReport("roundtrip", _manifest("roundtrip", geom, template, options, seed, n_tests, n_samples,
                                                   match_tol=match_tol))
    for test in range(1, n_tests + 1):
        for k in range(n_samples):
            s = [seed, test, k]
            q = sample_random_joints(geom, s)
            target = forward_kinematics(geom, q)
            res, dt = _timed(timer, template, geom, target, options)
            sols = res.verified
            success = any(c.residual.position_mm <= options.tol_mm for c in sols)
            matched = any(q.distance(c.theta) <= match_tol for c in sols)
            fk = [forward_kinematics(geom, c.theta) for c in sols]
            err = error_metric(target, fk) if fk else None
            report.trials.append(TrialRecord(
                test=test, sample=k, seed=s, mode=options.mode, given=list(q.theta), seconds=dt,
                n_solutions=len(sols), success=success, matched=matched,
                errors=list(err.per_solution) if err else [], E=err.E if err else None,
                flags=sorted(res.flags),
            ))
            if progress:
                progress(test, k)
    return report


def run_random_pose(geom: RobotGeometry, template, n_tests: int, n_samples: int,
                    workspace_box: WorkspaceBox | None = None, rng_seed: int = 0, mode: str = "template",
                    options: SolverOptions | None = None, timer=time.perf_counter, progress=None) -> AccuracyReport:
    """Count random poses in the workspace box with at least one verified solution."""
    if n_samples < 1 or n_tests < 1:
        raise ValueError("n_tests and n_samples must be at least 1")
    box = workspace_box or WorkspaceBox()
    options = _options(mode, options)
    report = AccuracyReport("pose", _manifest("pose", geom, template, options, rng_seed, n_tests, n_samples,
                                              box=asdict(box)))
    for test in range(1, n_tests + 1):
        for k in range(n_samples):
            s = [rng_seed, test, k]
            target = box.sample(np.random.default_rng(s))
            res, dt = _timed(timer, template, geom, target, options)
            sols = res.verified
            report.trials.append(TrialRecord(
                test=test, sample=k, seed=s, mode=options.mode, given=list(_channels(target)), seconds=dt,
                n_solutions=len(sols), success=bool(sols), flags=sorted(res.flags),
            ))
            if progress:
                progress(test, k)
    return report


def _csv_text(report: AccuracyReport) -> str:
    cols = ROUNDTRIP_COLUMNS if report.kind == "roundtrip" else POSE_COLUMNS
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    rows = report.rows
    for r in rows:
        vals = [r.test, f"{r.avg_time:.6f}", r.success, r.diff_soln, f"{r.avg_soln:.4f}"]
        if report.kind != "roundtrip":
            del vals[3]
        w.writerow(vals)
    if rows:
        n = len(rows)
        avg = ["Avg", f"{sum(r.avg_time for r in rows) / n:.6f}", f"{sum(r.success for r in rows) / n:.1f}",
               f"{sum(r.diff_soln or 0 for r in rows) / n:.1f}", f"{sum(r.avg_soln for r in rows) / n:.4f}"]
        if report.kind != "roundtrip":
            del avg[3]
        w.writerow(avg)
    return buf.getvalue()


def emit_report(report: AccuracyReport, format: str, path) -> Path:
    """Write the report as a table-shaped CSV or as full JSON (trials included)."""
    path = Path(path)
    if format == "csv":
        text = _csv_text(report)
    elif format == "json":
        text = json.dumps(report.as_dict(), sort_keys=True, indent=1) + "\n"
    elif format == "manifest":
        text = json.dumps(report.manifest, sort_keys=True, indent=1) + "\n"
    else:
        raise ValueError(f"unknown report format {format!r}")
    path.write_text(text)
    return path


def load_report(path) -> AccuracyReport:
    return AccuracyReport.from_dict(json.loads(Path(path).read_text()))
