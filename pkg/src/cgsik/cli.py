"""Command-line driver: ``cgsik fk | ik | precompute | bench``.

Exit codes: 0 success, 1 no solution, 2 usage or invalid input, 3 a
resource cap was hit.  Settings come from flags, then from an optional
``[solver]`` section of the profile file, then from built-in defaults.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import math
import sys
import time
from pathlib import Path

from .algebra.groebner import ResourceCaps, ResourceLimitExceeded
from .bench import WorkspaceBox, emit_report, run_random_pose, run_roundtrip
from .iksolver.solver import MODES, PoseValidationError, SolverOptions, solve_ik
from .iksolver.template import (
    COMPONENTS,
    DEFAULT_BUILD_CAPS,
    FAST_COMPONENTS,
    GENERIC_BUILD_CAPS,
    SolverTemplate,
    TemplateFormatError,
)
from .kinematics import Pose, ProfileError, RobotGeometry, forward_kinematics, validate_pose

EXIT_OK, EXIT_NONE, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3

DEFAULTS = {
    "mode": "template",
    "tol_mm": 0.1,
    "root_tol": 1e-12,
    "dedup_tol": 1e-6,
    "seed": 0,
    "template": None,
}

log = logging.getLogger("cgsik")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# configuration


def profile_settings(geom: RobotGeometry) -> dict:
    """Typed values from the ``[solver]`` section of a profile, if present."""
    cp = configparser.ConfigParser()
    cp.read_string(geom.source or "")
    if not cp.has_section("solver"):
        return {}
    sec = cp["solver"]
    out = {}
    for key in ("tol_mm", "root_tol", "dedup_tol"):
        if key in sec:
            out[key] = sec.getfloat(key)
    if "seed" in sec:
        out["seed"] = sec.getint("seed")
    for key in ("mode", "template"):
        if key in sec:
            out[key] = sec[key]
    return out


def resolve(args, geom: RobotGeometry) -> dict:
    cfg = dict(DEFAULTS)
    cfg.update(profile_settings(geom))
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    if cfg["mode"] not in MODES:
        raise UsageError(f"unknown mode {cfg['mode']!r}; choose from {', '.join(MODES)}")
    for key in ("tol_mm", "root_tol", "dedup_tol"):
        if not cfg[key] > 0:
            raise UsageError(f"{key} must be positive")
    return cfg


def _options(cfg: dict, caps: ResourceCaps | None = None) -> SolverOptions:
    kw = dict(mode=cfg["mode"], tol_mm=cfg["tol_mm"], root_tol=cfg["root_tol"], dedup_tol=cfg["dedup_tol"])
    if caps is not None:
        kw["caps"] = caps
    return SolverOptions(**kw)


def _template(cfg: dict, geom: RobotGeometry) -> SolverTemplate:
    if cfg["mode"] in ("direct", "groebner-sincos"):
        return SolverTemplate.direct(geom)
    if cfg["template"]:
        return SolverTemplate.load(cfg["template"], geom)
    tpl = SolverTemplate.bundled(geom)
    if tpl is None:
        log.info("no cached template for %s; building the fast components", geom.name)
        tpl = SolverTemplate.build(geom, FAST_COMPONENTS)
    return tpl


def _caps(args, default: ResourceCaps) -> ResourceCaps:
    return ResourceCaps(
        max_pairs=args.max_pairs if args.max_pairs is not None else default.max_pairs,
        max_degree=args.max_degree if args.max_degree is not None else default.max_degree,
        max_seconds=args.max_seconds if args.max_seconds is not None else default.max_seconds,
    )


def _floats(values, what: str) -> list:
    try:
        return [float(v) for v in values]
    except ValueError as exc:
        raise UsageError(f"{what}: {exc}") from exc


# ---------------------------------------------------------------------------
# commands


def cmd_fk(args, out) -> int:
    geom = RobotGeometry.load(args.profile)
    theta = _floats(args.theta, "joint angles")
    if len(theta) != 6:
        raise UsageError(f"fk needs 6 joint angles, got {len(theta)}")
    if args.deg:
        theta = [math.radians(t) for t in theta]
    pose = forward_kinematics(geom, theta)
    rpy = pose.rpy()
    if args.json:
        data = {"theta_rad": theta, **pose.as_dict(), "rpy_rad": list(rpy), "units": {"p": "mm", "angles": "rad"}}
        print(json.dumps(data), file=out)
        return EXIT_OK
    fmt = lambda v: " ".join(f"{x: .9f}" for x in v)  # noqa: E731
    print(f"p [mm]      {fmt(pose.p)}", file=out)
    print(f"l           {fmt(pose.l)}", file=out)
    print(f"m           {fmt(pose.m)}", file=out)
    print(f"n           {fmt(pose.n)}", file=out)
    print(f"rpy [rad]   {fmt(rpy)}", file=out)
    return EXIT_OK


def _pose_from_args(values: list, deg: bool) -> Pose:
    if len(values) == 6:
        rpy = values[3:]
        if deg:
            rpy = [math.radians(a) for a in rpy]
        return Pose.from_rpy(values[:3], rpy)
    if len(values) == 12:
        return Pose(values[0:3], values[3:6], values[6:9], values[9:12])
    raise UsageError(f"ik needs 6 values (p1 p2 p3 alpha beta gamma) or 12 (l m n p), got {len(values)}")


def cmd_ik(args, out) -> int:
    geom = RobotGeometry.load(args.profile)
    cfg = resolve(args, geom)
    pose = _pose_from_args(_floats(args.pose, "pose"), args.deg)
    bad = validate_pose(pose)
    if bad:
        print(f"invalid pose: violates {', '.join(bad)}", file=sys.stderr)
        return EXIT_USAGE
    tpl = _template(cfg, geom)
    res = solve_ik(tpl, geom, pose, _options(cfg))
    if args.json:
        print(json.dumps(res.as_dict()), file=out)
    else:
        for c in res.verified:
            th = " ".join(f"{t: .12f}" for t in c.theta)
            b = c.branch
            print(f"theta [rad] {th}  branch {b.case}/{b.system}/{b.chain}  "
                  f"residual {c.residual.position_mm:.3e} mm  in_limits {c.in_limits}", file=out)
        if not res.verified:
            print("unreachable: no verified solution", file=out)
    return EXIT_OK if res.verified else EXIT_NONE


def cmd_precompute(args, out) -> int:
    geom = RobotGeometry.load(args.profile)
    comps = {"fast": FAST_COMPONENTS, "all": COMPONENTS}.get(args.components)
    if comps is None:
        comps = tuple(c.strip() for c in args.components.split(","))
        unknown = [c for c in comps if c not in COMPONENTS]
        if unknown:
            raise UsageError(f"unknown template components {unknown}; choose from {', '.join(COMPONENTS)}")
    tpl = SolverTemplate.build(geom, comps, caps=_caps(args, DEFAULT_BUILD_CAPS),
                               generic_caps=_caps(args, GENERIC_BUILD_CAPS))
    path = tpl.save(args.out)
    for name in COMPONENTS:
        st = tpl.status[name]
        print(f"{name:20s} {st.status:16s} {st.detail}", file=out)
    print(f"wrote {path}", file=out)
    return EXIT_CAP if tpl.fallbacks() else EXIT_OK


def cmd_bench(args, out) -> int:
    geom = RobotGeometry.load(args.profile)
    cfg = resolve(args, geom)
    tpl = _template(cfg, geom)
    opts = _options(cfg)
    timer = None if args.no_timing else time.perf_counter
    if args.kind == "roundtrip":
        rep = run_roundtrip(geom, tpl, args.tests, args.samples, mode=cfg["mode"], seed=cfg["seed"],
                            options=opts, timer=timer)
    else:
        box = WorkspaceBox(radius=args.radius, z_min=args.z_min, z_max=args.z_max)
        rep = run_random_pose(geom, tpl, args.tests, args.samples, workspace_box=box, rng_seed=cfg["seed"],
                              mode=cfg["mode"], options=opts, timer=timer)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    stem = f"{args.kind}-{cfg['mode']}"
    for fmt, ext in (("csv", "csv"), ("json", "json"), ("manifest", "manifest.json")):
        emit_report(rep, fmt, outdir / f"{stem}.{ext}")
    print((outdir / f"{stem}.csv").read_text(), end="", file=out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _common(p, solver: bool = True):
    p.add_argument("--profile", default="testbot", help="built-in profile name or path to a profile file")
    if solver:
        p.add_argument("--mode", choices=MODES, default=None)
        p.add_argument("--template", default=None, help="template cache file (template and cgs modes)")
        p.add_argument("--tol-mm", dest="tol_mm", type=float, default=None)
        p.add_argument("--root-tol", dest="root_tol", type=float, default=None)
        p.add_argument("--dedup-tol", dest="dedup_tol", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cgsik", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fk", help="forward kinematics of six joint angles")
    _common(p, solver=False)
    p.add_argument("--deg", action="store_true", help="angles are in degrees")
    p.add_argument("--json", action="store_true")
    p.add_argument("theta", nargs="*")
    p.set_defaults(func=cmd_fk)

    p = sub.add_parser("ik", help="all joint solutions of one pose")
    _common(p)
    p.add_argument("--deg", action="store_true", help="roll/pitch/yaw are in degrees")
    p.add_argument("--json", action="store_true")
    p.add_argument("pose", nargs="*", help="p1 p2 p3 alpha beta gamma, or l1 l2 l3 m1 m2 m3 n1 n2 n3 p1 p2 p3")
    p.set_defaults(func=cmd_ik)

    p = sub.add_parser("precompute", help="build and save the solver template")
    _common(p, solver=False)
    p.add_argument("--components", default="all", help="'all', 'fast' or a comma-separated list")
    p.add_argument("--max-pairs", type=int, default=None)
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--max-seconds", type=float, default=None)
    p.add_argument("out")
    p.set_defaults(func=cmd_precompute)

    p = sub.add_parser("bench", help="round-trip or random-pose benchmark")
    _common(p)
    p.add_argument("kind", choices=("roundtrip", "pose"))
    p.add_argument("--tests", type=int, default=10)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--radius", type=float, default=WorkspaceBox.radius)
    p.add_argument("--z-min", type=float, default=WorkspaceBox.z_min)
    p.add_argument("--z-max", type=float, default=WorkspaceBox.z_max)
    p.add_argument("--no-timing", action="store_true", help="record zero times for byte-stable reports")
    p.add_argument("--out", default="bench-out")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"cgsik {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PoseValidationError as exc:
        print(f"cgsik {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ProfileError, TemplateFormatError, FileNotFoundError) as exc:
        print(f"cgsik {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitExceeded as exc:
        print(f"cgsik {args.command}: resource cap hit: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
