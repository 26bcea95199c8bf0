"""Precomputed parametric bases, persisted as versioned JSON.

Components, each a list of :class:`~cgsik.algebra.cgs.CgsSegment`:

``generic``
    first segment of the generic wrist-point system (six pose parameters);
``vertical+`` / ``vertical-``
    CGS of the generic system with the approach fixed to (0, 0, ±1);
``parallel``
    CGS of the coplanar horizontal-approach system;
``nonparallel-n2`` / ``nonparallel-n2zero``
    CGS of the non-coplanar horizontal systems (both quartic variants);
``sincos``
    first segment of the twelve-polynomial sine/cosine system.

A component that hits its resource cap is stored as ``direct-fallback`` and
the solver computes that system's basis per pose instead.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from ..algebra.cgs import CgsSegment, cgs, find_segment, generic_segment
from ..algebra.groebner import ResourceCaps, ResourceLimitExceeded
from ..algebra.poly import MonomialOrder, Poly
from ..algebra.ratfunc import DegeneratePointError
from ..algebra.triangular import solve_triangular
from ..kinematics import RobotGeometry
from .sincos import SINCOS_PARAMS, build_sincos_system, snap_dyadic
from .systems import (
    HORIZONTAL_PARAMS,
    POSE_PARAMS,
    build_generic_system,
    build_nonparallel_special_system,
    build_parallel_special_system,
    build_vertical_system,
)

log = logging.getLogger(__name__)

FORMAT = "cgsik-solver-template"
FORMAT_VERSION = 1

COMPONENTS = ("generic", "vertical+", "vertical-", "parallel", "nonparallel-n2", "nonparallel-n2zero", "sincos")
FAST_COMPONENTS = tuple(c for c in COMPONENTS if c != "generic")

BUILT = "built"
FALLBACK = "direct-fallback"
SKIPPED = "skipped"

DEFAULT_BUILD_CAPS = ResourceCaps(max_pairs=20000, max_degree=60, max_seconds=120.0)
GENERIC_BUILD_CAPS = ResourceCaps(max_pairs=50000, max_degree=60, max_seconds=3600.0)


class TemplateFormatError(ValueError):
    """A template file is malformed, of another version, or for another robot."""


def _unit_circle(order: MonomialOrder) -> Poly:
    n1, n2 = Poly.var(order, "n1"), Poly.var(order, "n2")
    return n1 * n1 + n2 * n2 - 1


def _build_component(name: str, geom: RobotGeometry, caps: ResourceCaps) -> list:
    if name == "generic":
        fs = build_generic_system(geom, parametric=True)
        return [generic_segment(fs, POSE_PARAMS, fs[0].order, caps)]
    if name in ("vertical+", "vertical-"):
        fs = build_vertical_system(geom, 1 if name.endswith("+") else -1, parametric=True)
        return cgs(fs, ("p1", "p2", "p3"), fs[0].order, caps=caps)
    if name == "parallel":
        fs = build_parallel_special_system(geom, parametric=True)
    elif name.startswith("nonparallel"):
        fs = build_nonparallel_special_system(geom, parametric=True, n2_zero=name.endswith("n2zero"))
    elif name == "sincos":
        fs = build_sincos_system(geom)
        return [generic_segment(fs, SINCOS_PARAMS, fs[0].order, caps)]
    else:
        raise ValueError(f"unknown template component {name!r}")
    order = fs[0].order
    return cgs(fs, HORIZONTAL_PARAMS, order, equations=[_unit_circle(order)], caps=caps)


# ---------------------------------------------------------------------------
# serialization: exact term lists, parse-free and diffable


def _frac(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _poly_out(p: Poly) -> list:
    return [[list(e), _frac(c)] for e, c in p.sorted_terms()]


def _poly_in(data: list, order: MonomialOrder) -> Poly:
    return Poly(order, {tuple(e): Fraction(c) for e, c in data})


def _order_out(order: MonomialOrder) -> dict:
    return {"kind": order.kind, "variables": list(order.variables), "split": order.split}


def _order_in(data: dict) -> MonomialOrder:
    return MonomialOrder(data["kind"], tuple(data["variables"]), data.get("split", 0))


def _segment_out(s: CgsSegment) -> dict:
    return {
        "equations": [_poly_out(p) for p in s.equations],
        "inequations": [_poly_out(p) for p in s.inequations],
        "basis": [_poly_out(p) for p in s.basis],
    }


def _segment_in(data: dict, order: MonomialOrder) -> CgsSegment:
    return CgsSegment(
        tuple(_poly_in(p, order) for p in data["equations"]),
        tuple(_poly_in(p, order) for p in data["inequations"]),
        tuple(_poly_in(p, order) for p in data["basis"]),
        order,
    )


@dataclass
class ComponentStatus:
    status: str
    detail: str = ""
    seconds: float = 0.0  # informational; not persisted

    def as_dict(self) -> dict:
        return {"status": self.status, "detail": self.detail}


@dataclass
class SolverTemplate:
    """Cached parametric bases for one robot geometry (immutable after build)."""

    geometry_name: str
    geometry_digest: str
    segments: dict = field(default_factory=dict)
    status: dict = field(default_factory=dict)

    # -- construction ---------------------------------------------------------
    @classmethod
    def build(cls, geom: RobotGeometry, components=COMPONENTS, caps: ResourceCaps = DEFAULT_BUILD_CAPS,
              generic_caps: ResourceCaps = GENERIC_BUILD_CAPS) -> "SolverTemplate":
        tpl = cls(geom.name, geom.digest())
        for name in COMPONENTS:
            if name not in components:
                tpl.status[name] = ComponentStatus(SKIPPED)
                continue
            cap = generic_caps if name == "generic" else caps
            t0 = time.perf_counter()
            try:
                segs = _build_component(name, geom, cap)
            except ResourceLimitExceeded as exc:
                tpl.status[name] = ComponentStatus(FALLBACK, str(exc), time.perf_counter() - t0)
                log.warning("template component %s: %s; using direct bases", name, exc)
                continue
            tpl.segments[name] = segs
            tpl.status[name] = ComponentStatus(BUILT, f"{len(segs)} segment(s)", time.perf_counter() - t0)
            log.info("template component %s built in %.2fs", name, time.perf_counter() - t0)
        return tpl

    @classmethod
    def direct(cls, geom: RobotGeometry) -> "SolverTemplate":
        """A template with nothing cached: every system is solved directly."""
        return cls(geom.name, geom.digest(), {}, {n: ComponentStatus(SKIPPED) for n in COMPONENTS})

    def warm(self) -> "SolverTemplate":
        """Compile every segment's evaluators now rather than on the first solve."""
        for segs in self.segments.values():
            for seg in segs:
                seg._compiled
        return self

    # -- queries ----------------------------------------------------------------
    @property
    def mode(self) -> str:
        if "generic" in self.segments:
            return "generic-basis"
        if self.segments:
            return "cgs-segment"
        return "direct"

    def built(self, name: str) -> bool:
        return name in self.segments

    def has_sincos(self) -> bool:
        return "sincos" in self.segments

    def fallbacks(self) -> list:
        return [n for n, s in self.status.items() if s.status == FALLBACK]

    def check_geometry(self, geom: RobotGeometry) -> None:
        if geom.digest() != self.geometry_digest:
            raise TemplateFormatError(
                f"template was built for geometry {self.geometry_name!r} ({self.geometry_digest[:12]}), "
                f"not {geom.name!r} ({geom.digest()[:12]})"
            )

    # -- solving ----------------------------------------------------------------
    def _component_for(self, system: str, n, mode: str):
        if system == "generic":
            if n[0] == 0 and n[1] == 0:
                return ("vertical+" if n[2] > 0 else "vertical-"), ("p1", "p2", "p3")
            if mode == "template":
                return "generic", POSE_PARAMS
            return None, None
        if system == "parallel":
            return "parallel", HORIZONTAL_PARAMS
        return ("nonparallel-n2zero" if n[1] == 0 else "nonparallel-n2"), HORIZONTAL_PARAMS

    def solve(self, system: str, n, p, options):
        """Wrist points from a cached basis, as ``(points, path)``.

        Returns ``None`` when no cached component applies in this mode; raises
        :class:`DegeneratePointError` when one applies but the pose falls
        outside every stored segment.
        """
        name, params = self._component_for(system, n, options.mode)
        if name is None or name not in self.segments:
            return None
        values = dict(zip(("n1", "n2", "n3"), n))
        values.update(zip(("p1", "p2", "p3"), p))
        if name == "generic":
            # the generic segment has no equations, so short dyadic values are
            # admissible; the exact unit approach would cost 100+ bit integers
            pt = {k: snap_dyadic(values[k]) for k in params}
        else:
            pt = {k: Fraction(values[k]) for k in params}
        seg = find_segment(self.segments[name], pt)
        if seg is None:
            raise DegeneratePointError(f"pose outside the cached segments of {name}")
        path = f"template:{name}"
        if seg.is_unit():
            return [], path
        gb = seg.specialize(pt, check=False)
        sols = solve_triangular(gb, refine_to=options.root_tol)
        return [(s["x"], s["y"], s["z"]) for s in sols.as_dicts()], path

    def sincos_basis(self, values: dict):
        seg = self.segments["sincos"][0]
        pt = {k: Fraction(values[k]) for k in SINCOS_PARAMS}
        if not seg.contains(pt):
            raise DegeneratePointError("sine/cosine parameters hit a vanishing leading coefficient")
        return seg.specialize(pt, check=False)

    # -- persistence ------------------------------------------------------------
    def to_dict(self) -> dict:
        comps = {}
        for name in COMPONENTS:
            st = self.status.get(name, ComponentStatus(SKIPPED))
            entry = st.as_dict()
            if name in self.segments:
                segs = self.segments[name]
                entry["order"] = _order_out(segs[0].order)
                entry["segments"] = [_segment_out(s) for s in segs]
            comps[name] = entry
        return {
            "format": FORMAT,
            "version": FORMAT_VERSION,
            "geometry": {"name": self.geometry_name, "digest": self.geometry_digest},
            "components": comps,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SolverTemplate":
        if data.get("format") != FORMAT:
            raise TemplateFormatError("not a solver template file")
        if data.get("version") != FORMAT_VERSION:
            raise TemplateFormatError(f"template version {data.get('version')} is not {FORMAT_VERSION}")
        geo = data["geometry"]
        tpl = cls(geo["name"], geo["digest"])
        for name, entry in data["components"].items():
            if name not in COMPONENTS:
                raise TemplateFormatError(f"unknown component {name!r}")
            tpl.status[name] = ComponentStatus(entry["status"], entry.get("detail", ""))
            if entry["status"] == BUILT:
                order = _order_in(entry["order"])
                tpl.segments[name] = [_segment_in(s, order) for s in entry["segments"]]
        return tpl

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(self.dumps())
        return path

    @classmethod
    def load(cls, path, geom: RobotGeometry | None = None) -> "SolverTemplate":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise TemplateFormatError(f"{path}: {exc}") from exc
        tpl = cls.from_dict(data)
        if geom is not None:
            tpl.check_geometry(geom)
        return tpl

    @classmethod
    def bundled(cls, geom: RobotGeometry) -> "SolverTemplate | None":
        """The template shipped with the package for a built-in profile, if any."""
        from importlib import resources

        res = resources.files("cgsik.profiles").joinpath(f"{geom.name}.template.json")
        if not res.is_file():
            return None
        tpl = cls.from_dict(json.loads(res.read_text()))
        if tpl.geometry_digest != geom.digest():
            return None
        return tpl
