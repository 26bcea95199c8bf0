import json

import pytest

from cgsik.algebra import ResourceCaps
from cgsik.iksolver import SolverOptions, solve_ik
from cgsik.iksolver.template import (
    BUILT,
    COMPONENTS,
    FALLBACK,
    SolverTemplate,
    TemplateFormatError,
)
from cgsik.kinematics import RobotGeometry, forward_kinematics

from oracles import horizontal_q, random_q


def test_bundled_template_is_complete(template):
    assert template.mode == "generic-basis"
    assert all(template.status[c].status == BUILT for c in COMPONENTS)
    assert template.has_sincos()
    assert template.fallbacks() == []


def test_save_load_is_byte_stable(template, geom, tmp_path):
    path = template.save(tmp_path / "t.json")
    again = SolverTemplate.load(path, geom)
    assert again.dumps() == template.dumps()
    assert again.to_dict()["geometry"]["digest"] == geom.digest()


def test_small_components_build_deterministically(geom):
    a = SolverTemplate.build(geom, ("parallel", "vertical+"))
    b = SolverTemplate.build(geom, ("parallel", "vertical+"))
    assert a.dumps() == b.dumps()
    assert a.mode == "cgs-segment"
    assert a.status["generic"].status == "skipped"


def test_tiny_cap_falls_back_and_still_solves(geom, rng):
    tpl = SolverTemplate.build(geom, ("parallel", "vertical-", "sincos"), caps=ResourceCaps(max_pairs=1))
    assert sorted(tpl.fallbacks()) == ["parallel", "sincos", "vertical-"]
    assert tpl.mode == "direct"
    opts = SolverOptions(mode="template")
    q = horizontal_q(geom, random_q(geom, rng), 3)
    assert solve_ik(tpl, geom, forward_kinematics(geom, q), opts).contains(q, 1e-6)


def test_geometry_mismatch_is_refused(template, tmp_path):
    other = RobotGeometry.builtin("mycobot280")
    path = template.save(tmp_path / "t.json")
    with pytest.raises(TemplateFormatError, match="geometry"):
        SolverTemplate.load(path, other)
    assert SolverTemplate.bundled(other) is None


@pytest.mark.parametrize("edit", [
    lambda d: d.update(format="something-else"),
    lambda d: d.update(version=99),
    lambda d: d["components"].update(bogus={"status": "skipped"}),
])
def test_malformed_files_are_refused(template, tmp_path, edit):
    data = template.to_dict()
    edit(data)
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    with pytest.raises(TemplateFormatError):
        SolverTemplate.load(path)


def test_garbage_file_is_refused(tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("{not json")
    with pytest.raises(TemplateFormatError):
        SolverTemplate.load(path)


def test_fallback_status_round_trips(geom, tmp_path):
    tpl = SolverTemplate.build(geom, ("parallel",), caps=ResourceCaps(max_pairs=1))
    back = SolverTemplate.load(tpl.save(tmp_path / "fb.json"), geom)
    assert back.status["parallel"].status == FALLBACK
    assert "cap" in back.status["parallel"].detail


def test_reloaded_cache_solves_like_a_fresh_build(geom, rng, tmp_path):
    from cgsik.iksolver.template import FAST_COMPONENTS

    fresh = SolverTemplate.build(geom, FAST_COMPONENTS)
    loaded = SolverTemplate.load(fresh.save(tmp_path / "fast.json"), geom)
    opts = SolverOptions(mode="cgs")
    for k in range(100):
        q = random_q(geom, rng)
        if k % 2:
            q = horizontal_q(geom, q, 3)
        pose = forward_kinematics(geom, q)
        a, b = solve_ik(fresh, geom, pose, opts), solve_ik(loaded, geom, pose, opts)
        assert a.thetas == b.thetas
        assert a.contains(q, 1e-6)
