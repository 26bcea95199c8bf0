import io
import json
import math

import numpy as np

from cgsik.cli import EXIT_CAP, EXIT_NONE, EXIT_OK, EXIT_USAGE, main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_fk_home_text():
    code, text = run("fk", "0", "0", "0", "0", "0", "0")
    assert code == EXIT_OK
    assert text.splitlines()[0].split()[2:] == ["65.000000000", "-65.000000000", "411.000000000"]


def test_fk_degrees_match_radians():
    _, rad = run("fk", "--json", *(["0"] * 6))
    _, deg = run("fk", "--json", "--deg", *(["0"] * 6))
    a, b = json.loads(rad), json.loads(deg)
    assert a["p"] == b["p"]
    _, r30 = run("fk", "--json", *([str(math.radians(30))] * 6))
    _, d30 = run("fk", "--json", "--deg", *(["30"] * 6))
    assert np.allclose(json.loads(r30)["p"], json.loads(d30)["p"], atol=1e-12)


def test_fk_wrong_arity_and_junk(capsys):
    assert run("fk", "0", "0", "0", "0", "0")[0] == EXIT_USAGE
    assert run("fk", "0", "0", "0", "0", "0", "zero")[0] == EXIT_USAGE
    assert "6 joint angles" in capsys.readouterr().err


def test_unknown_command_and_profile():
    assert run("fly")[0] == EXIT_USAGE
    assert run("fk", "--profile", "no-such-robot", *(["0"] * 6))[0] == EXIT_USAGE
    assert run("--help")[0] == EXIT_OK


def test_ik_round_trip_json():
    q = [0.3, -0.4, 0.9, 0.2, -1.1, 0.5]
    _, fk = run("fk", "--json", *map(str, q))
    data = json.loads(fk)
    pose = [*data["p"], *data["rpy_rad"]]
    code, text = run("ik", "--json", *map(repr, pose))
    assert code == EXIT_OK
    sols = json.loads(text)["solutions"]
    assert any(np.allclose(s["theta"], q, atol=1e-6) for s in sols)
    assert all(s["fk_residual_mm"] < 0.1 for s in sols)


def test_ik_twelve_value_pose_and_text_output():
    code, text = run("ik", "--mode", "direct", "0", "-1", "0", "0", "0", "-1", "1", "0", "0", "65", "-65", "411")
    assert code == EXIT_OK
    assert "branch" in text and "residual" in text


def test_ik_unreachable_exits_one():
    code, text = run("ik", "--mode", "direct", "1e6", "0", "0", "0", "0", "0")
    assert code == EXIT_NONE
    assert "unreachable" in text


def test_ik_non_orthonormal_pose(capsys):
    code, _ = run("ik", "1", "0", "0", "0.5", "1", "0", "0", "0", "1", "100", "0", "200")
    assert code == EXIT_USAGE
    assert "invalid pose" in capsys.readouterr().err


def test_ik_bad_tolerance():
    assert run("ik", "--tol-mm", "0", "100", "0", "200", "0", "0", "0")[0] == EXIT_USAGE


def test_precompute_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run("precompute", "--components", "parallel,vertical+", str(a))[0] == EXIT_OK
    assert run("precompute", "--components", "parallel,vertical+", str(b))[0] == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    # the saved file serves the home pose, whose approach is horizontal
    _, fk = run("fk", "--json", *(["0"] * 6))
    data = json.loads(fk)
    code, text = run("ik", "--json", "--template", str(a), *map(repr, [*data["p"], *data["rpy_rad"]]))
    assert code == EXIT_OK
    sols = json.loads(text)["solutions"]
    assert any(np.allclose(s["theta"], [0] * 6, atol=1e-6) for s in sols)
    assert any(s["branch"]["path"] == "template:parallel" for s in sols)


def test_precompute_tiny_cap_exits_three(tmp_path):
    path = tmp_path / "t.json"
    code, text = run("precompute", "--components", "parallel", "--max-pairs", "1", str(path))
    assert code == EXIT_CAP
    assert "direct-fallback" in text
    assert json.loads(path.read_text())["components"]["parallel"]["status"] == "direct-fallback"


def test_precompute_unknown_component(tmp_path):
    assert run("precompute", "--components", "elbow", str(tmp_path / "x.json"))[0] == EXIT_USAGE


def test_template_for_other_robot_is_refused(tmp_path):
    path = tmp_path / "t.json"
    run("precompute", "--components", "parallel", str(path))
    code, _ = run("ik", "--profile", "mycobot280", "--template", str(path), "100", "0", "200", "0", "0", "0")
    assert code == EXIT_USAGE


def test_bench_outputs_and_determinism(tmp_path):
    outs = []
    for name in ("a", "b"):
        d = tmp_path / name
        code, text = run("bench", "roundtrip", "--mode", "direct", "--tests", "2", "--samples", "3",
                         "--seed", "11", "--no-timing", "--out", str(d))
        assert code == EXIT_OK
        assert text.splitlines()[0] == "Test,AvgTime,Success,DiffSoln,AvgSoln"
        files = sorted(p.name for p in d.iterdir())
        assert files == ["roundtrip-direct.csv", "roundtrip-direct.json", "roundtrip-direct.manifest.json"]
        outs.append({f: (d / f).read_bytes() for f in files})
    assert outs[0] == outs[1]
    man = json.loads(outs[0]["roundtrip-direct.manifest.json"])
    assert man["seed"] == 11 and man["n_samples"] == 3


def test_bench_pose_kind(tmp_path):
    code, text = run("bench", "pose", "--mode", "direct", "--tests", "1", "--samples", "4", "--no-timing",
                     "--out", str(tmp_path))
    assert code == EXIT_OK
    assert text.splitlines()[0] == "Test,AvgTime,Success,AvgSoln"


def test_profile_solver_section_is_read(tmp_path):
    from cgsik.kinematics import RobotGeometry

    src = RobotGeometry.builtin("testbot").source + "\n[solver]\nmode = direct\ntol_mm = 0.5\n"
    prof = tmp_path / "bot.ini"
    prof.write_text(src)
    _, fk = run("fk", "--json", "0.3", "-0.4", "0.9", "0.2", "-1.1", "0.5")
    data = json.loads(fk)
    pose = [repr(v) for v in (*data["p"], *data["rpy_rad"])]
    _, text = run("ik", "--json", "--profile", str(prof), *pose)
    assert {s["branch"]["chain"] for s in json.loads(text)["solutions"]} == {"closed-form"}
    # a flag still wins over the profile
    _, text = run("ik", "--json", "--profile", str(prof), "--mode", "groebner-sincos", *pose)
    assert {s["branch"]["chain"] for s in json.loads(text)["solutions"]} == {"sincos-direct"}


def test_json_output_is_lossless():
    from cgsik.kinematics import RobotGeometry, forward_kinematics

    q = [0.3, -0.4, 0.9, 0.2, -1.1, 0.5]
    _, text = run("fk", "--json", *map(repr, q))
    data = json.loads(text)
    pose = forward_kinematics(RobotGeometry.builtin("testbot"), q)
    assert data["theta_rad"] == q
    assert data["p"] == [float(v) for v in pose.p]
    assert data["n"] == [float(v) for v in pose.n]
