import csv
import io
import math

import numpy as np
import pytest

from cgsik.bench import (
    ROUNDTRIP_COLUMNS,
    AccuracyReport,
    TrialRecord,
    WorkspaceBox,
    emit_report,
    error_histogram,
    error_metric,
    load_report,
    run_random_pose,
    run_roundtrip,
    sample_random_joints,
)
from cgsik.iksolver import SolverOptions
from cgsik.iksolver.template import SolverTemplate


@pytest.fixture(scope="module")
def direct(geom):
    return SolverTemplate.direct(geom)


@pytest.fixture(scope="module")
def small_report(geom, direct):
    return run_roundtrip(geom, direct, 2, 6, mode="direct", seed=7, timer=None)


def test_error_metric_exact_is_zero():
    t = (0.3, -0.2, 1.0, 100.0, -50.0, 200.0)
    err = error_metric(t, [t, t])
    assert err.E == 0.0 and err.per_solution == (0.0, 0.0)


def test_error_metric_one_channel_off():
    t = (0.3, -0.2, 1.0, 100.0, -50.0, 200.0)
    off = list(t)
    off[3] *= 1.01
    assert error_metric(t, [off]).E == pytest.approx(0.01 / 6)


def test_error_metric_zero_channel_uses_absolute():
    t = (0.0, 0.5, 0.5, 10.0, 10.0, 10.0)
    s = (1e-4, 0.5, 0.5, 10.0, 10.0, 10.0)
    err = error_metric(t, [s])
    assert err.absolute == ("alpha",)
    assert err.E == pytest.approx(1e-4 / 6)


def test_error_metric_wraps_angles():
    t = (math.pi - 1e-6, 0.1, 0.1, 1.0, 1.0, 1.0)
    s = (-math.pi + 1e-6, 0.1, 0.1, 1.0, 1.0, 1.0)
    assert error_metric(t, [s]).E < 1e-6


def test_error_metric_needs_solutions():
    with pytest.raises(ValueError):
        error_metric((1,) * 6, [])


def test_joint_sampler_is_uniform(geom):
    rng = np.random.default_rng(3)
    draws = np.array([sample_random_joints(geom, rng).as_array() for _ in range(4000)])
    bins = 10
    crit = 27.88  # chi-square, 9 degrees of freedom, p = 0.001
    for j, (lo, hi) in enumerate(geom.limits):
        assert draws[:, j].min() >= lo and draws[:, j].max() <= hi
        counts, _ = np.histogram(draws[:, j], bins=bins, range=(lo, hi))
        expected = len(draws) / bins
        assert ((counts - expected) ** 2 / expected).sum() < crit


def test_joint_sampler_seeds_are_reproducible(geom):
    assert sample_random_joints(geom, [1, 2, 3]) == sample_random_joints(geom, [1, 2, 3])
    assert sample_random_joints(geom, [1, 2, 3]) != sample_random_joints(geom, [1, 2, 4])


def test_roundtrip_counts(small_report):
    r = small_report
    assert r.n_samples == 12
    assert r.n_success + r.n_failures == r.n_samples
    assert r.success_rate == 1.0
    assert [row.test for row in r.rows] == [1, 2]
    assert all(t.matched for t in r.trials)
    assert all(t.seconds == 0.0 for t in r.trials)
    assert r.error_fraction(1e-6) == 1.0


def test_roundtrip_is_deterministic(geom, direct, small_report):
    again = run_roundtrip(geom, direct, 2, 6, mode="direct", seed=7, timer=None)
    assert again.as_dict() == small_report.as_dict()


def test_trial_replays_in_isolation(geom, small_report):
    t = small_report.trials[7]
    q = sample_random_joints(geom, t.seed)
    assert list(q.theta) == t.given


def test_success_monotone_in_tolerance(geom, direct):
    counts = []
    for tol in (1e-12, 1e-9, 1e-3, 1.0):
        rep = run_roundtrip(geom, direct, 1, 8, mode="direct", seed=2, timer=None,
                            options=SolverOptions(tol_mm=tol))
        counts.append(rep.n_success)
    assert counts == sorted(counts)


def test_csv_columns_and_average_row(small_report, tmp_path):
    path = emit_report(small_report, "csv", tmp_path / "r.csv")
    rows = list(csv.reader(io.StringIO(path.read_text())))
    assert tuple(rows[0]) == ROUNDTRIP_COLUMNS == ("Test", "AvgTime", "Success", "DiffSoln", "AvgSoln")
    assert [r[0] for r in rows[1:]] == ["1", "2", "Avg"]
    assert rows[1][2] == "6"


def test_empty_report_is_header_only(tmp_path):
    rep = AccuracyReport("roundtrip", {})
    text = emit_report(rep, "csv", tmp_path / "e.csv").read_text()
    assert text == ",".join(ROUNDTRIP_COLUMNS) + "\n"
    assert rep.success_rate == 0.0 and rep.error_fraction() == 0.0


def test_json_round_trip(small_report, tmp_path):
    path = emit_report(small_report, "json", tmp_path / "r.json")
    back = load_report(path)
    assert back.as_dict() == small_report.as_dict()
    man = emit_report(small_report, "manifest", tmp_path / "m.json").read_text()
    assert '"seed": 7' in man
    with pytest.raises(ValueError):
        emit_report(small_report, "xml", tmp_path / "x")


def test_histogram_buckets():
    def trial(E, matched):
        return TrialRecord(1, 0, [0], "direct", [], 0.0, 1, True, matched, [], E)

    h = error_histogram([trial(0.0, True), trial(3e-12, True), trial(3e-12, False), trial(0.5, True), trial(None, None)])
    assert sum(b["matched"] + b["unmatched"] for b in h) == 4
    assert h[0]["matched"] == 1
    mid = [b for b in h if b["lo"] == 1e-12][0]
    assert (mid["matched"], mid["unmatched"]) == (1, 1)


def test_trial_record_validation():
    with pytest.raises(ValueError):
        TrialRecord(1, 0, [0], "direct", [], -1.0, 0, False)
    with pytest.raises(ValueError):
        TrialRecord(1, 0, [0], "direct", [], 0.0, 0, False, matched=True)


def test_random_pose_run(geom, direct):
    rep = run_random_pose(geom, direct, 1, 12, rng_seed=5, mode="direct", timer=None)
    assert rep.kind == "pose" and rep.n_samples == 12
    assert 0 < rep.n_success < 12
    again = run_random_pose(geom, direct, 1, 12, rng_seed=5, mode="direct", timer=None)
    assert again.as_dict() == rep.as_dict()


def test_workspace_box_stays_inside(geom):
    box = WorkspaceBox()
    rng = np.random.default_rng(0)
    for _ in range(200):
        pose = box.sample(rng)
        assert math.hypot(pose.p[0], pose.p[1]) <= box.radius + 1e-9
        assert box.z_min <= pose.p[2] <= box.z_max
        assert np.allclose(pose.rotation @ pose.rotation.T, np.eye(3), atol=1e-12)


def test_bad_sizes_rejected(geom, direct):
    with pytest.raises(ValueError):
        run_roundtrip(geom, direct, 0, 5)

