import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import oracle_chain, random_q

from cgsik.kinematics import (
    JointConfig,
    Pose,
    ProfileError,
    RobotGeometry,
    builtin_profiles,
    chain_transforms,
    forward_kinematics,
    joint_transform,
    normalize_angle,
    rotation_to_rpy,
    rpy_to_rotation,
    validate_pose,
    wrist_point,
)


def test_builtin_profiles_have_the_expected_layout():
    assert {"testbot", "mycobot280"} <= set(builtin_profiles())
    for name in ("testbot", "mycobot280"):
        g = RobotGeometry.builtin(name)
        assert g.structure_violations() == []
        assert all(lo < hi for lo, hi in g.limits)


def test_testbot_lengths_and_limits(geom):
    assert {k: int(v) for k, v in geom.link_lengths().items()} == {
        "d1": 130, "a2": 110, "a3": 96, "d4": 65, "d5": 75, "d6": 65,
    }
    assert all(math.isclose(hi, math.radians(165)) and math.isclose(lo, -hi) for lo, hi in geom.limits)


def test_profile_errors():
    with pytest.raises(ProfileError):
        RobotGeometry.from_text("[robot]\nname = x\n")
    with pytest.raises(ProfileError):
        RobotGeometry.builtin("no-such-robot")


def test_zero_row_is_identity():
    from cgsik.kinematics import dh_matrix

    assert np.allclose(dh_matrix(0, 0, 0, 0, 0), np.eye(4))


def test_joint_two_at_zero_is_a_pure_x_translation(geom):
    T = joint_transform(geom, 2, 0.0)
    expected = np.eye(4)
    expected[0, 3] = -110
    assert np.allclose(T, expected, atol=1e-15)


def test_joint_one_twist_entry(geom):
    assert abs(joint_transform(geom, 1, 0.0)[2, 1]) < 1e-15


def test_joint_index_is_checked(geom):
    with pytest.raises(IndexError):
        joint_transform(geom, 7, 0.0)


def test_home_pose(geom):
    pose = forward_kinematics(geom, [0] * 6)
    assert np.allclose(pose.p, [65, -65, 411], atol=1e-12)
    assert np.allclose(pose.l, [0, -1, 0], atol=1e-12)
    assert np.allclose(pose.m, [0, 0, -1], atol=1e-12)
    assert np.allclose(pose.n, [1, 0, 0], atol=1e-12)
    assert np.allclose(pose.matrix, oracle_chain(geom, [0] * 6), atol=1e-12)


def test_fk_matches_the_elementary_product(geom, rng):
    for _ in range(200):
        q = random_q(geom, rng)
        assert np.allclose(forward_kinematics(geom, q).matrix, oracle_chain(geom, q), atol=1e-12)


def test_batched_fk_matches_single(geom, rng):
    Q = np.array([random_q(geom, rng) for _ in range(20)])
    T = chain_transforms(geom, Q)
    for q, t in zip(Q, T):
        assert np.allclose(t, forward_kinematics(geom, q).matrix, atol=1e-12)


def test_fk_frames_are_rigid(geom, rng):
    for _ in range(1000):
        pose = forward_kinematics(geom, random_q(geom, rng))
        assert validate_pose(pose) == []
        assert abs(np.linalg.det(pose.rotation) - 1) < 1e-12
        assert np.linalg.norm(pose.p - [0, 0, float(geom.d1)]) <= geom.reach()


def test_last_joint_spins_about_the_approach_axis(geom, rng):
    q = random_q(geom, rng)
    a = forward_kinematics(geom, q)
    q2 = q.copy()
    q2[5] += 0.7
    b = forward_kinematics(geom, q2)
    assert np.allclose(a.n, b.n, atol=1e-12) and np.allclose(a.p, b.p, atol=1e-12)
    assert not np.allclose(a.l, b.l, atol=1e-3)


def test_wrist_point_is_frame_five_origin(geom, rng):
    q = random_q(geom, rng)
    assert np.allclose(wrist_point(geom, q), oracle_chain(geom, q, upto=4)[:3, 3], atol=1e-12)


def test_rpy_examples():
    l, m, n = rpy_to_rotation(0, 0, 0)
    assert np.allclose(np.column_stack([l, m, n]), np.eye(3))
    l, m, n = rpy_to_rotation(0, 0, math.pi / 2)
    assert np.allclose(l, [0, -1, 0]) and np.allclose(m, [1, 0, 0]) and np.allclose(n, [0, 0, 1])


@settings(max_examples=200)
@given(st.floats(-3.0, 3.0), st.floats(-3.0, 3.0), st.floats(-3.0, 3.0))
def test_approach_first_entry_is_minus_sin_pitch(a, b, g):
    _, _, n = rpy_to_rotation(a, b, g)
    assert n[0] == pytest.approx(-math.sin(b), abs=1e-15)


def test_rpy_round_trip(rng):
    worst = 0.0
    for _ in range(1000):
        a, g = rng.uniform(-math.pi, math.pi, 2)
        b = rng.uniform(-math.pi / 2 + 0.01, math.pi / 2 - 0.01)
        l, m, n = rpy_to_rotation(a, b, g)
        a2, b2, g2, lock = rotation_to_rpy(l, m, n)
        assert not lock
        back = np.column_stack(rpy_to_rotation(a2, b2, g2))
        worst = max(worst, np.max(np.abs(back - np.column_stack([l, m, n]))))
        assert abs(b2 - b) < 1e-9
    assert worst < 1e-9


def test_identity_to_rpy_and_gimbal_flag():
    assert rotation_to_rpy([1, 0, 0], [0, 1, 0], [0, 0, 1]) == (0.0, 0.0, 0.0, False)
    assert rotation_to_rpy(*rpy_to_rotation(0.3, math.pi / 2, 0.2))[3] is True


def test_validate_pose_names_violations(geom):
    pose = forward_kinematics(geom, [0.1, 0.2, 0.3, 0.4, 0.5, 0.6])
    scaled = Pose(pose.l * 1.1, pose.m, pose.n, pose.p)
    assert "|l|=1" in validate_pose(scaled)
    swapped = Pose(pose.l, pose.n, pose.m, pose.p)
    bad = validate_pose(swapped)
    assert {"l=m x n", "m=n x l", "n=l x m"} <= set(bad)
    assert "|m|=1" not in bad


def test_joint_config_normalizes():
    q = JointConfig((math.pi, -math.pi, 3 * math.pi, 0, 7, -7))
    assert q[0] == pytest.approx(math.pi) and q[1] == pytest.approx(math.pi)
    assert all(-math.pi < t <= math.pi for t in q)
    assert normalize_angle(-math.pi) == pytest.approx(math.pi)
    with pytest.raises(ValueError):
        JointConfig((0, 0, 0))
