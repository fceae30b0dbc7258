import copy
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lieplan import assets
from lieplan.kinematics import (
    InfeasibleCommandError,
    JointModel,
    RobotDescriptionError,
    base_twist,
    check_robot_dict,
    fk_arm,
    fk_with_base,
    joint_twist,
    load_robot,
    robot_from_dict,
    robot_to_dict,
    save_robot,
    tau_joints,
    tau_joints_jacobian,
    tau_poses,
)
from lieplan.liegroup import NearSingularLogError, Pose, compose, exp_se3, rotation_angle, twist

from conftest import one_joint_arm, unicycle_arm
from oracles import planar_matrix, unicycle_step, ur5e_chain

joint_angles = st.lists(st.floats(-math.pi, math.pi), min_size=6, max_size=6).map(np.array)


def random_input(m, rng, joint_span=math.pi):
    lo, hi = m.lower.copy(), m.upper.copy()
    c = m.base_channels
    lo[c:], hi[c:] = -joint_span, joint_span
    return rng.uniform(lo, hi)


# -- joint and base twists -------------------------------------------------

def test_joint_twist_revolute_through_offset_point():
    j = JointModel("revolute", np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0]))
    assert np.allclose(joint_twist(j, 2.0), [0, 0, 2.0, 0, -2.0, 0])


def test_joint_twist_prismatic():
    m = unicycle_arm()
    assert np.allclose(joint_twist(m.joints[0], 0.3), [0, 0, 0, 0.3, 0, 0])


def test_base_twist_nonholonomic_layout(husky):
    assert np.allclose(base_twist(husky.base, [1.0, 0.5], 0.2), [0, 0, 0.1, 0.2, 0, 0])


def test_base_twist_holonomic_layout(xdrive):
    assert np.allclose(base_twist(xdrive.base, [1.0, -0.5, 0.5], 0.2), [0, 0, 0.1, 0.2, -0.1, 0])


def test_base_twist_rejects_command_over_limit(husky):
    with pytest.raises(InfeasibleCommandError):
        base_twist(husky.base, [2.5, 0.0], 0.2)


def test_base_twist_rejects_wrong_channel_count(husky):
    with pytest.raises(InfeasibleCommandError):
        base_twist(husky.base, [1.0, 0.0, 0.0], 0.2)


@given(st.floats(-2.0, 2.0), st.floats(-math.pi, math.pi), st.floats(0.01, 0.5))
def test_unicycle_arc_matches_closed_form(v, w, dt):
    m = unicycle_arm()
    step = exp_se3(base_twist(m.base, [v, w], dt))
    x, y, yaw = unicycle_step(0.0, 0.0, 0.0, v, w, dt)
    assert np.abs(step.matrix() - planar_matrix(x, y, yaw)).max() < 1e-12


@given(st.floats(-2.0, 2.0), st.floats(-math.pi, math.pi))
def test_nonholonomic_step_has_no_lateral_twist(v, w):
    m = unicycle_arm()
    t = base_twist(m.base, [v, w], 0.2)
    assert t[4] == 0.0 and t[5] == 0.0


# -- forward kinematics ----------------------------------------------------

def test_fk_at_zero_is_home(husky):
    assert fk_arm(husky, np.zeros(6)).allclose(husky.home_pose, atol=0.0)


def test_one_joint_quarter_turn():
    p = fk_arm(one_joint_arm(), [math.pi / 2])
    assert np.allclose(p.translation, [0.0, 1.0, 0.0], atol=1e-15)
    assert rotation_angle(p, Pose.identity()) == pytest.approx(math.pi / 2)


@given(q=joint_angles)
def test_fk_matches_transform_chain(husky, q):
    assert np.abs(fk_arm(husky, q).matrix() - ur5e_chain(q)).max() < 1e-10


def test_ready_pose_is_ahead_of_base(husky):
    p = fk_arm(husky, husky.ready)
    assert 0.4 < p.translation[0] < 0.7


def test_fk_with_base_zero_command(husky):
    assert fk_with_base(husky, Pose.identity(), np.zeros(8), 0.2).allclose(husky.home_pose, atol=1e-15)


def test_fk_with_base_translated_base(husky):
    base = Pose.from_translation([5.0, 0.0, 0.0])
    p = fk_with_base(husky, base, np.zeros(8), 0.2)
    assert np.allclose(p.translation, husky.home_pose.translation + [5.0, 0.0, 0.0], atol=1e-15)


def test_fk_with_base_matches_oracle_chain(xdrive):
    rng = np.random.default_rng(11)
    for _ in range(20):
        u = random_input(xdrive, rng)
        x0, y0, yaw0 = rng.normal(size=3)
        base = Pose.from_matrix(planar_matrix(x0, y0, yaw0))
        step = exp_se3(base_twist(xdrive.base, u[:3], 0.2))
        expected = planar_matrix(x0, y0, yaw0) @ step.matrix() @ ur5e_chain(u[3:])
        assert np.abs(fk_with_base(xdrive, base, u, 0.2).matrix() - expected).max() < 1e-10


# -- tau terms ---------------------------------------------------------------

def test_tau_poses_zero_when_at_target(husky):
    base = exp_se3(twist((0, 0, 0.3), (1.0, 2.0, 0.0)))
    desired = compose(base, husky.home_pose)
    assert np.allclose(tau_poses(base, desired, husky.home_pose), 0.0, atol=1e-15)


def test_tau_poses_pure_translation():
    t = tau_poses(Pose.identity(), Pose.from_translation([0, 0, 0.1]), Pose.identity())
    assert np.allclose(t, [0, 0, 0, 0, 0, 0.1])


def test_tau_poses_round_trip():
    rng = np.random.default_rng(12)
    for _ in range(50):
        b, d, h = (exp_se3(rng.normal(size=6)) for _ in range(3))
        try:
            t = tau_poses(b, d, h)
        except NearSingularLogError:
            continue
        assert exp_se3(t).allclose(compose(compose(b.inverse(), d), h.inverse()), atol=1e-9)


def test_tau_joints_single_joint_is_its_twist():
    m = one_joint_arm()
    assert np.allclose(tau_joints(m, np.array([0.7]), 0.2), joint_twist(m.joints[0], 0.7), atol=1e-15)


def test_tau_consistency_for_reachable_targets(husky):
    rng = np.random.default_rng(13)
    checked = 0
    while checked < 50:
        u = random_input(husky, rng, joint_span=1.2)
        base = exp_se3(twist((0, 0, rng.normal()), (rng.normal(), rng.normal(), 0)))
        desired = fk_with_base(husky, base, u, 0.2)
        try:
            diff = tau_joints(husky, u, 0.2) - tau_poses(base, desired, husky.home_pose)
        except NearSingularLogError:
            continue
        assert np.abs(diff).max() < 1e-8
        checked += 1


@pytest.mark.parametrize("robot", ["husky", "xdrive"])
def test_tau_jacobian_matches_finite_differences(robot, request):
    m = request.getfixturevalue(robot)
    rng = np.random.default_rng(14)
    h = 1e-6
    for _ in range(10):
        u = random_input(m, rng, joint_span=1.0)
        u[:m.base_channels] *= 0.5
        _, jac = tau_joints_jacobian(m, u, 0.2)
        for k in range(m.input_dim):
            d = np.zeros(m.input_dim)
            d[k] = h
            fd = (tau_joints(m, u + d, 0.2) - tau_joints(m, u - d, 0.2)) / (2 * h)
            assert np.abs(fd - jac[:, k]).max() < 1e-6


# -- description files -----------------------------------------------------

def test_bundled_descriptions_pass_every_check():
    for name in assets.ROBOTS:
        d = json.loads(assets.resolve(name, "robots").read_text())
        assert all(ok for _, ok, _ in check_robot_dict(d))


def test_description_round_trip(tmp_path, xdrive):
    save_robot(xdrive, tmp_path / "r.json")
    again = load_robot(tmp_path / "r.json")
    assert robot_to_dict(again) == robot_to_dict(xdrive)
    assert np.array_equal(again.screws, xdrive.screws)


def _husky_dict():
    return json.loads(assets.resolve("ur5e_husky", "robots").read_text())


def test_non_unit_axis_is_diagnosed():
    d = _husky_dict()
    d["joints"][0]["axis"] = [0, 0, 2]
    failed = [msg for _, ok, msg in check_robot_dict(d) if not ok]
    assert any("axis not unit" in msg for msg in failed)
    with pytest.raises(RobotDescriptionError, match="axis not unit"):
        robot_from_dict(d)


def test_reflection_home_pose_is_diagnosed():
    d = _husky_dict()
    d["home_pose"]["rotation"] = [1, 0, 0, 0, 1, 0, 0, 0, -1]
    failed = [msg for _, ok, msg in check_robot_dict(d) if not ok]
    assert any("not orthonormal" in msg for msg in failed)


def test_unordered_limits_are_diagnosed():
    d = _husky_dict()
    d["joints"][2]["limits"] = [1.0, -1.0]
    assert not all(ok for _, ok, _ in check_robot_dict(d))


def test_missing_keys_raise():
    d = _husky_dict()
    del d["joints"]
    with pytest.raises(RobotDescriptionError):
        check_robot_dict(d)


def test_lambda_v_length_is_checked():
    d = copy.deepcopy(_husky_dict())
    d["planner"]["lambda_v"] = [1.0, 1.0]
    assert not all(ok for _, ok, _ in check_robot_dict(d))
