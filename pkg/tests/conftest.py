import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from lieplan import assets
from lieplan.kinematics import BaseModel, JointModel, RobotModel, load_robot
from lieplan.liegroup import Pose

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def husky() -> RobotModel:
    return load_robot(assets.resolve("ur5e_husky", "robots"))


@pytest.fixture(scope="session")
def xdrive() -> RobotModel:
    return load_robot(assets.resolve("ur5e_xdrive", "robots"))


def one_joint_arm(axis=(0.0, 0.0, 1.0), home=None) -> RobotModel:
    """A single revolute joint about ``axis`` through the origin on a fixed base."""
    base = BaseModel("fixed", np.zeros((0, 2)))
    joint = JointModel("revolute", np.asarray(axis, dtype=float), np.zeros(3))
    return RobotModel("one_joint", base, (joint,), home or Pose.from_translation([1.0, 0.0, 0.0]))


def unicycle_arm() -> RobotModel:
    """Nonholonomic base carrying a single prismatic joint along the body x axis."""
    base = BaseModel("nonholonomic", np.array([[-2.0, 2.0], [-math.pi, math.pi]]))
    joint = JointModel("prismatic", np.array([1.0, 0.0, 0.0]), np.zeros(3), (-1.0, 1.0))
    return RobotModel("unicycle_slider", base, (joint,), Pose.from_translation([0.5, 0.0, 0.3]))


finite = st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False)
vec3 = st.tuples(finite, finite, finite).map(np.array)


@st.composite
def rotation_vectors(draw, max_angle=math.pi - 0.1):
    axis = draw(vec3)
    n = np.linalg.norm(axis)
    if n < 1e-6:
        axis, n = np.array([0.0, 0.0, 1.0]), 1.0
    return axis / n * draw(st.floats(0.0, max_angle))


@st.composite
def twists(draw, max_angle=math.pi - 0.1):
    return np.concatenate([draw(rotation_vectors(max_angle)), draw(vec3)])
