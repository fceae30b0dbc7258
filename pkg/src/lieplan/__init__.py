"""Step-wise inverse kinematics planning for mobile manipulators on SE(3)."""

from .kinematics import RobotModel, fk_arm, fk_with_base, load_robot, tau_joints, tau_poses
from .liegroup import Pose, exp_se3, log_se3
from .metrics import MetricsReport, build_report, rmse
from .paths import DesiredPath, PathParams, load_desired_path, sample
from .planner import PlannerConfig, PlannerState, initial_state, solve_step
from .simulator import ExperimentResult, run

__all__ = [
    "DesiredPath", "ExperimentResult", "MetricsReport", "PathParams", "PlannerConfig", "PlannerState",
    "Pose", "RobotModel", "build_report", "exp_se3", "fk_arm", "fk_with_base", "initial_state",
    "load_desired_path", "load_robot", "log_se3", "rmse", "run", "sample", "solve_step",
    "tau_joints", "tau_poses",
]
__version__ = "0.1.0"
