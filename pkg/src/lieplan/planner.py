"""Step-wise optimization-based inverse kinematics for mobile manipulators.

Each step minimizes

    lambda_e |tau_joints(u) - tau_poses(P*)| + |lambda_v * (u - u_k)| + lambda_j |jerk(u)|

over the input box, where the jerk is the third backward difference of the
input sequence. All three norms are Euclidean.

Both tau terms are principal logarithms, which jump where a rotation angle
passes pi. A path whose orientation turns a full revolution relative to the
base must cross that cut. When the target transform B = base^-1 P* P0^-1 has
rotated more than ``RECENTRE_ANGLE``, the step compares X(u) B^-1 with the
identity instead, i.e. the pose term becomes |log(X(u) B^-1)|. Both forms
vanish exactly when X(u) = B, so the set of exact solutions is unchanged;
the recentred one stays far from the cut near the solution.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .kinematics import (
    RobotModel,
    base_twist,
    fk_with_base,
    joint_transform_jacobian,
    target_transform,
)
from .liegroup import (
    NearSingularLogError,
    Pose,
    adjoint,
    compose,
    exp_se3,
    inverse,
    log_se3,
    rotation_angle,
    se3_right_jacobian_inv,
)
from .optim import minimize_box

LAMBDA_V_NONHOLONOMIC = (1.0, 1.0, 0.25, 0.25, 0.1, 0.1, 0.1, 0.1)
LAMBDA_V_HOLONOMIC = (1.0, 1.0, 1.0, 0.25, 0.25, 0.1, 0.1, 0.1, 0.1)
RECENTRE_ANGLE = 2.5  # rad


class DimensionMismatchError(ValueError):
    """Planner configuration does not fit the robot model."""

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("; ".join(problems))


@dataclass(frozen=True)
class PlannerConfig:
    lambda_e: float = 25.0
    lambda_v: tuple[float, ...] | None = None
    lambda_j: float = 0.001
    dt: float = 0.2
    max_iterations: int = 200
    gradient_tolerance: float = 1e-8
    step_tolerance: float = 1e-10

    def for_model(self, m: RobotModel) -> "PlannerConfig":
        """Fill in ``lambda_v`` from the model (or the built-in defaults) and validate."""
        cfg = self
        if cfg.lambda_v is None:
            if m.lambda_v is not None:
                lam = tuple(float(x) for x in m.lambda_v)
            elif m.input_dim == len(LAMBDA_V_NONHOLONOMIC) and m.base.kind == "nonholonomic":
                lam = LAMBDA_V_NONHOLONOMIC
            elif m.input_dim == len(LAMBDA_V_HOLONOMIC) and m.base.kind == "holonomic":
                lam = LAMBDA_V_HOLONOMIC
            else:
                lam = (1.0,) * m.input_dim
            cfg = replace(cfg, lambda_v=lam)
        cfg.validate(m)
        return cfg

    def validate(self, m: RobotModel) -> None:
        problems = []
        lam = () if self.lambda_v is None else tuple(self.lambda_v)
        if len(lam) != m.input_dim:
            problems.append(f"lambda_v: {len(lam)} weights but robot '{m.name}' has input dimension "
                            f"{m.input_dim} ({m.base_channels} base + {m.n_joints} joints)")
        for name in ("lambda_e", "lambda_j"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                problems.append(f"{name}: must be finite and >= 0, got {v}")
        if any(not (math.isfinite(x) and x >= 0.0) for x in lam):
            problems.append(f"lambda_v: weights must be finite and >= 0, got {list(lam)}")
        if not self.dt > 0.0:
            problems.append(f"dt: must be > 0, got {self.dt}")
        if self.max_iterations < 1:
            problems.append(f"max_iterations: must be positive, got {self.max_iterations}")
        if not (self.gradient_tolerance > 0.0 and self.step_tolerance > 0.0):
            problems.append("gradient_tolerance and step_tolerance must be > 0")
        if problems:
            raise DimensionMismatchError(problems)


@dataclass(frozen=True, eq=False)
class PlannerState:
    """World pose of the base and the last three inputs, newest first."""

    base_pose: Pose
    history: tuple[np.ndarray, np.ndarray, np.ndarray]


def initial_state(m: RobotModel, q=None, base_pose: Pose | None = None) -> PlannerState:
    """Stationary start: all history entries hold ``q`` with the base at rest."""
    if q is None:
        q = m.ready if m.ready is not None else np.zeros(m.n_joints)
    u0 = m.zero_motion_input(q)
    return PlannerState(base_pose or Pose.identity(), (u0, u0.copy(), u0.copy()))


@dataclass(eq=False)
class StepSolution:
    input: np.ndarray
    predicted_pose: Pose
    cost: float
    pose_error_translation: float
    pose_error_rotation: float
    iterations: int
    solve_time: float
    converged: bool
    status: str = ""
    cost_history: list[float] = field(default_factory=list, repr=False)


def jerk_estimate(history, candidate, dt: float) -> np.ndarray:
    u_k, u_k1, u_k2 = history
    return (np.asarray(candidate) - 3.0 * u_k + 3.0 * u_k1 - u_k2) / dt**3


class StepCost:
    """The per-step objective with the target-dependent terms precomputed."""

    def __init__(self, desired: Pose, state: PlannerState, m: RobotModel, cfg: PlannerConfig):
        self.model = m
        self.dt = cfg.dt
        self.lambda_e = cfg.lambda_e
        self.lambda_v = np.asarray(cfg.lambda_v, dtype=float)
        self.lambda_j = cfg.lambda_j
        self.u_k = state.history[0]
        self.jerk_offset = -3.0 * state.history[0] + 3.0 * state.history[1] - state.history[2]
        target = target_transform(state.base_pose, desired, m.home_pose)
        self.recentred = rotation_angle(target, Pose.identity()) > RECENTRE_ANGLE
        if self.recentred:
            self.tau_target = np.zeros(6)
            self._target_inv = inverse(target)
            self._target_adj = adjoint(target)
        else:
            self.tau_target = log_se3(target)

    def pose_error(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Pose-term residual and its derivative with respect to ``u``."""
        x, a = joint_transform_jacobian(self.model, u, self.dt)
        if self.recentred:
            # X exp(a du) B^-1 = (X B^-1) exp(Ad_B a du)
            tau = log_se3(compose(x, self._target_inv))
            return tau, se3_right_jacobian_inv(tau) @ self._target_adj @ a
        tau = log_se3(x)
        return tau - self.tau_target, se3_right_jacobian_inv(tau) @ a

    def __call__(self, u: np.ndarray) -> float:
        return self.value_and_grad(u)[0]

    def value_and_grad(self, u: np.ndarray) -> tuple[float, np.ndarray]:
        """Cost and gradient; ``inf`` where the pose term leaves the log chart."""
        try:
            e, jac = self.pose_error(u)
        except NearSingularLogError:
            return math.inf, np.zeros_like(u)
        mv = self.lambda_v * (u - self.u_k)
        jk = (u + self.jerk_offset) / self.dt**3
        ne, nm, nj = math.sqrt(e @ e), math.sqrt(mv @ mv), math.sqrt(jk @ jk)
        grad = np.zeros_like(u)
        if ne > 0.0:
            grad += (self.lambda_e / ne) * (jac.T @ e)
        if nm > 0.0:
            grad += (self.lambda_v / nm) * mv
        if nj > 0.0:
            grad += (self.lambda_j / (nj * self.dt**3)) * jk
        return self.lambda_e * ne + nm + self.lambda_j * nj, grad


def cost(candidate, desired: Pose, state: PlannerState, m: RobotModel, cfg: PlannerConfig) -> float:
    return StepCost(desired, state, m, cfg)(np.asarray(candidate, dtype=float))


def cost_gradient(candidate, desired: Pose, state: PlannerState, m: RobotModel,
                  cfg: PlannerConfig) -> np.ndarray:
    """Gradient the minimizer uses (analytic, through the log-map Jacobian)."""
    return StepCost(desired, state, m, cfg).value_and_grad(np.asarray(candidate, dtype=float))[1]


def warm_start(state: PlannerState, m: RobotModel) -> np.ndarray:
    u = state.history[0].copy()
    u[:m.base_channels] *= 0.5
    return np.minimum(np.maximum(u, m.lower), m.upper)


def solve_step(desired: Pose, state: PlannerState, m: RobotModel, cfg: PlannerConfig) -> StepSolution:
    start = time.perf_counter()
    problem = StepCost(desired, state, m, cfg)
    res = minimize_box(problem.value_and_grad, warm_start(state, m), m.lower, m.upper,
                       cfg.max_iterations, cfg.gradient_tolerance, cfg.step_tolerance)
    u = res.x
    pred = fk_with_base(m, state.base_pose, u, cfg.dt)
    return StepSolution(
        input=u,
        predicted_pose=pred,
        cost=float(res.fun),
        pose_error_translation=float(np.linalg.norm(pred.translation - desired.translation)),
        pose_error_rotation=rotation_angle(pred, desired),
        iterations=res.iterations,
        solve_time=time.perf_counter() - start,
        converged=res.converged,
        status=res.status,
        cost_history=res.history,
    )


def advance(state: PlannerState, sol: StepSolution, m: RobotModel, cfg: PlannerConfig) -> PlannerState:
    cmd, _ = m.split(sol.input)
    base = compose(state.base_pose, exp_se3(base_twist(m.base, cmd, cfg.dt)))
    return PlannerState(base, (sol.input.copy(), state.history[0], state.history[1]))


def plan_path(path, initial: PlannerState, m: RobotModel, cfg: PlannerConfig) -> list[StepSolution]:
    """Solve every waypoint of ``path`` in order; never aborts mid-path."""
    samples = path.samples if hasattr(path, "samples") else path
    state = initial
    out = []
    for desired in samples:
        sol = solve_step(desired, state, m, cfg)
        out.append(sol)
        state = advance(state, sol, m, cfg)
    return out
