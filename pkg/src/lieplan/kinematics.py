"""Screw-coordinate robot models and product-of-exponentials kinematics.

An input vector ``u`` is a flat array: base command channels first, then the
joint values. Nonholonomic bases take ``(v_x, omega_z)``, holonomic bases
``(v_x, v_y, omega_z)``; a ``fixed`` base has no channels (used for arm-only
models).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .liegroup import (
    STRUCTURE_TOL,
    Pose,
    adjoint,
    compose,
    exp_se3,
    inverse,
    log_se3,
    se3_right_jacobian,
    se3_right_jacobian_inv,
)

JOINT_KINDS = ("revolute", "prismatic")
BASE_CHANNELS = {"nonholonomic": 2, "holonomic": 3, "fixed": 0}


class InfeasibleCommandError(ValueError):
    """A base command lies outside the velocity limits."""


class RobotDescriptionError(ValueError):
    """A robot description file is malformed or violates model invariants."""


@dataclass(frozen=True, eq=False)
class JointModel:
    kind: str
    axis: np.ndarray
    point: np.ndarray = field(default_factory=lambda: np.zeros(3))
    limits: tuple[float, float] = (-2.0 * math.pi, 2.0 * math.pi)

    @property
    def screw(self) -> np.ndarray:
        """Unit screw: (axis, point x axis) if revolute, (0, axis) if prismatic."""
        s = np.zeros(6)
        if self.kind == "revolute":
            s[:3] = self.axis
            s[3:] = np.cross(self.point, self.axis)
        else:
            s[3:] = self.axis
        return s


@dataclass(frozen=True, eq=False)
class BaseModel:
    kind: str
    velocity_limits: np.ndarray  # (channels, 2) rows of (min, max)

    @property
    def channels(self) -> int:
        return BASE_CHANNELS[self.kind]

    def generator(self, dt: float) -> np.ndarray:
        """6 x channels matrix G with base_twist(cmd, dt) == G @ cmd."""
        g = np.zeros((6, self.channels))
        if self.kind == "nonholonomic":
            g[2, 1] = dt
            g[3, 0] = dt
        elif self.kind == "holonomic":
            g[2, 2] = dt
            g[3, 0] = dt
            g[4, 1] = dt
        return g


@dataclass(frozen=True, eq=False)
class RobotModel:
    name: str
    base: BaseModel
    joints: tuple[JointModel, ...]
    home_pose: Pose
    ready: np.ndarray | None = None
    lambda_v: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "_screws", np.array([j.screw for j in self.joints]).reshape(-1, 6))
        lo = [r[0] for r in self.base.velocity_limits] + [j.limits[0] for j in self.joints]
        hi = [r[1] for r in self.base.velocity_limits] + [j.limits[1] for j in self.joints]
        object.__setattr__(self, "_lower", np.array(lo, dtype=float))
        object.__setattr__(self, "_upper", np.array(hi, dtype=float))

    @property
    def n_joints(self) -> int:
        return len(self.joints)

    @property
    def base_channels(self) -> int:
        return self.base.channels

    @property
    def input_dim(self) -> int:
        return self.base.channels + len(self.joints)

    @property
    def screws(self) -> np.ndarray:
        return self._screws

    @property
    def lower(self) -> np.ndarray:
        return self._lower

    @property
    def upper(self) -> np.ndarray:
        return self._upper

    def split(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(base_command, joint_values) views of an input vector."""
        c = self.base.channels
        return u[:c], u[c:]

    def zero_motion_input(self, q) -> np.ndarray:
        """Input that holds the arm at ``q`` with the base at rest."""
        u = np.zeros(self.input_dim)
        u[self.base.channels:] = q
        return u


def joint_twist(j: JointModel, q: float) -> np.ndarray:
    return q * j.screw


def base_twist(b: BaseModel, cmd, dt: float) -> np.ndarray:
    """Constant body twist travelled by the base over one step of length dt."""
    cmd = np.asarray(cmd, dtype=float)
    if cmd.shape != (b.channels,):
        raise InfeasibleCommandError(f"{b.kind} base expects {b.channels} channels, got {cmd.shape}")
    lim = b.velocity_limits
    if b.channels and (np.any(cmd < lim[:, 0]) or np.any(cmd > lim[:, 1])):
        raise InfeasibleCommandError(f"command {cmd} outside velocity limits {lim.tolist()}")
    return b.generator(dt) @ cmd


def joint_product(m: RobotModel, q) -> Pose:
    """Product of the joint exponentials, joint 1 leftmost; excludes P0."""
    out = Pose.identity()
    for s, qi in zip(m.screws, q):
        out = compose(out, exp_se3(qi * s))
    return out


def fk_arm(m: RobotModel, q) -> Pose:
    return compose(joint_product(m, q), m.home_pose)


def fk_with_base(m: RobotModel, base_pose: Pose, u, dt: float) -> Pose:
    """World-frame end-effector pose one step ahead."""
    u = np.asarray(u, dtype=float)
    cmd, q = m.split(u)
    step = exp_se3(base_twist(m.base, cmd, dt))
    return compose(compose(base_pose, step), fk_arm(m, q))


def target_transform(base_pose: Pose, desired: Pose, home: Pose) -> Pose:
    """The group element whose log is ``tau_poses``: base^-1 desired home^-1."""
    return compose(compose(inverse(base_pose), desired), inverse(home))


def tau_poses(base_pose: Pose, desired: Pose, home: Pose) -> np.ndarray:
    return log_se3(target_transform(base_pose, desired, home),
                   context="desired pose outside the log chart of the base frame")


def tau_joints(m: RobotModel, u, dt: float) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    cmd, q = m.split(u)
    x = compose(exp_se3(base_twist(m.base, cmd, dt)), joint_product(m, q))
    return log_se3(x, context="joint transformation outside the log chart")


def joint_transform_jacobian(m: RobotModel, u, dt: float) -> tuple[Pose, np.ndarray]:
    """X(u) = exp(S_r) prod exp(S_i q_i) and its body-frame derivative.

    A perturbation of channel k acts on the right of X as exp(a_k du_k);
    the returned 6 x input_dim matrix holds the columns a_k.
    """
    u = np.asarray(u, dtype=float)
    c = m.base_channels
    cmd, q = m.split(u)
    screws = m.screws
    n = len(q)
    factors = [exp_se3(qi * s) for s, qi in zip(screws, q)]

    # suffix[i] = factors[i] @ ... @ factors[n-1]
    suffix = [Pose.identity()] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = compose(factors[i], suffix[i + 1])

    a = np.empty((6, c + n))
    for i in range(n):
        a[:, c + i] = adjoint(inverse(suffix[i + 1])) @ screws[i]

    xi_b = m.base.generator(dt) @ cmd
    x = compose(exp_se3(xi_b), suffix[0])
    if c:
        a[:, :c] = adjoint(inverse(suffix[0])) @ se3_right_jacobian(xi_b) @ m.base.generator(dt)
    return x, a


def tau_joints_jacobian(m: RobotModel, u, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """``tau_joints`` and its 6 x input_dim derivative: d tau = J_r^-1(tau) a du."""
    x, a = joint_transform_jacobian(m, u, dt)
    tau = log_se3(x, context="joint transformation outside the log chart")
    return tau, se3_right_jacobian_inv(tau) @ a


# -- robot description files ------------------------------------------------

def _pose_from_dict(d: dict) -> Pose:
    rot = np.asarray(d["rotation"], dtype=float)
    trans = np.asarray(d["translation"], dtype=float)
    if rot.shape != (9,) or trans.shape != (3,):
        raise RobotDescriptionError("pose needs 9 rotation numbers (row-major) and 3 translation numbers")
    return Pose(rot.reshape(3, 3), trans)


def pose_to_dict(p: Pose) -> dict:
    return {"rotation": [float(x) for x in p.rotation.reshape(-1)],
            "translation": [float(x) for x in p.translation]}


def check_robot_dict(d: dict) -> list[tuple[str, bool, str]]:
    """Checklist of model invariants as (item, passed, diagnostic) tuples.

    Raises RobotDescriptionError only when the structure is too broken to
    inspect (missing keys, wrong types).
    """
    try:
        base = d["base"]
        joints = d["joints"]
        home = d["home_pose"]
        kind = base["kind"]
        limits = np.asarray(base.get("limits", []), dtype=float).reshape(-1, 2)
    except (KeyError, TypeError, ValueError) as exc:
        raise RobotDescriptionError(f"malformed robot description: {exc!r}") from exc

    checks = []
    ok = kind in BASE_CHANNELS
    checks.append(("base kind", ok, f"kind={kind!r}" if ok else f"unknown base kind {kind!r}"))
    if ok:
        ok = limits.shape[0] == BASE_CHANNELS[kind]
        checks.append(("base channel count", ok,
                       f"{limits.shape[0]} limit pairs for {BASE_CHANNELS[kind]} channels"))
    for i, (lo, hi) in enumerate(limits):
        ok = lo < hi and lo <= 0.0 <= hi
        checks.append((f"base limit {i}", ok, f"[{lo}, {hi}]" if ok else
                       f"limits [{lo}, {hi}] must satisfy min < max and bracket 0"))

    for i, j in enumerate(joints):
        try:
            jkind = j["kind"]
            axis = np.asarray(j["axis"], dtype=float)
            lo, hi = (float(x) for x in j.get("limits", (-2 * math.pi, 2 * math.pi)))
            point = np.asarray(j.get("point", [0.0, 0.0, 0.0]), dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise RobotDescriptionError(f"joint {i}: {exc!r}") from exc
        checks.append((f"joint {i} kind", jkind in JOINT_KINDS, f"kind={jkind!r}"))
        norm = float(np.linalg.norm(axis)) if axis.shape == (3,) else float("nan")
        ok = abs(norm - 1.0) <= STRUCTURE_TOL
        checks.append((f"joint {i} axis", ok, "unit" if ok else f"axis not unit (norm {norm:.6g})"))
        checks.append((f"joint {i} point", point.shape == (3,), f"shape {point.shape}"))
        checks.append((f"joint {i} limits", lo < hi, f"[{lo}, {hi}]" if lo < hi else
                       f"limits [{lo}, {hi}] not ordered"))

    try:
        pose = _pose_from_dict(home)
        orth, det = pose.structure_error()
        ok = orth <= STRUCTURE_TOL and det <= STRUCTURE_TOL
        msg = "orthonormal" if ok else f"rotation not orthonormal (|RtR-I|={orth:.3g}, |det-1|={det:.3g})"
    except (KeyError, TypeError, ValueError, RobotDescriptionError) as exc:
        ok, msg = False, f"home_pose unreadable: {exc}"
    checks.append(("home_pose rotation", ok, msg))

    n = len(joints)
    if "ready" in d:
        ok = len(d["ready"]) == n
        checks.append(("ready configuration", ok, f"{len(d['ready'])} values for {n} joints"))
    if "planner" in d and "lambda_v" in d["planner"] and kind in BASE_CHANNELS:
        dim = BASE_CHANNELS[kind] + n
        ok = len(d["planner"]["lambda_v"]) == dim
        checks.append(("planner lambda_v", ok, f"{len(d['planner']['lambda_v'])} weights for input dimension {dim}"))
    return checks


def robot_from_dict(d: dict) -> RobotModel:
    failed = [(item, msg) for item, ok, msg in check_robot_dict(d) if not ok]
    if failed:
        raise RobotDescriptionError("; ".join(f"{item}: {msg}" for item, msg in failed))
    base = BaseModel(d["base"]["kind"],
                     np.asarray(d["base"].get("limits", []), dtype=float).reshape(-1, 2))
    joints = tuple(
        JointModel(j["kind"], np.asarray(j["axis"], dtype=float),
                   np.asarray(j.get("point", [0.0, 0.0, 0.0]), dtype=float),
                   tuple(float(x) for x in j.get("limits", (-2 * math.pi, 2 * math.pi))))
        for j in d["joints"])
    ready = np.asarray(d["ready"], dtype=float) if "ready" in d else None
    lam = d.get("planner", {}).get("lambda_v")
    return RobotModel(d.get("name", "robot"), base, joints, _pose_from_dict(d["home_pose"]),
                      ready, None if lam is None else np.asarray(lam, dtype=float))


def robot_to_dict(m: RobotModel) -> dict:
    d = {
        "name": m.name,
        "base": {"kind": m.base.kind, "limits": m.base.velocity_limits.tolist()},
        "joints": [{"kind": j.kind, "axis": j.axis.tolist(), "point": j.point.tolist(),
                    "limits": list(j.limits)} for j in m.joints],
        "home_pose": pose_to_dict(m.home_pose),
    }
    if m.ready is not None:
        d["ready"] = m.ready.tolist()
    if m.lambda_v is not None:
        d["planner"] = {"lambda_v": m.lambda_v.tolist()}
    return d


def load_robot(path) -> RobotModel:
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise RobotDescriptionError(f"{path}: {exc}") from exc
    return robot_from_dict(d)


def save_robot(m: RobotModel, path) -> None:
    Path(path).write_text(json.dumps(robot_to_dict(m), indent=2) + "\n")
