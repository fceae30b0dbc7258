"""Runs the planner over a sampled path under perfect low-level tracking.

Each solved input is applied as-is: joints jump to their planned values and
the base travels the constant twist of its command over one time step.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial.transform import Rotation

from .kinematics import RobotModel
from .liegroup import Pose, rotation_angle
from .paths import DesiredPath
from .planner import PlannerConfig, PlannerState, advance, initial_state, solve_step


class TraceFormatError(ValueError):
    pass


@dataclass(eq=False)
class TraceRecord:
    step: int
    time: float
    input: np.ndarray
    base_pose: Pose  # base pose the step was planned from
    ee_pose: Pose  # achieved end-effector pose after applying ``input``
    desired_pose: Pose
    position_error: float
    rotation_error: float
    cost: float
    iterations: int
    solve_time: float
    converged: bool


@dataclass(eq=False)
class ExperimentResult:
    trace: list[TraceRecord]
    model_name: str
    path_name: str
    config: PlannerConfig
    base_channels: int = 2
    final_state: PlannerState | None = field(default=None, repr=False)


def run(m: RobotModel, path: DesiredPath, cfg: PlannerConfig,
        initial: PlannerState | None = None) -> ExperimentResult:
    cfg = cfg.for_model(m)
    if path.dt != cfg.dt:
        cfg = PlannerConfig(cfg.lambda_e, cfg.lambda_v, cfg.lambda_j, path.dt,
                            cfg.max_iterations, cfg.gradient_tolerance, cfg.step_tolerance)
    state = initial or initial_state(m)
    trace = []
    for k, desired in enumerate(path.samples):
        sol = solve_step(desired, state, m, cfg)
        ee = sol.predicted_pose
        trace.append(TraceRecord(
            step=k,
            time=k * cfg.dt,
            input=sol.input.copy(),
            base_pose=state.base_pose,
            ee_pose=ee,
            desired_pose=desired,
            position_error=float(np.linalg.norm(ee.translation - desired.translation)),
            rotation_error=rotation_angle(ee, desired),
            cost=sol.cost,
            iterations=sol.iterations,
            solve_time=sol.solve_time,
            converged=sol.converged,
        ))
        state = advance(state, sol, m, cfg)
    return ExperimentResult(trace, m.name, path.name, cfg, m.base_channels, state)


# -- tabular form ------------------------------------------------------------

@dataclass(eq=False)
class TraceTable:
    """Column view of a trace: what the CSV stores and the metrics consume."""

    step: np.ndarray
    time: np.ndarray
    inputs: np.ndarray  # (N, d)
    base: np.ndarray  # (N, 3): x, y, yaw
    ee_position: np.ndarray  # (N, 3)
    ee_quaternion: np.ndarray  # (N, 4): w, x, y, z
    position_error: np.ndarray
    rotation_error: np.ndarray
    cost: np.ndarray
    iterations: np.ndarray
    solve_time: np.ndarray
    converged: np.ndarray

    def __len__(self) -> int:
        return len(self.step)

    @property
    def dt(self) -> float | None:
        return float(self.time[1] - self.time[0]) if len(self) > 1 else None


def yaw_of(p: Pose) -> float:
    return math.atan2(p.rotation[1, 0], p.rotation[0, 0])


def quaternion_wxyz(r: np.ndarray) -> np.ndarray:
    """Unit quaternion (w, x, y, z) with w >= 0."""
    x, y, z, w = Rotation.from_matrix(r).as_quat()
    q = np.array([w, x, y, z])
    return -q if w < 0.0 else q


def table_from_trace(trace: list[TraceRecord]) -> TraceTable:
    return TraceTable(
        step=np.array([r.step for r in trace], dtype=int),
        time=np.array([r.time for r in trace], dtype=float),
        inputs=np.array([r.input for r in trace], dtype=float),
        base=np.array([[r.base_pose.translation[0], r.base_pose.translation[1], yaw_of(r.base_pose)]
                       for r in trace], dtype=float).reshape(-1, 3),
        ee_position=np.array([r.ee_pose.translation for r in trace], dtype=float).reshape(-1, 3),
        ee_quaternion=np.array([quaternion_wxyz(r.ee_pose.rotation) for r in trace]).reshape(-1, 4),
        position_error=np.array([r.position_error for r in trace], dtype=float),
        rotation_error=np.array([r.rotation_error for r in trace], dtype=float),
        cost=np.array([r.cost for r in trace], dtype=float),
        iterations=np.array([r.iterations for r in trace], dtype=int),
        solve_time=np.array([r.solve_time for r in trace], dtype=float),
        converged=np.array([r.converged for r in trace], dtype=bool),
    )


def csv_header(d: int) -> list[str]:
    return (["step", "time"] + [f"u_{i}" for i in range(d)]
            + ["base_x", "base_y", "base_yaw", "ee_x", "ee_y", "ee_z",
               "ee_qw", "ee_qx", "ee_qy", "ee_qz",
               "pos_err", "rot_err", "cost", "iters", "solve_time", "converged"])


def _f(x: float) -> str:
    return repr(float(x))


def trace_to_csv(table: TraceTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(csv_header(table.inputs.shape[1]))
    for k in range(len(table)):
        w.writerow([str(int(table.step[k])), _f(table.time[k])]
                   + [_f(x) for x in table.inputs[k]]
                   + [_f(x) for x in table.base[k]]
                   + [_f(x) for x in table.ee_position[k]]
                   + [_f(x) for x in table.ee_quaternion[k]]
                   + [_f(table.position_error[k]), _f(table.rotation_error[k]), _f(table.cost[k]),
                      str(int(table.iterations[k])), _f(table.solve_time[k]),
                      "1" if table.converged[k] else "0"])
    return buf.getvalue()


def write_trace_csv(table: TraceTable, path) -> None:
    Path(path).write_text(trace_to_csv(table))


def read_trace_csv(path) -> TraceTable:
    text = Path(path).read_text()
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise TraceFormatError(f"{path}: empty trace file")
    header = rows[0]
    d = sum(1 for h in header if h.startswith("u_"))
    if header != csv_header(d):
        raise TraceFormatError(f"{path}: header does not match the trace schema")
    body = rows[1:]
    if any(len(r) != len(header) for r in body):
        raise TraceFormatError(f"{path}: ragged rows")
    try:
        cols = list(zip(*body)) if body else [()] * len(header)
        num = lambda i: np.array([float(x) for x in cols[i]], dtype=float)
        inputs = np.array([[float(x) for x in r[2:2 + d]] for r in body], dtype=float).reshape(-1, d)
        o = 2 + d
        return TraceTable(
            step=np.array([int(x) for x in cols[0]], dtype=int),
            time=num(1),
            inputs=inputs,
            base=np.column_stack([num(o), num(o + 1), num(o + 2)]).reshape(-1, 3),
            ee_position=np.column_stack([num(o + 3), num(o + 4), num(o + 5)]).reshape(-1, 3),
            ee_quaternion=np.column_stack([num(o + i) for i in range(6, 10)]).reshape(-1, 4),
            position_error=num(o + 10),
            rotation_error=num(o + 11),
            cost=num(o + 12),
            iterations=np.array([int(x) for x in cols[o + 13]], dtype=int),
            solve_time=num(o + 14),
            converged=np.array([x == "1" for x in cols[o + 15]], dtype=bool),
        )
    except ValueError as exc:
        raise TraceFormatError(f"{path}: {exc}") from exc
