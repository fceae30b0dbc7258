"""Tracking-error and smoothness summaries of a completed trace.

Base velocities are the commanded inputs themselves; joint velocities are
differenced from the planned joint positions, (q[k+1] - q[k]) / dt. Higher
derivatives are backward differences within the trace. A derivative of
order n needs at least n + 1 rows; fields without enough rows are reported
as unavailable (``None``).

``base_source="differenced"`` replaces the commanded base velocities with
the constant body twist between consecutive recorded base poses.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from .liegroup import Pose, log_se3
from .simulator import TraceTable

MIN_ROWS = 4
BASE_SOURCES = ("commanded", "differenced")


class TraceTooShortError(ValueError):
    pass


@dataclass(frozen=True)
class MetricsReport:
    position_rmse: float
    rotation_rmse: float
    mean_solve_time: float
    max_forward_velocity: float | None = None
    max_translation_velocity: float | None = None
    max_angular_velocity: float | None = None
    max_forward_acceleration: float | None = None
    max_translation_acceleration: float | None = None
    max_angular_acceleration: float | None = None
    max_forward_jerk: float | None = None
    max_translation_jerk: float | None = None
    max_angular_jerk: float | None = None
    max_joint_velocity: float | None = None
    max_joint_acceleration: float | None = None
    max_joint_jerk: float | None = None
    holonomic: bool = False
    base_source: str = "commanded"

    def to_dict(self) -> dict:
        d = asdict(self)
        if not self.holonomic:
            for name in HOLONOMIC_ONLY:
                d.pop(name)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsReport":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in known})


HOLONOMIC_ONLY = ("max_translation_velocity", "max_translation_acceleration", "max_translation_jerk")

# (field, row label) in results-table order
ROWS = (
    ("position_rmse", "Position RMSE (m)"),
    ("rotation_rmse", "Rotation RMSE (rad)"),
    ("mean_solve_time", "Computation Time (s)"),
    ("max_forward_velocity", "Max Forward Velocity (m/s)"),
    ("max_translation_velocity", "Max Translation Velocity (m/s)"),
    ("max_angular_velocity", "Max Angular Velocity (rad/s)"),
    ("max_forward_acceleration", "Max Forward Acceleration (m/s^2)"),
    ("max_translation_acceleration", "Max Translation Acceleration (m/s^2)"),
    ("max_angular_acceleration", "Max Ang Accel (rad/s^2)"),
    ("max_forward_jerk", "Max Forward Jerk (m/s^3)"),
    ("max_translation_jerk", "Max Translation Jerk (m/s^3)"),
    ("max_angular_jerk", "Max Angular Jerk (rad/s^3)"),
    ("max_joint_velocity", "Max Joint Velocity (rad/s)"),
    ("max_joint_acceleration", "Max Joint Acceleration (rad/s^2)"),
    ("max_joint_jerk", "Max Joint Jerk (rad/s^3)"),
)


def rmse(table: TraceTable) -> tuple[float, float]:
    if len(table) == 0:
        raise TraceTooShortError("rmse of an empty trace")
    pe = np.asarray(table.position_error, dtype=float)
    re = np.asarray(table.rotation_error, dtype=float)
    return float(np.sqrt(np.mean(pe * pe))), float(np.sqrt(np.mean(re * re)))


def _max_abs(x: np.ndarray) -> float | None:
    return float(np.max(np.abs(x))) if x.size else None


def _derivatives(v: np.ndarray, dt: float, rows: int) -> list[float | None]:
    """Maxima of the velocity samples ``v`` and their first two differences."""
    out = []
    for order in (1, 2, 3):
        out.append(_max_abs(v) if rows >= order + 1 else None)
        v = np.diff(v, axis=0) / dt
    return out


def differenced_base_velocities(table: TraceTable) -> np.ndarray:
    """(N-1, 3) body-frame (forward, lateral, angular) rates between recorded base poses."""
    dt = table.dt
    out = np.zeros((max(len(table) - 1, 0), 3))
    for k in range(len(out)):
        a, b = (_planar_pose(table.base[i]) for i in (k, k + 1))
        w = log_se3(a.inverse() @ b) / dt
        out[k] = (w[3], w[4], w[2])
    return out


def _planar_pose(xyyaw: np.ndarray) -> Pose:
    c, s = math.cos(xyyaw[2]), math.sin(xyyaw[2])
    return Pose(np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]),
                np.array([xyyaw[0], xyyaw[1], 0.0]))


def channel_derivative_maxima(table: TraceTable, base_channels: int,
                              base_source: str = "commanded") -> dict[str, float | None]:
    """Velocity/acceleration/jerk maxima per base channel and over all joints."""
    if len(table) < MIN_ROWS:
        raise TraceTooShortError(f"need at least {MIN_ROWS} rows, got {len(table)}")
    return _derivative_fields(table, base_channels, base_source)


def _derivative_fields(table: TraceTable, base_channels: int, base_source: str) -> dict[str, float | None]:
    if base_source not in BASE_SOURCES:
        raise ValueError(f"base_source must be one of {BASE_SOURCES}, got {base_source!r}")
    n = len(table)
    dt = table.dt
    out: dict[str, float | None] = {}
    if dt is None:
        return {name: None for name, _ in ROWS[3:]}

    cmd = table.inputs[:, :base_channels]
    if base_channels == 3:
        names = {"forward": 0, "translation": 1, "angular": 2}
    elif base_channels == 2:
        names = {"forward": 0, "angular": 1}
    else:
        names = {}
    if base_source == "differenced":
        # lateral rate sits in column 1; a nonholonomic base keeps it at zero
        rates = differenced_base_velocities(table)
        cmd = rates if base_channels == 3 else rates[:, [0, 2]]
    for label, col in names.items():
        v, a, j = _derivatives(cmd[:, col], dt, n)
        out[f"max_{label}_velocity"] = v
        out[f"max_{label}_acceleration"] = a
        out[f"max_{label}_jerk"] = j

    q = table.inputs[:, base_channels:]
    if q.shape[1]:
        qd = np.diff(q, axis=0) / dt
        v, a, j = _derivatives(qd, dt, n)
    else:
        v = a = j = None
    out["max_joint_velocity"], out["max_joint_acceleration"], out["max_joint_jerk"] = v, a, j
    return out


def build_report(table: TraceTable, base_channels: int, base_source: str = "commanded") -> MetricsReport:
    """Full report; short traces get ``None`` for the fields they cannot support."""
    pos, rot = rmse(table)
    return MetricsReport(
        position_rmse=pos,
        rotation_rmse=rot,
        mean_solve_time=float(np.mean(table.solve_time)),
        holonomic=base_channels == 3,
        base_source=base_source,
        **_derivative_fields(table, base_channels, base_source),
    )


def report_to_json(r: MetricsReport) -> str:
    return json.dumps(r.to_dict(), indent=2) + "\n"


def _cell(r: MetricsReport, name: str) -> str:
    if name in HOLONOMIC_ONLY and not r.holonomic:
        return "-"
    v = getattr(r, name)
    return "n/a" if v is None else f"{v:.4f}"


def report_to_text(r: MetricsReport, title: str = "") -> str:
    width = max(len(label) for _, label in ROWS)
    lines = [title] if title else []
    lines.append(f"# base velocities: {r.base_source}; joint velocities: differenced positions")
    lines += [f"{label:<{width}}  {_cell(r, name):>10}" for name, label in ROWS]
    return "\n".join(lines) + "\n"
