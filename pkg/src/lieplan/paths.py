"""Desired end-effector paths sampled at a fixed time step.

Local position parameterizations (before placement by ``origin``):

    vertical_helix    (r cos wt, r sin wt, rise t / T),   w = 2 pi revolutions / T
    sine_wave         (s t, A sin(2 pi t / period), height)
    horizontal_helix  (s t, r cos wt, height + r sin wt), w = 2 pi revolutions / T

Orientation follows the path: x along the unit tangent, z the world up axis
made orthogonal to it, y completing a right-handed frame. When the tangent
is vertical the world x axis replaces up as the reference.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .liegroup import Pose, compose
from .kinematics import _pose_from_dict, pose_to_dict

PATH_KINDS = ("vertical_helix", "sine_wave", "horizontal_helix")
_UP = np.array([0.0, 0.0, 1.0])
_WORLD_X = np.array([1.0, 0.0, 0.0])
_DEGENERATE = 1e-6


class PathError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PathParams:
    kind: str
    name: str = ""
    radius: float = 0.5
    rise: float = 1.0
    revolutions: float = 1.0
    speed: float = 0.15
    amplitude: float = 0.5
    period: float = 10.0
    height: float = 0.5
    origin: Pose = field(default_factory=Pose.identity)
    dt: float = 0.2
    duration: float = 20.0

    def validate(self, max_speed: float | None = None) -> None:
        if self.kind not in PATH_KINDS:
            raise PathError(f"unknown path kind {self.kind!r}")
        used = {
            "vertical_helix": ("radius", "rise", "revolutions"),
            "sine_wave": ("speed", "amplitude", "period"),
            "horizontal_helix": ("speed", "radius", "revolutions"),
        }[self.kind] + ("dt", "duration")
        for name in used:
            if not getattr(self, name) > 0.0:
                raise PathError(f"{self.kind}: {name} must be > 0, got {getattr(self, name)}")
        if not self.origin.is_valid():
            raise PathError("origin is not a valid pose")
        if max_speed is not None and self.peak_speed() > max_speed:
            raise PathError(f"{self.kind}: peak path speed {self.peak_speed():.3f} m/s exceeds {max_speed} m/s")

    def peak_speed(self) -> float:
        """Largest tangential speed over the path (closed form)."""
        w = 2.0 * math.pi * self.revolutions / self.duration
        if self.kind == "vertical_helix":
            return math.hypot(self.radius * w, self.rise / self.duration)
        if self.kind == "sine_wave":
            return math.hypot(self.speed, self.amplitude * 2.0 * math.pi / self.period)
        return math.hypot(self.speed, self.radius * w)


@dataclass(frozen=True, eq=False)
class DesiredPath:
    samples: list[Pose]
    dt: float
    duration: float
    name: str = ""

    def __len__(self) -> int:
        return len(self.samples)


def sample_count(dt: float, duration: float) -> int:
    return int(math.floor(duration / dt + 1e-9)) + 1


def local_position(p: PathParams, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Position and velocity in the path's own frame."""
    w = 2.0 * math.pi * p.revolutions / p.duration
    if p.kind == "vertical_helix":
        c, s = math.cos(w * t), math.sin(w * t)
        rate = p.rise / p.duration
        return (np.array([p.radius * c, p.radius * s, rate * t]),
                np.array([-p.radius * w * s, p.radius * w * c, rate]))
    if p.kind == "sine_wave":
        k = 2.0 * math.pi / p.period
        return (np.array([p.speed * t, p.amplitude * math.sin(k * t), p.height]),
                np.array([p.speed, p.amplitude * k * math.cos(k * t), 0.0]))
    if p.kind == "horizontal_helix":
        c, s = math.cos(w * t), math.sin(w * t)
        return (np.array([p.speed * t, p.radius * c, p.height + p.radius * s]),
                np.array([p.speed, -p.radius * w * s, p.radius * w * c]))
    raise PathError(f"unknown path kind {p.kind!r}")


def tangent_frame(tangent: np.ndarray) -> np.ndarray:
    """Rotation with x along ``tangent`` and z as close to world up as possible."""
    x = tangent / np.linalg.norm(tangent)
    ref = _UP - (_UP @ x) * x
    if np.linalg.norm(ref) < _DEGENERATE:
        ref = _WORLD_X - (_WORLD_X @ x) * x
    z = ref / np.linalg.norm(ref)
    y = np.cross(z, x)
    return np.column_stack((x, y, z))


def evaluate(p: PathParams, t: float) -> Pose:
    if not (-1e-9 <= t <= p.duration + 1e-9):
        raise PathError(f"t={t} outside [0, {p.duration}]")
    pos, vel = local_position(p, t)
    world_vel = p.origin.rotation @ vel
    world = compose(p.origin, Pose.from_translation(pos))
    return Pose(tangent_frame(world_vel), world.translation)


def sample(p: PathParams, dt: float | None = None, duration: float | None = None) -> DesiredPath:
    """Uniform samples over ``[0, duration]``.

    The path's shape, including how fast it turns, is fixed by ``p``; a
    shorter ``duration`` samples a prefix of it rather than compressing it.
    """
    dt = p.dt if dt is None else dt
    duration = p.duration if duration is None else duration
    if not dt > 0.0 or duration < dt:
        raise PathError(f"need dt > 0 and duration >= dt, got dt={dt}, duration={duration}")
    if duration > p.duration + 1e-9:
        raise PathError(f"duration {duration} s runs past the end of the path ({p.duration} s)")
    n = sample_count(dt, duration)
    return DesiredPath([evaluate(p, min(k * dt, duration)) for k in range(n)], dt, duration, p.name)


def stationary_path(pose: Pose, n: int, dt: float = 0.2, name: str = "stationary") -> DesiredPath:
    return DesiredPath([pose] * n, dt, (n - 1) * dt, name)


# -- path config files -----------------------------------------------------

_NUMERIC = ("radius", "rise", "revolutions", "speed", "amplitude", "period", "height", "dt", "duration")


def params_from_dict(d: dict) -> PathParams:
    try:
        kw = {k: float(d[k]) for k in _NUMERIC if k in d}
        origin = _pose_from_dict(d["origin"]) if "origin" in d else Pose.identity()
        p = PathParams(kind=d["kind"], name=d.get("name", d["kind"]), origin=origin, **kw)
    except (KeyError, TypeError, ValueError) as exc:
        raise PathError(f"malformed path config: {exc!r}") from exc
    p.validate()
    return p


def params_to_dict(p: PathParams) -> dict:
    d = {"name": p.name, "kind": p.kind}
    d.update({k: getattr(p, k) for k in _NUMERIC})
    d["origin"] = pose_to_dict(p.origin)
    return d


def load_path_config(path) -> PathParams:
    """Load a path config file; waypoint-list files are handled by :func:`load_desired_path`."""
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise PathError(f"{path}: {exc}") from exc
    return params_from_dict(d)


def load_desired_path(path, dt: float | None = None, duration: float | None = None) -> DesiredPath:
    """Load either a parametric path config or an explicit waypoint list.

    Waypoint files hold ``{"dt": ..., "waypoints": [pose, ...]}`` with poses in
    the robot-description format; they are used as given, without interpolation.
    """
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise PathError(f"{path}: {exc}") from exc
    if "waypoints" in d:
        try:
            poses = [_pose_from_dict(w) for w in d["waypoints"]]
            step = float(dt if dt is not None else d["dt"])
        except (KeyError, TypeError, ValueError) as exc:
            raise PathError(f"malformed waypoint file: {exc!r}") from exc
        if not poses or any(not p.is_valid() for p in poses):
            raise PathError("waypoint list is empty or holds invalid poses")
        return DesiredPath(poses, step, (len(poses) - 1) * step, d.get("name", Path(path).stem))
    return sample(params_from_dict(d), dt, duration)
