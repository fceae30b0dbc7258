"""Cross-check the bundled paths against hand-written closed forms.

For each path: the start point and unit tangent are recomputed here from
the raw config numbers (no package code), then compared with the sampled
poses. Also prints the peak speed, the sample count and how far the
frame turns over the run.
"""

import json
import math

import numpy as np

from lieplan import assets
from lieplan.liegroup import Pose, rotation_angle
from lieplan.paths import load_desired_path


def closed_form_start(cfg):
    """Start position and tangent in the path's own frame."""
    T = cfg["duration"]
    if cfg["kind"] == "vertical_helix":
        w = 2 * math.pi * cfg["revolutions"] / T
        return np.array([cfg["radius"], 0.0, 0.0]), np.array([0.0, cfg["radius"] * w, cfg["rise"] / T])
    if cfg["kind"] == "sine_wave":
        k = 2 * math.pi / cfg["period"]
        return np.array([0.0, 0.0, cfg["height"]]), np.array([cfg["speed"], cfg["amplitude"] * k, 0.0])
    w = 2 * math.pi * cfg["revolutions"] / T
    return np.array([0.0, cfg["radius"], cfg["height"]]), np.array([cfg["speed"], 0.0, cfg["radius"] * w])


def main():
    for name in assets.PATHS:
        f = assets.resolve(name, "paths")
        cfg = json.loads(f.read_text())
        rot = np.array(cfg["origin"]["rotation"], dtype=float).reshape(3, 3)
        shift = np.array(cfg["origin"]["translation"], dtype=float)
        p0, v0 = closed_form_start(cfg)
        start, tangent = rot @ p0 + shift, rot @ v0 / np.linalg.norm(v0)

        path = load_desired_path(f)
        first = path.samples[0]
        turn = max(rotation_angle(first, p) for p in path.samples)
        speeds = [np.linalg.norm(b.translation - a.translation) / path.dt
                  for a, b in zip(path.samples, path.samples[1:])]
        print(f"{name}")
        print(f"  samples            {len(path)}  (dt {path.dt}, duration {path.duration})")
        print(f"  start error        {np.abs(first.translation - start).max():.1e} m")
        print(f"  tangent error      {np.abs(first.rotation[:, 0] - tangent).max():.1e}")
        print(f"  mean chord speed   max {max(speeds):.4f} m/s")
        print(f"  largest frame turn {turn:.3f} rad from the start pose")
        print(f"  start pose from identity {rotation_angle(first, Pose.identity()):.3f} rad")


if __name__ == "__main__":
    main()
