import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lieplan import assets
from lieplan.kinematics import pose_to_dict
from lieplan.liegroup import Pose, exp_se3, twist
from lieplan.paths import (
    PathError,
    PathParams,
    evaluate,
    load_desired_path,
    load_path_config,
    params_from_dict,
    params_to_dict,
    sample,
    sample_count,
    stationary_path,
    tangent_frame,
)

helix = PathParams("vertical_helix", radius=0.5, rise=1.0, revolutions=1.0)
wave = PathParams("sine_wave", speed=0.15, amplitude=0.5, period=10.0, height=0.5)
corkscrew = PathParams("horizontal_helix", speed=0.15, radius=0.3, revolutions=2.0, height=0.6)
times = st.floats(0.0, 20.0)


def test_vertical_helix_starts_on_the_x_axis():
    p = evaluate(helix, 0.0)
    assert np.allclose(p.translation, [0.5, 0.0, 0.0], atol=1e-15)


def test_vertical_helix_closed_form_points():
    # quarter of the way round: (0, r, rise / 4)
    assert np.allclose(evaluate(helix, 5.0).translation, [0.0, 0.5, 0.25], atol=1e-15)
    assert np.allclose(evaluate(helix, 20.0).translation, [0.5, 0.0, 1.0], atol=1e-15)


def test_sine_wave_closed_form_points():
    assert np.allclose(evaluate(wave, 2.5).translation, [0.375, 0.5, 0.5], atol=1e-15)
    assert np.allclose(evaluate(wave, 10.0).translation, [1.5, 0.0, 0.5], atol=1e-15)


@pytest.mark.parametrize("params", [helix, wave, corkscrew])
@given(t=times)
def test_orientations_are_orthonormal(params, t):
    r = evaluate(params, t).rotation
    assert np.abs(r.T @ r - np.eye(3)).max() < 1e-12
    assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("params", [helix, wave, corkscrew])
def test_first_axis_follows_the_tangent(params):
    # 1 kHz finite differences of position against the frame's x axis
    h = 1e-3
    for t in np.linspace(0.01, 19.99, 50):
        d = (evaluate(params, t + h).translation - evaluate(params, t - h).translation) / (2 * h)
        assert np.abs(d / np.linalg.norm(d) - evaluate(params, t).rotation[:, 0]).max() < 1e-3


@given(t=times)
def test_sine_wave_frame_stays_level(t):
    # the wave lies in a horizontal plane, so z stays world up
    assert np.allclose(evaluate(wave, t).rotation[:, 2], [0, 0, 1], atol=1e-12)


def test_vertical_tangent_uses_fallback_reference():
    r = tangent_frame(np.array([0.0, 0.0, 2.0]))
    assert np.allclose(r[:, 0], [0, 0, 1]) and np.allclose(r[:, 2], [1, 0, 0])
    assert np.allclose(r.T @ r, np.eye(3))


def test_origin_places_the_path():
    origin = exp_se3(twist((0, 0, 0.7), (1.0, -2.0, 0.3)))
    placed = PathParams("vertical_helix", origin=origin)
    for t in (0.0, 3.3, 12.0):
        local = evaluate(helix, t)
        world = evaluate(placed, t)
        assert np.allclose(world.translation, origin.rotation @ local.translation + origin.translation)
        assert np.allclose(world.rotation, origin.rotation @ local.rotation, atol=1e-12)


# -- sampling ----------------------------------------------------------------

def test_sample_count_includes_both_ends():
    assert len(sample(helix)) == 101
    assert sample_count(0.2, 0.2) == 2
    assert sample_count(0.2, 0.3) == 2


def test_samples_are_exact_evaluations():
    path = sample(corkscrew)
    for k in (0, 1, 37, 100):
        p = evaluate(corkscrew, k * 0.2)
        assert np.array_equal(path.samples[k].matrix(), p.matrix())


def test_sampling_is_deterministic():
    a, b = sample(wave), sample(wave)
    assert all(np.array_equal(x.matrix(), y.matrix()) for x, y in zip(a.samples, b.samples))


@pytest.mark.parametrize("params", [helix, wave, corkscrew])
def test_consecutive_samples_are_close(params):
    s = sample(params).samples
    step = params.peak_speed() * 0.2
    for a, b in zip(s, s[1:]):
        assert np.linalg.norm(b.translation - a.translation) <= step + 1e-12


def test_peak_speed_matches_dense_sampling():
    for params in (helix, wave, corkscrew):
        t = np.linspace(0.0, 20.0, 20001)
        x = np.array([evaluate(params, s).translation for s in t])
        speed = np.linalg.norm(np.diff(x, axis=0), axis=1) / (t[1] - t[0])
        assert speed.max() == pytest.approx(params.peak_speed(), rel=1e-4)


def test_stationary_path():
    p = stationary_path(Pose.identity(), 20)
    assert len(p) == 20 and p.duration == pytest.approx(3.8)


# -- validation and files ----------------------------------------------------

@pytest.mark.parametrize("bad", [{"radius": 0.0}, {"rise": -1.0}, {"dt": 0.0}, {"duration": -5.0}])
def test_non_positive_parameters_rejected(bad):
    with pytest.raises(PathError):
        PathParams("vertical_helix", **bad).validate()


def test_unknown_kind_rejected():
    with pytest.raises(PathError, match="unknown path kind"):
        PathParams("zigzag").validate()


def test_speed_cap():
    with pytest.raises(PathError, match="peak path speed"):
        wave.validate(max_speed=0.1)
    wave.validate(max_speed=1.0)


def test_evaluation_outside_duration_rejected():
    with pytest.raises(PathError):
        evaluate(helix, 20.5)
    with pytest.raises(PathError):
        evaluate(helix, -0.1)


def test_bundled_paths_load():
    for name in assets.PATHS:
        p = load_path_config(assets.resolve(name, "paths"))
        assert p.kind == name and p.dt == 0.2 and p.duration == 20.0


def test_config_round_trip():
    p = load_path_config(assets.resolve("vertical_helix", "paths"))
    again = params_from_dict(json.loads(json.dumps(params_to_dict(p))))
    assert params_to_dict(again) == params_to_dict(p)


def test_malformed_config_rejected(tmp_path):
    f = tmp_path / "p.json"
    f.write_text('{"kind": "sine_wave", "speed": "fast"}')
    with pytest.raises(PathError, match="malformed"):
        load_path_config(f)
    f.write_text("{not json")
    with pytest.raises(PathError):
        load_path_config(f)


def test_shorter_duration_samples_a_prefix():
    full = load_desired_path(assets.resolve("horizontal_helix", "paths"))
    p = load_desired_path(assets.resolve("horizontal_helix", "paths"), duration=1.0)
    assert len(p) == 6 and p.duration == 1.0
    assert all(np.array_equal(a.matrix(), b.matrix()) for a, b in zip(p.samples, full.samples))


def test_duration_past_the_end_rejected():
    with pytest.raises(PathError, match="past the end"):
        sample(helix, duration=25.0)
    with pytest.raises(PathError):
        sample(helix, dt=0.2, duration=0.1)


def test_waypoint_file_is_used_as_given(tmp_path):
    poses = [Pose.from_translation([0.1 * k, 0.0, 0.5]) for k in range(4)]
    f = tmp_path / "w.json"
    f.write_text(json.dumps({"dt": 0.1, "waypoints": [pose_to_dict(p) for p in poses]}))
    path = load_desired_path(f)
    assert len(path) == 4 and path.dt == 0.1
    assert all(np.allclose(a.matrix(), b.matrix()) for a, b in zip(path.samples, poses))


def test_empty_waypoint_file_rejected(tmp_path):
    f = tmp_path / "w.json"
    f.write_text('{"dt": 0.1, "waypoints": []}')
    with pytest.raises(PathError):
        load_desired_path(f)


def test_full_turn_helix_tangent_returns_to_start():
    s = sample(helix).samples
    assert s[0].allclose(Pose(s[-1].rotation, s[0].translation), atol=1e-12)
    assert math.isclose(s[-1].translation[2] - s[0].translation[2], 1.0, abs_tol=1e-12)
