"""SE(3)/SO(3) arithmetic used by the kinematic model and the planner.

Conventions:
    - A twist is a float ndarray of shape (6,) laid out as (angular, linear).
    - ``hat`` maps a twist to its 4x4 Lie-algebra matrix, ``vee`` inverts it.
    - Poses are stored as rotation matrix + translation vector, never as
      quaternions. ``Pose.matrix()`` gives the homogeneous form.

All functions are pure; ``Pose`` is immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Structural tolerance for poses and Lie-algebra matrices.
STRUCTURE_TOL = 1e-9
# Tolerance for compose(p, inverse(p)) == identity.
COMPOSE_TOL = 1e-12
# Below this rotation angle the Rodrigues / V-matrix coefficients use series.
SMALL_ANGLE = 1e-5
# Series threshold for the higher-order coefficients of the SE(3) Jacobians,
# whose closed forms lose precision much earlier than Rodrigues.
JACOBIAN_SERIES_ANGLE = 1e-2
# log is refused when the rotation angle is within this margin of pi.
LOG_PI_MARGIN = 1e-6

_EYE3 = np.eye(3)


class LieGroupError(ValueError):
    """Base class for manifold arithmetic failures."""


class MalformedAlgebraError(LieGroupError):
    """A 4x4 matrix does not have the structure of an se(3) element."""


class NearSingularLogError(LieGroupError):
    """The rotation angle is too close to pi for a well-defined logarithm."""

    def __init__(self, angle: float, context: str = ""):
        self.angle = angle
        msg = f"rotation angle {angle:.9f} rad is within {LOG_PI_MARGIN:g} of pi"
        if context:
            msg = f"{context}: {msg}"
        super().__init__(msg)


def skew(w: np.ndarray) -> np.ndarray:
    """3x3 antisymmetric matrix such that ``skew(w) @ x == cross(w, x)``."""
    return np.array([[0.0, -w[2], w[1]],
                     [w[2], 0.0, -w[0]],
                     [-w[1], w[0], 0.0]])


def unskew(m: np.ndarray) -> np.ndarray:
    return np.array([m[2, 1], m[0, 2], m[1, 0]])


def twist(angular=(0.0, 0.0, 0.0), linear=(0.0, 0.0, 0.0)) -> np.ndarray:
    """Build a twist from its angular and linear parts."""
    out = np.empty(6)
    out[:3] = angular
    out[3:] = linear
    return out


def hat(t: np.ndarray) -> np.ndarray:
    m = np.zeros((4, 4))
    m[:3, :3] = skew(t[:3])
    m[:3, 3] = t[3:]
    return m


def vee(m: np.ndarray) -> np.ndarray:
    """Inverse of :func:`hat`. Raises if ``m`` is not an se(3) element."""
    m = np.asarray(m, dtype=float)
    if m.shape != (4, 4):
        raise MalformedAlgebraError(f"expected a 4x4 matrix, got shape {m.shape}")
    block = m[:3, :3]
    sym = 0.5 * (block + block.T)
    if np.linalg.norm(sym) > STRUCTURE_TOL:
        raise MalformedAlgebraError(
            f"rotation block is not antisymmetric (symmetric part norm {np.linalg.norm(sym):.3g})")
    if np.abs(m[3]).max() > STRUCTURE_TOL:
        raise MalformedAlgebraError("bottom row is not zero")
    return twist(unskew(block), m[:3, 3])


# -- scalar coefficient helpers -------------------------------------------

def _sinc_coeffs(theta: float) -> tuple[float, float, float]:
    """(sin t / t, (1 - cos t) / t^2, (t - sin t) / t^3)."""
    if theta < SMALL_ANGLE:
        t2 = theta * theta
        return 1.0 - t2 / 6.0, 0.5 - t2 / 24.0, 1.0 / 6.0 - t2 / 120.0
    s = math.sin(theta)
    half = math.sin(0.5 * theta)
    return s / theta, 2.0 * half * half / (theta * theta), (theta - s) / theta**3


def _inv_v_coeff(theta: float) -> float:
    """(1 - (t/2) cot(t/2)) / t^2, the omega^2 coefficient of V^-1."""
    if theta < SMALL_ANGLE:
        t2 = theta * theta
        return 1.0 / 12.0 + t2 / 720.0
    half = 0.5 * theta
    return (1.0 - half * math.cos(half) / math.sin(half)) / (theta * theta)


# -- SO(3) ----------------------------------------------------------------

def exp_so3(w: np.ndarray) -> np.ndarray:
    theta = math.sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2])
    a, b, _ = _sinc_coeffs(theta)
    k = skew(w)
    return _EYE3 + a * k + b * (k @ k)


def log_so3(r: np.ndarray, context: str = "") -> np.ndarray:
    """Rotation vector of ``r`` with norm in [0, pi - LOG_PI_MARGIN]."""
    axis2 = np.array([r[2, 1] - r[1, 2], r[0, 2] - r[2, 0], r[1, 0] - r[0, 1]])
    s2 = math.sqrt(axis2 @ axis2)  # 2 sin(theta)
    c = 0.5 * (r[0, 0] + r[1, 1] + r[2, 2] - 1.0)
    theta = math.atan2(0.5 * s2, c)
    if theta > math.pi - LOG_PI_MARGIN:
        raise NearSingularLogError(theta, context)
    if theta < SMALL_ANGLE:
        return (0.5 + theta * theta / 12.0) * axis2
    if theta < 0.75 * math.pi:
        return (theta / s2) * axis2
    # Near pi the antisymmetric part vanishes; read the axis from the
    # symmetric part and take the sign from the antisymmetric one.
    one_minus_c = 1.0 - c
    b = 0.5 * (r + r.T) - c * _EYE3
    i = int(np.argmax(np.diag(b)))
    ai = math.sqrt(max(b[i, i], 0.0) / one_minus_c)
    axis = b[:, i] / (one_minus_c * ai)
    axis /= np.linalg.norm(axis)
    if axis @ axis2 < 0.0:
        axis = -axis
    return theta * axis


def so3_left_jacobian(w: np.ndarray) -> np.ndarray:
    theta = math.sqrt(w @ w)
    _, b, c = _sinc_coeffs(theta)
    k = skew(w)
    return _EYE3 + b * k + c * (k @ k)


def so3_left_jacobian_inv(w: np.ndarray) -> np.ndarray:
    theta = math.sqrt(w @ w)
    k = skew(w)
    return _EYE3 - 0.5 * k + _inv_v_coeff(theta) * (k @ k)


# -- SE(3) ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Pose:
    """Rigid transform: ``x_world = rotation @ x_local + translation``."""

    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    @classmethod
    def identity(cls) -> "Pose":
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_translation(cls, xyz) -> "Pose":
        return cls(np.eye(3), np.asarray(xyz, dtype=float))

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "Pose":
        m = np.asarray(m, dtype=float)
        return cls(m[:3, :3].copy(), m[:3, 3].copy())

    def matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.translation
        return m

    def __matmul__(self, other: "Pose") -> "Pose":
        return compose(self, other)

    def inverse(self) -> "Pose":
        return inverse(self)

    def structure_error(self) -> tuple[float, float]:
        """(||R^T R - I||_F, |det R - 1|), both zero for a valid pose."""
        r = self.rotation
        return (float(np.linalg.norm(r.T @ r - _EYE3)),
                float(abs(np.linalg.det(r) - 1.0)))

    def is_valid(self, tol: float = STRUCTURE_TOL) -> bool:
        if self.rotation.shape != (3, 3) or self.translation.shape != (3,):
            return False
        if not (np.all(np.isfinite(self.rotation)) and np.all(np.isfinite(self.translation))):
            return False
        orth, det = self.structure_error()
        return orth <= tol and det <= tol

    def allclose(self, other: "Pose", atol: float = 1e-9) -> bool:
        return bool(np.allclose(self.rotation, other.rotation, rtol=0.0, atol=atol)
                    and np.allclose(self.translation, other.translation, rtol=0.0, atol=atol))


def compose(a: Pose, b: Pose) -> Pose:
    return Pose(a.rotation @ b.rotation, a.rotation @ b.translation + a.translation)


def inverse(p: Pose) -> Pose:
    rt = p.rotation.T
    return Pose(rt, -(rt @ p.translation))


def exp_se3(t: np.ndarray) -> Pose:
    """Closed-form exponential of a twist (Rodrigues + left Jacobian)."""
    w = t[:3]
    theta = math.sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2])
    a, b, c = _sinc_coeffs(theta)
    k = skew(w)
    k2 = k @ k
    rot = _EYE3 + a * k + b * k2
    v_mat = _EYE3 + b * k + c * k2
    return Pose(rot, v_mat @ t[3:])


def log_se3(p: Pose, context: str = "") -> np.ndarray:
    """Twist ``t`` with ``exp_se3(t) == p`` and ``|t[:3]| < pi``.

    Raises :class:`NearSingularLogError` when the rotation angle is within
    ``LOG_PI_MARGIN`` of pi.
    """
    w = log_so3(p.rotation, context)
    out = np.empty(6)
    out[:3] = w
    out[3:] = so3_left_jacobian_inv(w) @ p.translation
    return out


def rotation_angle(a: Pose, b: Pose) -> float:
    """Geodesic angle between the orientations of two poses, in [0, pi]."""
    r = a.rotation.T @ b.rotation
    axis2 = np.array([r[2, 1] - r[1, 2], r[0, 2] - r[2, 0], r[1, 0] - r[0, 1]])
    c = 0.5 * (r[0, 0] + r[1, 1] + r[2, 2] - 1.0)
    return math.atan2(0.5 * math.sqrt(axis2 @ axis2), c)


def adjoint(p: Pose) -> np.ndarray:
    """6x6 adjoint in (angular, linear) layout: hat(Ad t) = P hat(t) P^-1."""
    r = p.rotation
    out = np.zeros((6, 6))
    out[:3, :3] = r
    out[3:, 3:] = r
    out[3:, :3] = skew(p.translation) @ r
    return out


def _q_block(w: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Lower-left block of the SE(3) left Jacobian."""
    theta = math.sqrt(w @ w)
    t2 = theta * theta
    if theta < JACOBIAN_SERIES_ANGLE:
        t4 = t2 * t2
        c2 = 1.0 / 6.0 - t2 / 120.0 + t4 / 5040.0
        c3 = 1.0 / 24.0 - t2 / 720.0 + t4 / 40320.0
        c4 = 1.0 / 120.0 - t2 / 2520.0 + t4 / 120960.0
    else:
        s = math.sin(theta)
        co = math.cos(theta)
        c2 = (theta - s) / (t2 * theta)
        c3 = (t2 + 2.0 * co - 2.0) / (2.0 * t2 * t2)
        c4 = (2.0 * theta - 3.0 * s + theta * co) / (2.0 * t2 * t2 * theta)
    wx = skew(w)
    vx = skew(v)
    wv = wx @ vx
    vw = vx @ wx
    wvw = wv @ wx
    return (0.5 * vx + c2 * (wv + vw + wvw)
            + c3 * (wx @ wv + vw @ wx - 3.0 * wvw)
            + c4 * (wvw @ wx + wx @ wvw))


def se3_left_jacobian(t: np.ndarray) -> np.ndarray:
    """``exp(t + d) ~= exp(J_l(t) d) exp(t)`` to first order in ``d``."""
    jl = so3_left_jacobian(t[:3])
    out = np.zeros((6, 6))
    out[:3, :3] = jl
    out[3:, 3:] = jl
    out[3:, :3] = _q_block(t[:3], t[3:])
    return out


def se3_right_jacobian(t: np.ndarray) -> np.ndarray:
    """``exp(t + d) ~= exp(t) exp(J_r(t) d)`` to first order in ``d``."""
    return se3_left_jacobian(-t)


def se3_right_jacobian_inv(t: np.ndarray) -> np.ndarray:
    """Inverse of :func:`se3_right_jacobian`, via its block structure."""
    w = -t[:3]
    jinv = so3_left_jacobian_inv(w)
    q = _q_block(w, -t[3:])
    out = np.zeros((6, 6))
    out[:3, :3] = jinv
    out[3:, 3:] = jinv
    out[3:, :3] = -(jinv @ q @ jinv)
    return out
