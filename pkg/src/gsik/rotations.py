"""Minimal 3D rotation helpers shared across the kinematics and solver code.

Conventions: right-handed coordinate system, rotation matrices act on column
vectors (world = R @ local), quaternions are stored [x, y, z, w].
"""
from __future__ import annotations

import numpy as np

from .errors import ValidationError

_EPS = 1e-12


def axis_angle_matrix(axis: np.ndarray, angle: float) -> np.ndarray:
    """Rotation matrix for a unit axis and an angle in radians (Rodrigues)."""
    x, y, z = axis
    c = np.cos(angle)
    s = np.sin(angle)
    t = 1.0 - c
    return np.array(
        [
            [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
            [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
            [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
        ]
    )


def matrix_to_axis_angle(rot: np.ndarray) -> np.ndarray:
    """Rotation vector (axis * angle, angle in [0, pi]) of a rotation matrix.

    Stable near 0 (falls back to the skew part) and near pi (falls back to
    the dominant diagonal entry).
    """
    trace = float(np.trace(rot))
    cos_angle = np.clip((trace - 1.0) * 0.5, -1.0, 1.0)
    angle = float(np.arccos(cos_angle))
    if angle < 1e-7:
        # log(R) ~ skew part for small rotations
        return 0.5 * np.array(
            [rot[2, 1] - rot[1, 2], rot[0, 2] - rot[2, 0], rot[1, 0] - rot[0, 1]]
        )
    if angle > np.pi - 1e-5:
        # near pi the skew part degenerates; use R = 2aa^T - I + cos term
        d = np.diagonal(rot)
        k = int(np.argmax(d))
        axis = np.empty(3)
        axis[k] = np.sqrt(max((d[k] - cos_angle) / (1.0 - cos_angle), 0.0))
        denom = 2.0 * axis[k] * (1.0 - cos_angle)
        i, j = (k + 1) % 3, (k + 2) % 3
        axis[i] = (rot[i, k] + rot[k, i]) / denom
        axis[j] = (rot[j, k] + rot[k, j]) / denom
        axis /= np.linalg.norm(axis)
        # pick the sign that matches the skew part (vanishes exactly at pi)
        skew = np.array(
            [rot[2, 1] - rot[1, 2], rot[0, 2] - rot[2, 0], rot[1, 0] - rot[0, 1]]
        )
        if np.dot(axis, skew) < 0.0:
            axis = -axis
        return axis * angle
    axis = np.array(
        [rot[2, 1] - rot[1, 2], rot[0, 2] - rot[2, 0], rot[1, 0] - rot[0, 1]]
    ) / (2.0 * np.sin(angle))
    return axis * angle


def quat_to_matrix(quat: np.ndarray) -> np.ndarray:
    """Rotation matrix of a quaternion [x, y, z, w]; normalizes first."""
    q = np.asarray(quat, dtype=float)
    n = np.linalg.norm(q)
    if n < _EPS:
        raise ValidationError("zero quaternion has no orientation")
    x, y, z, w = q / n
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def matrix_to_quat(rot: np.ndarray) -> np.ndarray:
    """Quaternion [x, y, z, w] of a rotation matrix (w >= 0 branch)."""
    m = rot
    tr = m[0, 0] + m[1, 1] + m[2, 2]
    if tr > 0.0:
        s = np.sqrt(tr + 1.0) * 2.0
        q = np.array(
            [(m[2, 1] - m[1, 2]) / s, (m[0, 2] - m[2, 0]) / s, (m[1, 0] - m[0, 1]) / s, 0.25 * s]
        )
    elif m[0, 0] > m[1, 1] and m[0, 0] > m[2, 2]:
        s = np.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2]) * 2.0
        q = np.array(
            [0.25 * s, (m[0, 1] + m[1, 0]) / s, (m[0, 2] + m[2, 0]) / s, (m[2, 1] - m[1, 2]) / s]
        )
    elif m[1, 1] > m[2, 2]:
        s = np.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2]) * 2.0
        q = np.array(
            [(m[0, 1] + m[1, 0]) / s, 0.25 * s, (m[1, 2] + m[2, 1]) / s, (m[0, 2] - m[2, 0]) / s]
        )
    else:
        s = np.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1]) * 2.0
        q = np.array(
            [(m[0, 2] + m[2, 0]) / s, (m[1, 2] + m[2, 1]) / s, 0.25 * s, (m[1, 0] - m[0, 1]) / s]
        )
    if q[3] < 0.0:
        q = -q
    return q


def check_rotation(rot: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Validate that ``rot`` is a proper rotation (orthonormal, det +1)."""
    rot = np.asarray(rot, dtype=float)
    if rot.shape != (3, 3):
        raise ValidationError(f"rotation must be 3x3, got {rot.shape}")
    err = np.max(np.abs(rot @ rot.T - np.eye(3)))
    if err > tol:
        raise ValidationError(f"matrix is not orthonormal (deviation {err:.3e})")
    if np.linalg.det(rot) < 0.0:
        raise ValidationError("matrix is a reflection, not a rotation")
    return rot


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform random rotation (via random quaternion)."""
    q = rng.normal(size=4)
    return quat_to_matrix(q)
