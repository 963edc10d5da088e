import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gsik.errors import ValidationError
from gsik.rotations import (
    axis_angle_matrix,
    check_rotation,
    matrix_to_axis_angle,
    matrix_to_quat,
    quat_to_matrix,
    random_rotation,
)

from .oracles import rodrigues, rotation_log_vector


def test_axis_angle_matches_matrix_exponential(rng):
    for _ in range(50):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        angle = rng.uniform(-np.pi, np.pi)
        assert np.allclose(axis_angle_matrix(axis, angle), rodrigues(axis, angle), atol=1e-12)


def test_identity_and_quarter_turns():
    assert np.allclose(axis_angle_matrix(np.array([0, 0, 1.0]), 0.0), np.eye(3))
    r = axis_angle_matrix(np.array([0, 0, 1.0]), np.pi / 2)
    assert np.allclose(r @ [1, 0, 0], [0, 1, 0], atol=1e-12)


def test_log_round_trip(rng):
    for _ in range(100):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        angle = rng.uniform(1e-6, np.pi - 1e-6)
        vec = matrix_to_axis_angle(axis_angle_matrix(axis, angle))
        assert np.allclose(vec, axis * angle, atol=1e-9)


def test_log_matches_scipy_logm(rng):
    for _ in range(50):
        R = random_rotation(rng)
        assert np.allclose(matrix_to_axis_angle(R), rotation_log_vector(R), atol=1e-9)


def test_log_near_pi(rng):
    for _ in range(50):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        angle = np.pi - 10 ** rng.uniform(-12, -5)
        vec = matrix_to_axis_angle(axis_angle_matrix(axis, angle))
        # either axis direction is the same rotation at pi
        err = min(np.linalg.norm(vec - axis * angle), np.linalg.norm(vec + axis * angle))
        assert err < 1e-6


def test_log_small_angles(rng):
    for _ in range(20):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        angle = 10 ** rng.uniform(-12, -8)
        vec = matrix_to_axis_angle(axis_angle_matrix(axis, angle))
        assert np.allclose(vec, axis * angle, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=4, max_size=4).filter(lambda q: sum(v * v for v in q) > 1e-4))
def test_quat_round_trip(q):
    R = quat_to_matrix(np.array(q))
    check_rotation(R, tol=1e-9)
    q2 = matrix_to_quat(R)
    R2 = quat_to_matrix(q2)
    assert np.allclose(R, R2, atol=1e-9)


def test_check_rotation_rejects_garbage():
    with pytest.raises(ValidationError):
        check_rotation(np.eye(3) * 1.5)
    with pytest.raises(ValidationError):
        check_rotation(np.diag([1.0, 1.0, -1.0]))  # reflection
    with pytest.raises(ValidationError):
        check_rotation(np.eye(4))
