"""Task Jacobian and task-space error for sets of 6-DOF effector goals.

Rows are stacked per goal in declaration order, position block before
orientation block, x/y/z within each block. The column for a revolute joint
is axis x (effector - joint) for position rows and the world axis itself for
orientation rows; joints outside the chain from root to the effector's
owning joint contribute zero columns.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import EmptyTaskError, ValidationError
from .kinematics import GlobalTransforms, Skeleton, forward_kinematics
from .rotations import check_rotation, matrix_to_axis_angle

DEFAULT_MAX_STEP = 0.15  # per-goal position error clamp, meters


@dataclass
class EffectorGoal:
    """Target position/orientation for one effector site."""

    site: int
    target_position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    target_orientation: np.ndarray = field(default_factory=lambda: np.eye(3))
    position_enabled: bool = True
    orientation_enabled: bool = False
    weight: float = 1.0

    def __post_init__(self):
        self.target_position = np.asarray(self.target_position, dtype=float)
        self.target_orientation = check_rotation(self.target_orientation)
        if self.weight < 0.0:
            raise ValidationError("goal weight must be nonnegative")

    @property
    def rows(self) -> int:
        return 3 * int(self.position_enabled) + 3 * int(self.orientation_enabled)


@dataclass
class TaskJacobian:
    matrix: np.ndarray  # (m, n)
    error: np.ndarray  # (m,)
    row_map: list[tuple[int, str]]  # row -> (goal index, "position"|"orientation") per block


def position_error(current: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Task-space position error, target minus current."""
    return np.asarray(target, dtype=float) - np.asarray(current, dtype=float)


def orientation_error(current: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Rotation vector (axis * angle, angle in [0, pi]) taking current to target."""
    current = check_rotation(current)
    target = check_rotation(target)
    return matrix_to_axis_angle(target @ current.T)


def _orientation_error_unchecked(current: np.ndarray, target: np.ndarray) -> np.ndarray:
    # internal hot path: inputs already validated at goal construction / FK
    return matrix_to_axis_angle(target @ current.T)


def jacobian_position_column(
    axis_world: np.ndarray, joint_pos: np.ndarray, effector_pos: np.ndarray
) -> np.ndarray:
    """Linear velocity of the effector per unit joint rate: r x (e - p)."""
    return np.cross(axis_world, effector_pos - joint_pos)


def jacobian_orientation_column(axis_world: np.ndarray) -> np.ndarray:
    """Angular velocity of the effector per unit joint rate: the axis itself."""
    return np.asarray(axis_world, dtype=float)


def build_jacobian(
    skeleton: Skeleton,
    angles: np.ndarray,
    goals: Sequence[EffectorGoal],
    transforms: Optional[GlobalTransforms] = None,
    max_step: float = DEFAULT_MAX_STEP,
) -> TaskJacobian:
    """Assemble J and the stacked error vector for the enabled goals.

    Position errors longer than ``max_step`` are clamped to that magnitude
    before weighting, bounding the linearization error when targets jump.
    Rows and errors are premultiplied by the goal weight.
    """
    m = sum(g.rows for g in goals)
    if m == 0:
        raise EmptyTaskError("no goal has an enabled constraint")
    if transforms is None:
        transforms = forward_kinematics(skeleton, angles)
    n = len(skeleton)
    J = np.zeros((m, n))
    err = np.zeros(m)
    row_map: list[tuple[int, str]] = []

    rot = transforms.rotations
    pos = transforms.positions
    world_axes = np.einsum("nij,nj->ni", rot, skeleton.axes)

    row = 0
    for gi, goal in enumerate(goals):
        if goal.rows == 0:
            continue
        site = skeleton.effector_sites[goal.site]
        chain = skeleton.chain_to(site.joint)
        e_rot = rot[site.joint]
        e_pos = e_rot @ site.offset + pos[site.joint]
        w = goal.weight
        if goal.position_enabled:
            ax = world_axes[chain]
            lv = e_pos - pos[chain]
            J[row, chain] = w * (ax[:, 1] * lv[:, 2] - ax[:, 2] * lv[:, 1])
            J[row + 1, chain] = w * (ax[:, 2] * lv[:, 0] - ax[:, 0] * lv[:, 2])
            J[row + 2, chain] = w * (ax[:, 0] * lv[:, 1] - ax[:, 1] * lv[:, 0])
            de = position_error(e_pos, goal.target_position)
            norm = np.linalg.norm(de)
            if norm > max_step:
                de *= max_step / norm
            err[row : row + 3] = w * de
            row_map.append((gi, "position"))
            row += 3
        if goal.orientation_enabled:
            J[row : row + 3, chain] = (w * world_axes[chain]).T
            err[row : row + 3] = w * _orientation_error_unchecked(e_rot, goal.target_orientation)
            row_map.append((gi, "orientation"))
            row += 3
    return TaskJacobian(J, err, row_map)


def task_error_norm(
    skeleton: Skeleton,
    angles: np.ndarray,
    goals: Sequence[EffectorGoal],
    transforms: Optional[GlobalTransforms] = None,
) -> float:
    """Unclamped, weighted task error norm across all enabled goals."""
    if transforms is None:
        transforms = forward_kinematics(skeleton, angles)
    total = 0.0
    for goal in goals:
        if goal.rows == 0:
            continue
        site = skeleton.effector_sites[goal.site]
        e_rot = transforms.rotations[site.joint]
        e_pos = e_rot @ site.offset + transforms.positions[site.joint]
        if goal.position_enabled:
            total += goal.weight**2 * float(
                np.sum(position_error(e_pos, goal.target_position) ** 2)
            )
        if goal.orientation_enabled:
            total += goal.weight**2 * float(
                np.sum(_orientation_error_unchecked(e_rot, goal.target_orientation) ** 2)
            )
    return float(np.sqrt(total))
