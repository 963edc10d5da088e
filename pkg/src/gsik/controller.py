"""Per-frame IK orchestration.

Each frame linearizes the task (build J and the error stack), forms the
damped normal equations A = J^T J + delta I, b = J^T de, and solves them
with projected Gauss-Seidel. Joint limits become per-unknown box bounds
[lower - angle, upper - angle] on the solver unknown, so the clamped update
can never leave a joint outside its interval. The previous frame's solution
seeds the next solve (warm start); re-linearizing up to a small number of
times per frame mops up the geometric nonlinearity when targets move far.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import pgs
from .errors import DimensionError
from .jacobian import (
    DEFAULT_MAX_STEP,
    EffectorGoal,
    TaskJacobian,
    build_jacobian,
    task_error_norm,
)
from .kinematics import GlobalTransforms, Skeleton, forward_kinematics, rebase


@dataclass
class IkConfig:
    damping: float = 0.001
    solver: pgs.SolverConfig = field(default_factory=pgs.SolverConfig)
    max_outer_iterations: int = 3
    max_step: float = DEFAULT_MAX_STEP
    warm_start: bool = True
    max_backtracks: int = 8  # step halvings per outer pass before giving up

    def __post_init__(self):
        if self.damping <= 0.0:
            raise ValueError("damping must be positive")
        if self.max_outer_iterations < 1:
            raise ValueError("max_outer_iterations must be >= 1")
        if self.max_backtracks < 0:
            raise ValueError("max_backtracks must be >= 0")


@dataclass
class FrameReport:
    """Outcome of one solve_frame call."""

    ok: bool
    iterations: int  # inner Gauss-Seidel sweeps, summed over outer passes
    outer_iterations: int
    residual: float  # task error norm after the frame
    termination: pgs.Termination
    clamped: np.ndarray
    solve_time: float


def assemble_normal_equations(
    task: TaskJacobian,
    damping: float,
    angles: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    warm_start: Optional[np.ndarray] = None,
) -> pgs.LinearSystem:
    """Damped normal equations with limit-shifted box bounds.

    A = J^T J + delta I is symmetric positive definite for any J, so the
    Gauss-Seidel iteration is safe even at singular configurations.
    """
    J = task.matrix
    n = J.shape[1]
    A = J.T @ J
    A[np.diag_indices_from(A)] += damping
    b = J.T @ task.error
    bounds = np.stack([lower - angles, upper - angles], axis=1)
    x0 = np.zeros(n) if warm_start is None else np.asarray(warm_start, dtype=float)
    return pgs.LinearSystem(A=A, b=b, bounds=bounds, x0=x0)


class IkSession:
    """Mutable solver state for one character: pose, goals, warm-start cache.

    Owned by one logical thread at a time; the skeleton it references is
    immutable and shareable.
    """

    def __init__(
        self,
        skeleton: Skeleton,
        angles: Optional[np.ndarray] = None,
        goals: Sequence[EffectorGoal] = (),
    ):
        self.skeleton = skeleton
        if angles is None:
            angles = skeleton.zero_pose()
        angles = np.asarray(angles, dtype=float)
        if angles.shape != (len(skeleton),):
            raise DimensionError("pose length does not match skeleton")
        self.angles = skeleton.clamp_pose(angles)
        self.goals: list[EffectorGoal] = []
        self.warm_start = np.zeros(len(skeleton))
        self.last_report: Optional[FrameReport] = None
        self._tf_cache: Optional[tuple[np.ndarray, GlobalTransforms]] = None
        if goals:
            self.set_goals(goals)

    def _goal_shape(self, goals: Sequence[EffectorGoal]) -> tuple:
        return tuple((g.site, g.position_enabled, g.orientation_enabled) for g in goals)

    def set_goals(self, goals: Sequence[EffectorGoal]):
        """Replace the active goals; warm start survives unless the task shape changed."""
        for g in goals:
            if not 0 <= g.site < len(self.skeleton.effector_sites):
                raise IndexError(f"goal references invalid effector site {g.site}")
        if self._goal_shape(goals) != self._goal_shape(self.goals):
            self.warm_start = np.zeros(len(self.skeleton))
        self.goals = list(goals)

    def rebase(self, new_root: int) -> np.ndarray:
        """Re-root the skeleton at the current pose; returns the index map."""
        result = rebase(self.skeleton, self.angles, new_root)
        self.skeleton = result.skeleton
        self.angles = result.angles
        self.warm_start = np.zeros(len(self.skeleton))  # topology changed
        self._tf_cache = None
        return result.index_map

    def transforms(self) -> GlobalTransforms:
        cache = self._tf_cache
        if cache is not None and cache[0] is self.angles:
            return cache[1]
        tf = forward_kinematics(self.skeleton, self.angles)
        self._tf_cache = (self.angles, tf)
        return tf


def solve_frame(session: IkSession, config: Optional[IkConfig] = None) -> FrameReport:
    """Advance the session's pose one frame toward its goals.

    On solver failure (non-finite update) the pose is left untouched and the
    report carries ok=False. The returned pose always satisfies every joint
    limit.
    """
    config = config or IkConfig()
    t0 = time.perf_counter()
    skeleton = session.skeleton
    goals = session.goals
    n = len(skeleton)

    transforms = session.transforms()
    err = task_error_norm(skeleton, session.angles, goals, transforms)
    tol = config.solver.residual_tol
    if err < tol:
        session.warm_start = np.zeros(n)
        report = FrameReport(
            ok=True,
            iterations=0,
            outer_iterations=0,
            residual=err,
            termination=pgs.Termination.RESIDUAL_BELOW_TOL,
            clamped=np.zeros(n, dtype=bool),
            solve_time=time.perf_counter() - t0,
        )
        session.last_report = report
        return report

    angles = session.angles.copy()
    total_sweeps = 0
    outer = 0
    last_solution = None
    last_solve: Optional[pgs.SolveReport] = None
    prev_err = err
    for outer in range(1, config.max_outer_iterations + 1):
        task = build_jacobian(skeleton, angles, goals, transforms, config.max_step)
        seed = session.warm_start if (outer == 1 and config.warm_start) else None
        system = assemble_normal_equations(
            task, config.damping, angles, skeleton.lower, skeleton.upper, seed
        )
        solve_report = pgs.solve(system, config.solver)
        if not np.all(np.isfinite(solve_report.x)):
            report = FrameReport(
                ok=False,
                iterations=total_sweeps + solve_report.iterations,
                outer_iterations=outer,
                residual=prev_err,
                termination=solve_report.termination,
                clamped=solve_report.clamped,
                solve_time=time.perf_counter() - t0,
            )
            session.last_report = report
            return report
        total_sweeps += solve_report.iterations
        last_solve = solve_report
        # accept the step only if it reduces the task error; a damped
        # least-squares step can overshoot badly near singular stretches
        # (conflicting unreachable goals), so halve until it helps.
        scale = 1.0
        accepted = False
        for _ in range(config.max_backtracks + 1):
            candidate = angles + scale * solve_report.x
            np.clip(candidate, skeleton.lower, skeleton.upper, out=candidate)  # exact
            cand_tf = forward_kinematics(skeleton, candidate)
            cand_err = task_error_norm(skeleton, candidate, goals, cand_tf)
            if cand_err < prev_err:
                accepted = True
                break
            scale *= 0.5
        if not accepted:
            break  # settled: no scaling of this step improves the pose
        last_solution = solve_report.x
        angles, transforms, err = candidate, cand_tf, cand_err
        if err < tol:
            break
        prev_err = err

    session.angles = angles
    session._tf_cache = (angles, transforms)
    session.warm_start = last_solution if last_solution is not None else np.zeros(n)
    report = FrameReport(
        ok=True,
        iterations=total_sweeps,
        outer_iterations=outer,
        residual=err,
        termination=last_solve.termination if last_solve else pgs.Termination.RESIDUAL_BELOW_TOL,
        clamped=last_solve.clamped if last_solve else np.zeros(n, dtype=bool),
        solve_time=time.perf_counter() - t0,
    )
    session.last_report = report
    return report
