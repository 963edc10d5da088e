"""Real-time character IK: damped Jacobian normal equations solved by
warm-started projected Gauss-Seidel, with joint limits as box bounds."""

from .controller import FrameReport, IkConfig, IkSession, assemble_normal_equations, solve_frame
from .jacobian import EffectorGoal, TaskJacobian, build_jacobian
from .kinematics import (
    EffectorSite,
    GlobalTransforms,
    Joint,
    Skeleton,
    build_default_biped,
    effector_state,
    forward_kinematics,
    load_skeleton,
    rebase,
)
from .pgs import LinearSystem, SolveReport, SolverConfig, Termination, solve

__all__ = [
    "EffectorGoal",
    "EffectorSite",
    "FrameReport",
    "GlobalTransforms",
    "IkConfig",
    "IkSession",
    "Joint",
    "LinearSystem",
    "Skeleton",
    "SolveReport",
    "SolverConfig",
    "TaskJacobian",
    "Termination",
    "assemble_normal_equations",
    "build_default_biped",
    "build_jacobian",
    "effector_state",
    "forward_kinematics",
    "load_skeleton",
    "rebase",
    "solve",
    "solve_frame",
]

__version__ = "0.1.0"
