"""Gauss-Seidel solver for Ax = b with optional per-unknown box projection.

One sweep visits unknowns in order i = 1..n, computes the correction
delta_i = (b_i - A_i . x) / A_ii with the freshest values of x, applies it
immediately, and (when bounds are present) clamps the component into its
interval before moving on -- the projected Gauss-Seidel update. Convergence
is guaranteed for symmetric positive definite A; diagonal dominance is not
required, but its absence is reported once via DominanceWarning since it is
the simplest sufficient condition in the general case.
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionError, SingularDiagonalError, ValidationError


class DominanceWarning(UserWarning):
    """A solved matrix was not strictly diagonally dominant."""


class Termination(enum.Enum):
    MAX_ITERATIONS = "max_iterations"
    RESIDUAL_BELOW_TOL = "residual_below_tol"
    DELTA_X_BELOW_TOL = "delta_x_below_tol"
    STAGNATED = "stagnated"


@dataclass
class LinearSystem:
    """Square system with optional box bounds and an initial guess."""

    A: np.ndarray
    b: np.ndarray
    bounds: Optional[np.ndarray] = None  # (n, 2) [lo, hi] rows
    x0: Optional[np.ndarray] = None

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        n = self.b.shape[0]
        if self.A.shape != (n, n):
            raise DimensionError(f"A is {self.A.shape}, b has {n} entries")
        if self.bounds is not None:
            self.bounds = np.asarray(self.bounds, dtype=float)
            if self.bounds.shape != (n, 2):
                raise DimensionError(f"bounds must be ({n}, 2), got {self.bounds.shape}")
            if np.any(self.bounds[:, 0] > self.bounds[:, 1]):
                raise ValidationError("every bound interval needs lo <= hi")
        if self.x0 is None:
            self.x0 = np.zeros(n)
        else:
            self.x0 = np.asarray(self.x0, dtype=float)
            if self.x0.shape != (n,):
                raise DimensionError(f"x0 must have {n} entries")

    @property
    def n(self) -> int:
        return self.b.shape[0]


@dataclass
class SolverConfig:
    max_iterations: int = 20
    residual_tol: float = 1e-6
    delta_x_tol: float = 1e-9
    stagnation_tol: float = 1e-12

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be >= 1")
        if min(self.residual_tol, self.delta_x_tol, self.stagnation_tol) <= 0.0:
            raise ValidationError("tolerances must be positive")


@dataclass
class SolveReport:
    x: np.ndarray
    iterations: int
    residual: float
    termination: Termination
    clamped: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))


def project(x_i: float, bound: tuple[float, float]) -> float:
    """Clamp a scalar into [lo, hi]."""
    lo, hi = bound
    return min(hi, max(lo, x_i))


def residual_norm(system: LinearSystem, x: np.ndarray) -> float:
    """Euclidean norm of Ax - b."""
    x = np.asarray(x, dtype=float)
    if x.shape != (system.n,):
        raise DimensionError(f"x must have {system.n} entries")
    return float(np.linalg.norm(system.A @ x - system.b))


def _check_diagonal(A: np.ndarray):
    diag = np.diagonal(A)
    if np.any(diag == 0.0):
        i = int(np.argmin(np.abs(diag)))
        raise SingularDiagonalError(f"zero diagonal entry at index {i}")


def gauss_seidel_sweep(
    system: LinearSystem, x: np.ndarray
) -> tuple[np.ndarray, float]:
    """One in-order unbounded sweep; returns the updated x and ||delta x||."""
    _check_diagonal(system.A)
    x = np.array(x, dtype=float)
    if x.shape != (system.n,):
        raise DimensionError(f"x must have {system.n} entries")
    rows = [system.A[i] for i in range(system.n)]
    delta = _plain_sweep(rows, system.A.diagonal(), system.b, x)
    return x, delta


def _projected_sweep(rows, diag, b, lower, upper, x) -> float:
    """In-place bounded sweep; returns ||delta x|| of the applied updates."""
    sq = 0.0
    dot = np.dot
    for i in range(len(b)):
        xi = x[i] + (b[i] - dot(rows[i], x)) / diag[i]
        if xi < lower[i]:
            xi = lower[i]
        elif xi > upper[i]:
            xi = upper[i]
        d = xi - x[i]
        x[i] = xi
        sq += d * d
    return float(np.sqrt(sq))


def _plain_sweep(rows, diag, b, x) -> float:
    """In-place unbounded sweep; returns ||delta x||."""
    sq = 0.0
    dot = np.dot
    for i in range(len(b)):
        d = (b[i] - dot(rows[i], x)) / diag[i]
        x[i] += d
        sq += d * d
    return float(np.sqrt(sq))


def strictly_diagonally_dominant(A: np.ndarray) -> bool:
    diag = np.abs(np.diagonal(A))
    off = np.sum(np.abs(A), axis=1) - diag
    return bool(np.all(diag > off))


def solve(system: LinearSystem, config: Optional[SolverConfig] = None) -> SolveReport:
    """Iterate (projected) Gauss-Seidel sweeps until a stop condition fires.

    Stop conditions, checked after every sweep: the iteration cap, the
    residual ||Ax - b|| dropping below residual_tol, ||delta x|| dropping
    below delta_x_tol, and ||delta x|| stagnating between consecutive sweeps
    within stagnation_tol.

    Results are defined for the fixed in-order sweep i = 1..n; permuting the
    unknowns changes the iterate path (though not the limit on symmetric
    positive definite systems).
    """
    config = config or SolverConfig()
    _check_diagonal(system.A)
    if not strictly_diagonally_dominant(system.A):
        warnings.warn(
            "matrix is not strictly diagonally dominant; convergence relies "
            "on positive definiteness",
            DominanceWarning,
            stacklevel=2,
        )
    A, b = system.A, system.b
    n = system.n
    rows = [A[i] for i in range(n)]
    diag = A.diagonal()
    if system.bounds is not None:
        lower = system.bounds[:, 0]
        upper = system.bounds[:, 1]
        x = np.clip(system.x0, lower, upper)
    else:
        lower = upper = None
        x = system.x0.copy()

    prev_delta = None
    iterations = 0
    termination = Termination.MAX_ITERATIONS
    for _ in range(config.max_iterations):
        if lower is None:
            delta = _plain_sweep(rows, diag, b, x)
        else:
            delta = _projected_sweep(rows, diag, b, lower, upper, x)
        iterations += 1
        if np.linalg.norm(A @ x - b) < config.residual_tol:
            termination = Termination.RESIDUAL_BELOW_TOL
            break
        if delta < config.delta_x_tol:
            termination = Termination.DELTA_X_BELOW_TOL
            break
        if prev_delta is not None and abs(delta - prev_delta) < config.stagnation_tol:
            termination = Termination.STAGNATED
            break
        prev_delta = delta

    if lower is not None:
        clamped = (x <= lower) | (x >= upper)
    else:
        clamped = np.zeros(system.n, dtype=bool)
    return SolveReport(
        x=x,
        iterations=iterations,
        residual=residual_norm(system, x),
        termination=termination,
        clamped=clamped,
    )
