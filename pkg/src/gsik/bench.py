"""Benchmark harness: iteration-budget sweeps on the default biped.

Replays a deterministic scripted drag of one hand (all five effectors held
by 6-DOF goals) for each inner-iteration budget and reports mean wall-clock
solve time and mean sweeps used. Absolute times are machine-bound; the
meaningful outputs are the orderings (more budget, more time) and the
iteration counts under warm starting.
"""
from __future__ import annotations

import io
import time
from dataclasses import dataclass

import numpy as np

from .controller import IkConfig, IkSession, solve_frame
from .jacobian import EffectorGoal
from .kinematics import Skeleton, build_default_biped, forward_kinematics, site_positions
from .pgs import SolverConfig


@dataclass
class BenchResult:
    iteration_budget: int
    mean_solve_time: float  # seconds per frame
    mean_inner_iterations: float
    frames: int


@dataclass
class BenchReport:
    results: list
    warm_frame_time: float  # seconds, warm-started near-stationary frame
    warm_frame_iterations: float
    frames: int
    seed: int


def _six_dof_goals(skeleton: Skeleton, angles) -> list[EffectorGoal]:
    tf = forward_kinematics(skeleton, angles)
    sp = site_positions(skeleton, tf)
    goals = []
    for i, site in enumerate(skeleton.effector_sites):
        goals.append(
            EffectorGoal(
                site=i,
                target_position=sp[i].copy(),
                target_orientation=tf.rotations[site.joint].copy(),
                orientation_enabled=True,
            )
        )
    return goals


def _scripted_offsets(frames: int, seed: int, amplitude: float) -> np.ndarray:
    """Smooth pseudo-random 3D path, zero at t=0, deterministic in the seed."""
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.0, 2 * np.pi, size=(3, 2))
    freqs = rng.uniform(0.5, 2.0, size=(3, 2))
    t = np.linspace(0.0, 1.0, frames)
    out = np.zeros((frames, 3))
    for axis in range(3):
        for k in range(2):
            w = 2 * np.pi * freqs[axis, k]
            out[:, axis] += np.sin(w * t + phases[axis, k]) - np.sin(phases[axis, k])
    return amplitude * out


def run_budget(
    skeleton: Skeleton,
    budget: int,
    frames: int,
    seed: int,
    amplitude: float = 0.002,
    warm_start: bool = True,
) -> BenchResult:
    """Mean time/iterations for one inner-iteration budget."""
    session = IkSession(skeleton)
    goals = _six_dof_goals(skeleton, session.angles)
    hand = goals[2]
    base = hand.target_position.copy()
    config = IkConfig(
        max_outer_iterations=1,
        warm_start=warm_start,
        solver=SolverConfig(max_iterations=budget),
    )
    path = _scripted_offsets(frames, seed, amplitude)
    iterations = 0
    t0 = time.perf_counter()
    for k in range(frames):
        hand.target_position = base + path[k]
        session.set_goals(goals)
        report = solve_frame(session, config)
        iterations += report.iterations
    elapsed = time.perf_counter() - t0
    return BenchResult(
        iteration_budget=budget,
        mean_solve_time=elapsed / frames,
        mean_inner_iterations=iterations / frames,
        frames=frames,
    )


def run_warm_frame(skeleton: Skeleton, frames: int, seed: int) -> tuple[float, float]:
    """Near-stationary warm-started frames: the temporal-coherence fast path."""
    session = IkSession(skeleton)
    goals = _six_dof_goals(skeleton, session.angles)
    hand = goals[2]
    base = hand.target_position.copy()
    config = IkConfig(
        max_outer_iterations=1,
        solver=SolverConfig(max_iterations=20, delta_x_tol=1e-6),
    )
    path = _scripted_offsets(frames, seed, 1e-5)
    for _ in range(3):
        solve_frame(session, config)
    times = []
    iterations = []
    for k in range(frames):
        hand.target_position = base + path[k]
        session.set_goals(goals)
        report = solve_frame(session, config)
        times.append(report.solve_time)
        iterations.append(report.iterations)
    return float(np.mean(times)), float(np.mean(iterations))


def run_bench(
    skeleton: Skeleton = None,
    budgets: tuple = (1, 5, 20),
    frames: int = 200,
    seed: int = 0,
) -> BenchReport:
    if not budgets:
        raise ValueError("need at least one iteration budget")
    skeleton = skeleton or build_default_biped()
    results = [run_budget(skeleton, b, frames, seed) for b in budgets]
    warm_time, warm_iters = run_warm_frame(skeleton, frames, seed)
    return BenchReport(
        results=results,
        warm_frame_time=warm_time,
        warm_frame_iterations=warm_iters,
        frames=frames,
        seed=seed,
    )


CSV_COLUMNS = "iteration_budget,frames,mean_inner_iterations,mean_solve_time_ms"


def to_csv(report: BenchReport) -> str:
    """CSV rows per budget. Columns: iteration budget; frames replayed; mean
    Gauss-Seidel sweeps actually used per frame; mean frame solve time in
    milliseconds (machine-dependent, excluded from determinism checks)."""
    buf = io.StringIO()
    buf.write(CSV_COLUMNS + "\n")
    for r in report.results:
        buf.write(
            f"{r.iteration_budget},{r.frames},{r.mean_inner_iterations:.6f},"
            f"{r.mean_solve_time * 1e3:.6f}\n"
        )
    return buf.getvalue()


def to_text(report: BenchReport) -> str:
    lines = [
        f"biped bench: {report.frames} frames per budget, seed {report.seed}",
        f"{'budget':>8} {'mean sweeps':>12} {'mean time':>12}",
    ]
    for r in report.results:
        lines.append(
            f"{r.iteration_budget:>8} {r.mean_inner_iterations:>12.2f} "
            f"{r.mean_solve_time * 1e3:>9.3f} ms"
        )
    lines.append(
        f"warm-started near-stationary frame: {report.warm_frame_time * 1e3:.3f} ms "
        f"({report.warm_frame_iterations:.2f} sweeps)"
    )
    return "\n".join(lines)
