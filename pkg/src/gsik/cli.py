"""Command-line entry points: solve, bench, gait, serve.

Exit codes: 0 success/converged, 2 usage (argparse), 3 input or I/O error,
4 solver did not converge or failed. GSIK_LOG sets the log level.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .controller import IkConfig, IkSession, solve_frame
from .errors import GsikError, SchemaError
from .gait import FOOT_SITES, GaitParams, WalkingDriver
from .jacobian import EffectorGoal
from .kinematics import build_default_biped, forward_kinematics, load_skeleton, site_positions
from .pgs import SolverConfig
from .rotations import quat_to_matrix
from .service import PoseService

EXIT_OK = 0
EXIT_INPUT = 3
EXIT_SOLVER = 4

log = logging.getLogger("gsik")


def _load_skeleton_arg(path):
    if path is None:
        return build_default_biped()
    return load_skeleton(path)


def load_goals(path, skeleton) -> list[EffectorGoal]:
    """Goals file: {"goals": [{"effector", "position", "orientation"?, "weight"?}]}."""
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("goals"), list):
        raise SchemaError(f"{path}: expected an object with a 'goals' array")
    goals = []
    for i, g in enumerate(data["goals"]):
        try:
            site = skeleton.site_index(g["effector"])
            orientation = g.get("orientation")
            goals.append(
                EffectorGoal(
                    site=site,
                    target_position=np.asarray(g["position"], dtype=float),
                    target_orientation=(
                        quat_to_matrix(np.asarray(orientation, dtype=float))
                        if orientation is not None
                        else np.eye(3)
                    ),
                    orientation_enabled=orientation is not None,
                    weight=float(g.get("weight", 1.0)),
                )
            )
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise SchemaError(f"{path}: goal {i}: {exc}") from exc
    return goals


def _ik_config(args) -> IkConfig:
    return IkConfig(
        damping=args.delta,
        solver=SolverConfig(
            max_iterations=args.max_iterations,
            residual_tol=args.residual_tol,
            delta_x_tol=args.delta_x_tol,
        ),
        max_outer_iterations=args.max_outer,
    )


def cmd_solve(args) -> int:
    skeleton = _load_skeleton_arg(args.skeleton)
    goals = load_goals(args.goals, skeleton)
    session = IkSession(skeleton)
    session.set_goals(goals)
    config = _ik_config(args)
    report = None
    converged = False
    frames = 0
    for frames in range(1, args.max_frames + 1):
        report = solve_frame(session, config)
        if not report.ok:
            print(json.dumps({"error": "solver produced a non-finite update"}))
            return EXIT_SOLVER
        if report.residual < args.target_tol:
            converged = True
            break
        if report.iterations == 0 or np.linalg.norm(session.warm_start) < 1e-12:
            # settled: no further progress possible (best reach)
            converged = True
            break
    out = {
        "angles": [float(a) for a in session.angles],
        "residual": report.residual,
        "termination": report.termination.value,
        "frames": frames,
        "converged": converged,
    }
    print(json.dumps(out, indent=2))
    return EXIT_OK if converged else EXIT_SOLVER


def cmd_bench(args) -> int:
    skeleton = _load_skeleton_arg(args.skeleton)
    budgets = tuple(int(b) for b in args.budgets.split(","))
    report = bench_mod.run_bench(skeleton, budgets, frames=args.frames, seed=args.seed)
    print(bench_mod.to_text(report))
    if args.out:
        out = Path(args.out)
        out.write_text(bench_mod.to_csv(report))
        from .figures import bench_figure

        bench_figure(report, out.with_suffix(".png"))
        log.info("wrote %s and %s", out, out.with_suffix(".png"))
    return EXIT_OK


def cmd_gait(args) -> int:
    skeleton = _load_skeleton_arg(args.skeleton)
    params = GaitParams(
        step_length=args.step_length,
        step_height=args.step_height,
        step_duration=args.step_duration,
        body_sway=args.sway,
    )
    driver = WalkingDriver(skeleton, params)
    dt = args.dt
    n = max(1, round(args.duration / dt))
    out = Path(args.out)
    stance_meta = {}
    times, foot_heights, pelvis_path, swap_times = [], {}, [], []
    with open(out, "w") as fh:
        header = {
            "type": "header",
            "dt": dt,
            "params": {
                "step_length": params.step_length,
                "step_height": params.step_height,
                "step_duration": params.step_duration,
                "body_sway": params.body_sway,
            },
            "max_joint_velocity": args.max_joint_velocity,
        }
        fh.write(json.dumps(header) + "\n")
        swaps_before = driver.root_swaps
        for k in range(n):
            pre = driver.root_swaps
            report = driver.tick(dt)
            if not report.ok:
                print("solver failure during gait", file=sys.stderr)
                return EXIT_SOLVER
            sk = driver.session.skeleton
            stance = driver.generator.stance
            if stance not in stance_meta:
                stance_meta[stance] = {
                    "joint_names": list(sk.names),
                    "limits": [[float(lo), float(hi)] for lo, hi in zip(sk.lower, sk.upper)],
               }
            tf = forward_kinematics(sk, driver.session.angles)
            t = (k + 1) * dt
            frame = {
                "type": "frame",
                "time": t,
                "stance": stance,
                "swap": driver.root_swaps != pre,
                "angles": [float(a) for a in driver.session.angles],
                "positions": [[float(v) for v in p] for p in tf.positions],
            }
            fh.write(json.dumps(frame) + "\n")
            times.append(t)
            if driver.root_swaps != pre:
                swap_times.append(t)
            sp = site_positions(sk, tf)
            for foot in FOOT_SITES.values():
                idx = sk.site_index(foot)
                foot_heights.setdefault(foot, []).append(float(sp[idx][1]))
            pelvis_path.append([float(v) for v in sp[sk.site_index("pelvis")]])
        summary = {
            "type": "summary",
            "root_swaps": driver.root_swaps - swaps_before,
            "frames": n,
            "stances": stance_meta,
        }
        fh.write(json.dumps(summary) + "\n")
    from .figures import gait_figure

    gait_figure(times, foot_heights, pelvis_path, swap_times, out.with_suffix(".png"))
    print(f"wrote {n} frames, {driver.root_swaps - swaps_before} root swaps -> {out}")
    return EXIT_OK


def cmd_serve(args) -> int:
    skeleton = _load_skeleton_arg(args.skeleton)
    static = Path(args.static) if args.static else None
    if static is None:
        guess = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        static = guess if guess.is_dir() else None
    service = PoseService(skeleton, static_dir=static, tick_rate=args.tick_rate)
    service.run(port=args.port, host=args.host)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gsik",
        description="Character IK via warm-started projected Gauss-Seidel.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--skeleton", help="skeleton JSON path (default: built-in biped)")
        p.add_argument("--delta", type=float, default=0.001, help="damping constant")
        p.add_argument("--max-iterations", type=int, default=20, help="Gauss-Seidel sweep cap")
        p.add_argument("--residual-tol", type=float, default=1e-6)
        p.add_argument("--delta-x-tol", type=float, default=1e-9)
        p.add_argument("--max-outer", type=int, default=3, help="re-linearizations per frame")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("solve", help="batch-solve a goals file to convergence")
    add_common(p)
    p.add_argument("--goals", required=True, help="goals JSON path")
    p.add_argument("--max-frames", type=int, default=200)
    p.add_argument("--target-tol", type=float, default=1e-3, help="task error to call converged")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("bench", help="iteration-budget benchmark")
    add_common(p)
    p.add_argument("--budgets", default="1,5,20", help="comma-separated sweep budgets")
    p.add_argument("--frames", type=int, default=200)
    p.add_argument("--out", help="CSV path; a PNG figure lands next to it")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("gait", help="generate a walking animation file")
    add_common(p)
    p.add_argument("--duration", type=float, default=10.0, help="seconds")
    p.add_argument("--dt", type=float, default=1 / 60)
    p.add_argument("--step-length", type=float, default=0.3)
    p.add_argument("--step-height", type=float, default=0.08)
    p.add_argument("--step-duration", type=float, default=0.5)
    p.add_argument("--sway", type=float, default=0.02)
    p.add_argument("--max-joint-velocity", type=float, default=20.0, help="rad/s, recorded in header")
    p.add_argument("--out", required=True, help="JSON-lines output path; PNG lands next to it")
    p.set_defaults(fn=cmd_gait)

    p = sub.add_parser("serve", help="run the live pose-editing service")
    add_common(p)
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--static", help="UI asset directory (default: frontend/dist if present)")
    p.add_argument("--tick-rate", type=float, default=60.0, help="gait stream rate, Hz")
    p.set_defaults(fn=cmd_serve)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("GSIK_LOG", "WARNING").upper())
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GsikError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
