"""Live pose-editing service.

One IkSession per WebSocket connection: clients never observe each other's
pose state. Every set_target solves a frame and pushes pose_update plus
solve_stats; gait mode streams pose_update at a fixed tick until stopped.
Static UI assets are served at the HTTP root when a build directory exists.
"""
from __future__ import annotations

import asyncio
import logging
import time
from pathlib import Path
from typing import Optional

import numpy as np
from aiohttp import WSMsgType, web

from . import wire
from .controller import FrameReport, IkConfig, IkSession, solve_frame
from .errors import GsikError, SchemaError
from .gait import GaitParams, WalkingDriver
from .jacobian import EffectorGoal
from .kinematics import (
    Skeleton,
    build_default_biped,
    forward_kinematics,
    site_positions,
    skeleton_from_dict,
)
from .pgs import SolverConfig
from .rotations import quat_to_matrix

log = logging.getLogger(__name__)

DEFAULT_TICK_RATE = 60.0

_FALLBACK_PAGE = b"""<!doctype html>
<html><head><title>gsik pose service</title></head>
<body><h1>gsik pose service</h1>
<p>The service is running and speaking JSON over <code>/ws</code>.
No UI build was found; build the frontend and restart with
<code>--static &lt;dir&gt;</code> to serve it here.</p></body></html>
"""


class _Client:
    """Per-connection solver state."""

    def __init__(self, skeleton: Skeleton):
        self.base_skeleton = skeleton
        self.session = IkSession(skeleton)
        self.config = IkConfig(solver=SolverConfig(delta_x_tol=1e-6))
        self.goals: dict[str, EffectorGoal] = {}
        self.driver: Optional[WalkingDriver] = None
        self.gait_task: Optional[asyncio.Task] = None

    @property
    def active_session(self) -> IkSession:
        return self.driver.session if self.driver is not None else self.session

    def stop_gait(self):
        if self.gait_task is not None:
            self.gait_task.cancel()
            self.gait_task = None
        if self.driver is not None:
            # keep editing from the pose the walk reached
            self.session = self.driver.session
            self.goals = {}
            self.driver = None

    def apply_config(self, msg: wire.SetConfig):
        cfg = self.config
        solver = cfg.solver
        self.config = IkConfig(
            damping=msg.damping if msg.damping is not None else cfg.damping,
            solver=SolverConfig(
                max_iterations=msg.max_iterations or solver.max_iterations,
                residual_tol=msg.residual_tol or solver.residual_tol,
                delta_x_tol=msg.delta_x_tol or solver.delta_x_tol,
                stagnation_tol=msg.stagnation_tol or solver.stagnation_tol,
            ),
            max_outer_iterations=msg.max_outer_iterations or cfg.max_outer_iterations,
            max_step=msg.max_step if msg.max_step is not None else cfg.max_step,
            warm_start=msg.warm_start if msg.warm_start is not None else cfg.warm_start,
        )

    def set_target(self, msg: wire.SetTarget):
        session = self.session
        skeleton = session.skeleton
        site = skeleton.site_index(msg.effector)  # IndexError for unknown names
        position = np.asarray(msg.position, dtype=float)
        if position.shape != (3,):
            raise SchemaError("position must be [x, y, z]")
        goal = self.goals.get(msg.effector)
        orientation = np.eye(3)
        orientation_enabled = False
        if msg.orientation is not None:
            orientation = quat_to_matrix(np.asarray(msg.orientation, dtype=float))
            orientation_enabled = True
        elif goal is not None and goal.orientation_enabled:
            orientation = goal.target_orientation
            orientation_enabled = True
        self.goals[msg.effector] = EffectorGoal(
            site=site,
            target_position=position,
            target_orientation=orientation,
            orientation_enabled=orientation_enabled,
            weight=msg.weight if msg.weight is not None else 1.0,
        )
        session.set_goals(list(self.goals.values()))

    def solve(self) -> FrameReport:
        return solve_frame(self.session, self.config)


def _pose_update(client: _Client) -> wire.PoseUpdate:
    session = client.active_session
    skeleton = session.skeleton
    tf = forward_kinematics(skeleton, session.angles)
    sp = site_positions(skeleton, tf)
    goals = session.goals
    errors = {}
    effectors = {}
    targets = {skeleton.effector_sites[g.site].name: g for g in goals}
    for i, site in enumerate(skeleton.effector_sites):
        entry = {"joint": site.joint, "position": [float(v) for v in sp[i]]}
        goal = targets.get(site.name)
        if goal is not None:
            entry["target"] = [float(v) for v in goal.target_position]
            errors[site.name] = float(np.linalg.norm(sp[i] - goal.target_position))
        effectors[site.name] = entry
    return wire.PoseUpdate(
        angles=[float(a) for a in session.angles],
        positions=[[float(v) for v in p] for p in tf.positions],
        effector_errors=errors,
        joint_names=list(skeleton.names),
        parents=[int(p) for p in skeleton.parents],
        axes=[[float(v) for v in a] for a in skeleton.axes],
        effectors=effectors,
    )


def _stats(report: FrameReport) -> wire.SolveStats:
    return wire.SolveStats(
        iterations=report.iterations,
        residual=report.residual,
        termination=report.termination.value,
        solve_time=report.solve_time,
        outer_iterations=report.outer_iterations,
    )


async def _send(ws: web.WebSocketResponse, message: wire.WireMessage):
    await ws.send_str(wire.encode(message))


async def _gait_loop(client: _Client, ws: web.WebSocketResponse, tick_rate: float):
    dt = 1.0 / tick_rate
    loop = asyncio.get_running_loop()
    next_tick = loop.time()
    try:
        while True:
            report = client.driver.tick(dt)
            await _send(ws, _pose_update(client))
            await _send(ws, _stats(report))
            next_tick += dt
            await asyncio.sleep(max(0.0, next_tick - loop.time()))
    except asyncio.CancelledError:
        raise
    except Exception as exc:  # keep the connection alive on gait errors
        log.exception("gait loop stopped")
        if not ws.closed:
            await _send(ws, wire.Error(message=f"gait stopped: {exc}"))


async def _handle_message(client: _Client, ws: web.WebSocketResponse, msg: wire.WireMessage, tick_rate: float):
    if isinstance(msg, wire.SetTarget):
        if client.driver is not None:
            await _send(ws, wire.Error(message="gait is running; send stop_gait first"))
            return
        client.set_target(msg)
        report = client.solve()
        await _send(ws, _pose_update(client))
        await _send(ws, _stats(report))
    elif isinstance(msg, wire.SetConfig):
        client.apply_config(msg)
    elif isinstance(msg, wire.LoadSkeleton):
        skeleton = skeleton_from_dict(msg.skeleton)
        client.stop_gait()
        client.base_skeleton = skeleton
        client.session = IkSession(skeleton)
        client.goals = {}
        await _send(ws, _pose_update(client))
    elif isinstance(msg, wire.StartGait):
        client.stop_gait()
        fields = {
            k: v
            for k, v in (
                ("step_length", msg.step_length),
                ("step_height", msg.step_height),
                ("step_duration", msg.step_duration),
                ("stance_foot", msg.stance_foot),
                ("body_sway", msg.body_sway),
            )
            if v is not None
        }
        client.driver = WalkingDriver(client.base_skeleton, GaitParams(**fields))
        client.gait_task = asyncio.create_task(_gait_loop(client, ws, tick_rate))
    elif isinstance(msg, wire.StopGait):
        client.stop_gait()
        await _send(ws, _pose_update(client))
    elif isinstance(msg, wire.RebaseRoot):
        session = client.session
        joint = msg.joint
        index = session.skeleton.joint_index(joint) if isinstance(joint, str) else int(joint)
        session.rebase(index)
        client.goals = {}
        session.set_goals([])
        await _send(ws, _pose_update(client))
    else:
        await _send(ws, wire.Error(message=f"unexpected message type {type(msg).__name__}"))


class PoseService:
    def __init__(
        self,
        skeleton: Optional[Skeleton] = None,
        static_dir: Optional[Path] = None,
        tick_rate: float = DEFAULT_TICK_RATE,
    ):
        self.skeleton = skeleton or build_default_biped()
        self.static_dir = Path(static_dir) if static_dir else None
        self.tick_rate = tick_rate

    async def _ws_handler(self, request: web.Request) -> web.WebSocketResponse:
        ws = web.WebSocketResponse(heartbeat=30.0)
        await ws.prepare(request)
        client = _Client(self.skeleton)
        await _send(ws, _pose_update(client))  # topology handshake
        try:
            async for raw in ws:
                if raw.type != WSMsgType.TEXT:
                    continue
                try:
                    msg = wire.decode(raw.data)
                    await _handle_message(client, ws, msg, self.tick_rate)
                except (GsikError, IndexError, ValueError) as exc:
                    await _send(ws, wire.Error(message=str(exc)))
        finally:
            client.stop_gait()
        return ws

    async def _index(self, request: web.Request) -> web.Response:
        if self.static_dir is not None:
            page = self.static_dir / "index.html"
            if page.exists():
                return web.FileResponse(page)
        return web.Response(body=_FALLBACK_PAGE, content_type="text/html")

    def make_app(self) -> web.Application:
        app = web.Application()
        app.router.add_get("/ws", self._ws_handler)
        app.router.add_get("/", self._index)
        if self.static_dir is not None and self.static_dir.is_dir():
            app.router.add_static("/", self.static_dir)
        return app

    def run(self, port: int, host: str = "127.0.0.1"):
        log.info("serving on http://%s:%d (ws at /ws)", host, port)
        web.run_app(self.make_app(), host=host, port=port, print=None)
