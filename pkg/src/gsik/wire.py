"""JSON wire protocol spoken between the pose service and its clients.

Messages are single JSON text frames tagged by a "type" field. Client to
server: set_target, set_config, load_skeleton, start_gait, stop_gait,
rebase_root. Server to client: pose_update, solve_stats, error. Every
variant round-trips losslessly through encode/decode.

Positions are meters, angles radians, orientations quaternions [x, y, z, w].
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional, Type

from .errors import SchemaError


@dataclass
class SetTarget:
    effector: str
    position: list  # [x, y, z]
    orientation: Optional[list] = None  # quaternion [x, y, z, w]
    weight: Optional[float] = None


@dataclass
class SetConfig:
    damping: Optional[float] = None
    residual_tol: Optional[float] = None
    delta_x_tol: Optional[float] = None
    stagnation_tol: Optional[float] = None
    max_iterations: Optional[int] = None
    max_outer_iterations: Optional[int] = None
    max_step: Optional[float] = None
    warm_start: Optional[bool] = None


@dataclass
class LoadSkeleton:
    skeleton: dict  # skeleton JSON document


@dataclass
class StartGait:
    step_length: Optional[float] = None
    step_height: Optional[float] = None
    step_duration: Optional[float] = None
    stance_foot: Optional[str] = None
    body_sway: Optional[float] = None


@dataclass
class StopGait:
    pass


@dataclass
class RebaseRoot:
    joint: str  # joint name or integer index


@dataclass
class PoseUpdate:
    angles: list
    positions: list  # per-joint world positions [[x,y,z], ...]
    effector_errors: dict  # site name -> distance to its target, meters
    joint_names: Optional[list] = None
    parents: Optional[list] = None
    effectors: Optional[dict] = None  # site name -> {joint, position, target}
    axes: Optional[list] = None


@dataclass
class SolveStats:
    iterations: int
    residual: float
    termination: str
    solve_time: float
    outer_iterations: int = 0


@dataclass
class Error:
    message: str


_TYPES: dict[str, Type] = {
    "set_target": SetTarget,
    "set_config": SetConfig,
    "load_skeleton": LoadSkeleton,
    "start_gait": StartGait,
    "stop_gait": StopGait,
    "rebase_root": RebaseRoot,
    "pose_update": PoseUpdate,
    "solve_stats": SolveStats,
    "error": Error,
}
_TAGS = {cls: tag for tag, cls in _TYPES.items()}

WireMessage = (
    SetTarget
    | SetConfig
    | LoadSkeleton
    | StartGait
    | StopGait
    | RebaseRoot
    | PoseUpdate
    | SolveStats
    | Error
)


def to_dict(message: WireMessage) -> dict:
    tag = _TAGS.get(type(message))
    if tag is None:
        raise SchemaError(f"not a wire message: {type(message).__name__}")
    body = asdict(message)
    body = {k: v for k, v in body.items() if v is not None}
    body["type"] = tag
    return body


def from_dict(data: dict) -> WireMessage:
    if not isinstance(data, dict):
        raise SchemaError("wire message must be a JSON object")
    tag = data.get("type")
    cls = _TYPES.get(tag)
    if cls is None:
        raise SchemaError(f"unknown message type: {tag!r}")
    fields = {k: v for k, v in data.items() if k != "type"}
    try:
        return cls(**fields)
    except TypeError as exc:
        raise SchemaError(f"bad {tag} payload: {exc}") from exc


def encode(message: WireMessage) -> str:
    return json.dumps(to_dict(message), separators=(",", ":"))


def decode(text: str) -> WireMessage:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON frame: {exc.msg}") from exc
    return from_dict(data)
