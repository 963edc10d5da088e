"""Articulated skeletons built from single-axis revolute joints.

A skeleton is a tree of 1-DOF joints. Multi-axis anatomical joints (hips,
shoulders, ...) are expressed as runs of co-located 1-DOF joints connected by
zero-length links. Forward kinematics composes, per joint,

    world(i) = world(parent) * translate(offset_i) * rotate(axis_i, angle_i)

so a joint's own angle never moves its own origin, only its subtree.

All positions are meters, all angles radians, right-handed coordinates,
y up. The default biped walks along +x; +z is its right side.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace
from importlib import resources
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionError, SchemaError, ValidationError
from .rotations import axis_angle_matrix, quat_to_matrix, matrix_to_quat

_AXIS_TOL = 1e-9


@dataclass
class Joint:
    """One revolute degree of freedom.

    offset translates from the parent joint frame to this joint frame
    (expressed in the parent frame); axis is the unit rotation axis in this
    joint's pre-rotation frame; limits is the closed angle interval.
    """

    name: str
    parent: Optional[int]
    axis: np.ndarray
    offset: np.ndarray
    limits: tuple[float, float] = (-np.pi, np.pi)

    def __post_init__(self):
        self.axis = np.asarray(self.axis, dtype=float)
        self.offset = np.asarray(self.offset, dtype=float)
        if self.axis.shape != (3,) or self.offset.shape != (3,):
            raise ValidationError(f"joint {self.name!r}: axis and offset must be 3-vectors")
        if abs(np.linalg.norm(self.axis) - 1.0) > _AXIS_TOL:
            raise ValidationError(f"joint {self.name!r}: axis must have unit length")
        lo, hi = self.limits
        if not lo <= hi:
            raise ValidationError(f"joint {self.name!r}: lower limit exceeds upper")
        self.limits = (float(lo), float(hi))


@dataclass
class EffectorSite:
    """A named attachment point: world pose follows the owning joint."""

    name: str
    joint: int
    offset: np.ndarray

    def __post_init__(self):
        self.offset = np.asarray(self.offset, dtype=float)
        if self.offset.shape != (3,):
            raise ValidationError(f"site {self.name!r}: offset must be a 3-vector")


@dataclass
class RigidTransform:
    rotation: np.ndarray
    position: np.ndarray

    @staticmethod
    def identity() -> "RigidTransform":
        return RigidTransform(np.eye(3), np.zeros(3))


@dataclass
class GlobalTransforms:
    """World rotation and position of every joint, in storage order."""

    rotations: np.ndarray  # (n, 3, 3)
    positions: np.ndarray  # (n, 3)

    def __len__(self) -> int:
        return self.positions.shape[0]


class Skeleton:
    """Immutable joint tree plus effector sites.

    Joints must be stored in topological order (every parent precedes its
    children) with exactly one root. Treat instances as frozen; share freely
    across threads.
    """

    def __init__(
        self,
        joints: Sequence[Joint],
        effector_sites: Sequence[EffectorSite] = (),
        root_transform: Optional[RigidTransform] = None,
    ):
        self.joints = list(joints)
        self.effector_sites = list(effector_sites)
        self.root_transform = root_transform or RigidTransform.identity()
        self._validate()
        n = len(self.joints)
        self.parents = np.array(
            [-1 if j.parent is None else j.parent for j in self.joints], dtype=int
        )
        self.axes = np.array([j.axis for j in self.joints])
        self.offsets = np.array([j.offset for j in self.joints])
        self.lower = np.array([j.limits[0] for j in self.joints])
        self.upper = np.array([j.limits[1] for j in self.joints])
        self.names = [j.name for j in self.joints]
        self._name_index = {j.name: i for i, j in enumerate(self.joints)}
        # ancestor chain (root -> joint, inclusive) per joint, for Jacobian sparsity
        self._chains: list[np.ndarray] = []
        for i in range(n):
            chain = []
            k = i
            while k >= 0:
                chain.append(k)
                k = self.parents[k]
            self._chains.append(np.array(chain[::-1], dtype=int))

    def _validate(self):
        n = len(self.joints)
        if n == 0:
            raise ValidationError("skeleton needs at least one joint")
        roots = [i for i, j in enumerate(self.joints) if j.parent is None]
        if len(roots) != 1:
            raise ValidationError(f"expected exactly one root joint, found {len(roots)}")
        for i, j in enumerate(self.joints):
            if j.parent is not None and not 0 <= j.parent < i:
                raise ValidationError(
                    f"joint {i} ({j.name!r}) breaks topological order: parent {j.parent}"
                )
        for s in self.effector_sites:
            if not 0 <= s.joint < n:
                raise ValidationError(f"site {s.name!r} references invalid joint {s.joint}")

    # -- queries ---------------------------------------------------------

    def __len__(self) -> int:
        return len(self.joints)

    @property
    def root_index(self) -> int:
        return int(np.argmin(self.parents))  # the single -1 entry

    def joint_index(self, name: str) -> int:
        try:
            return self._name_index[name]
        except KeyError:
            raise IndexError(f"no joint named {name!r}") from None

    def site_index(self, name: str) -> int:
        for i, s in enumerate(self.effector_sites):
            if s.name == name:
                return i
        raise IndexError(f"no effector site named {name!r}")

    def chain_to(self, joint: int) -> np.ndarray:
        """Joint indices from the root down to ``joint``, inclusive."""
        return self._chains[joint]

    def zero_pose(self) -> np.ndarray:
        return np.zeros(len(self.joints))

    def clamp_pose(self, angles: np.ndarray) -> np.ndarray:
        return np.clip(angles, self.lower, self.upper)

    def within_limits(self, angles: np.ndarray) -> bool:
        return bool(np.all(angles >= self.lower) and np.all(angles <= self.upper))

    def with_site(self, name: str, joint: int, offset) -> "Skeleton":
        """Functional update: add or replace an effector site."""
        sites = [s for s in self.effector_sites if s.name != name]
        sites.append(EffectorSite(name, joint, np.asarray(offset, dtype=float)))
        return Skeleton([replace(j) for j in self.joints], sites, self.root_transform)


# -- forward kinematics ---------------------------------------------------


def _local_rotations(axes: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Batched Rodrigues matrices, one per joint."""
    c = np.cos(angles)
    s = np.sin(angles)
    t = 1.0 - c
    x, y, z = axes[:, 0], axes[:, 1], axes[:, 2]
    rot = np.empty((len(angles), 3, 3))
    rot[:, 0, 0] = t * x * x + c
    rot[:, 0, 1] = t * x * y - s * z
    rot[:, 0, 2] = t * x * z + s * y
    rot[:, 1, 0] = t * x * y + s * z
    rot[:, 1, 1] = t * y * y + c
    rot[:, 1, 2] = t * y * z - s * x
    rot[:, 2, 0] = t * x * z - s * y
    rot[:, 2, 1] = t * y * z + s * x
    rot[:, 2, 2] = t * z * z + c
    return rot


def forward_kinematics(skeleton: Skeleton, angles: np.ndarray) -> GlobalTransforms:
    """World transforms of all joints for the given pose, root to leaves."""
    angles = np.asarray(angles, dtype=float)
    n = len(skeleton)
    if angles.shape != (n,):
        raise DimensionError(f"pose has {angles.shape} angles, skeleton has {n} joints")
    local = _local_rotations(skeleton.axes, angles)
    rot = np.empty((n, 3, 3))
    pos = np.empty((n, 3))
    parents = skeleton.parents
    offsets = skeleton.offsets
    for i in range(n):
        p = parents[i]
        if p < 0:
            pr = skeleton.root_transform.rotation
            pp = skeleton.root_transform.position
        else:
            pr = rot[p]
            pp = pos[p]
        pos[i] = pr @ offsets[i] + pp
        np.matmul(pr, local[i], out=rot[i])
    return GlobalTransforms(rot, pos)


def effector_state(
    skeleton: Skeleton,
    angles: np.ndarray,
    site: int,
    transforms: Optional[GlobalTransforms] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """World position and orientation of one effector site."""
    if not 0 <= site < len(skeleton.effector_sites):
        raise IndexError(f"effector site {site} out of range")
    if transforms is None:
        transforms = forward_kinematics(skeleton, angles)
    s = skeleton.effector_sites[site]
    rot = transforms.rotations[s.joint]
    pos = rot @ s.offset + transforms.positions[s.joint]
    return pos, rot


def site_positions(skeleton: Skeleton, transforms: GlobalTransforms) -> np.ndarray:
    """World positions of all effector sites, in site order."""
    out = np.empty((len(skeleton.effector_sites), 3))
    for i, s in enumerate(skeleton.effector_sites):
        out[i] = transforms.rotations[s.joint] @ s.offset + transforms.positions[s.joint]
    return out


# -- rebasing --------------------------------------------------------------


@dataclass
class RebaseResult:
    skeleton: Skeleton
    angles: np.ndarray
    index_map: np.ndarray  # old joint index -> new joint index


def rebase(skeleton: Skeleton, angles: np.ndarray, new_root: int) -> RebaseResult:
    """Re-root the tree at ``new_root``, preserving world geometry.

    Parent links along the path old-root -> new_root are reversed. A reversed
    joint keeps its rotation axis, its offset becomes the negated offset of
    the next joint up the old chain, its angle and limits negate. Subtrees
    and sites hanging off a path joint re-anchor one node toward the new root
    so they stay rigid with the same physical link. The world pose described
    by ``angles`` is reproduced exactly by the returned skeleton and angles.

    Children and sites of the new root itself stay attached to it; their
    offsets are re-expressed at the supplied pose (they ride with the first
    body above the new base from then on).
    """
    n = len(skeleton)
    angles = np.asarray(angles, dtype=float)
    if angles.shape != (n,):
        raise DimensionError(f"pose has {angles.shape} angles, skeleton has {n} joints")
    if not 0 <= new_root < n:
        raise IndexError(f"new root {new_root} out of range")
    if new_root == skeleton.root_index:
        return RebaseResult(
            Skeleton([replace(j) for j in skeleton.joints],
                     [replace(s) for s in skeleton.effector_sites],
                     skeleton.root_transform),
            angles.copy(),
            np.arange(n),
        )

    tf = forward_kinematics(skeleton, angles)
    path = list(skeleton.chain_to(new_root))  # old root ... new root
    on_path = set(path)
    succ = {path[j]: path[j + 1] for j in range(len(path) - 1)}  # toward new root

    new_parent = [0] * n
    new_offset = [None] * n
    new_axis = [None] * n
    new_limits = [None] * n
    new_angle = np.empty(n)

    local_root = axis_angle_matrix(skeleton.axes[new_root], angles[new_root])
    for i in range(n):
        j = skeleton.joints[i]
        if i == new_root:
            new_parent[i] = -1
            new_offset[i] = np.zeros(3)
            new_axis[i] = j.axis.copy()
            new_limits[i] = (-j.limits[1], -j.limits[0])
            new_angle[i] = -angles[i]
        elif i in on_path:
            up = succ[i]
            new_parent[i] = up
            new_offset[i] = -skeleton.offsets[up]
            new_axis[i] = j.axis.copy()
            new_limits[i] = (-j.limits[1], -j.limits[0])
            new_angle[i] = -angles[i]
        elif j.parent in on_path and j.parent != new_root:
            up = succ[j.parent]
            new_parent[i] = up
            new_offset[i] = j.offset - skeleton.offsets[up]
            new_axis[i] = j.axis.copy()
            new_limits[i] = j.limits
            new_angle[i] = angles[i]
        elif j.parent == new_root:
            # re-express in the new root's post-rotation frame at this pose
            new_parent[i] = new_root
            new_offset[i] = local_root @ j.offset
            new_axis[i] = local_root @ j.axis
            new_limits[i] = j.limits
            new_angle[i] = angles[i]
        else:
            new_parent[i] = j.parent
            new_offset[i] = j.offset.copy()
            new_axis[i] = j.axis.copy()
            new_limits[i] = j.limits
            new_angle[i] = angles[i]

    # depth-first order from the new root, children in old-index order
    children: list[list[int]] = [[] for _ in range(n)]
    for i in range(n):
        if new_parent[i] >= 0:
            children[new_parent[i]].append(i)
    order: list[int] = []
    stack = [new_root]
    while stack:
        i = stack.pop()
        order.append(i)
        stack.extend(reversed(children[i]))
    index_map = np.empty(n, dtype=int)
    for new_i, old_i in enumerate(order):
        index_map[old_i] = new_i

    joints = []
    for old_i in order:
        p = new_parent[old_i]
        joints.append(
            Joint(
                name=skeleton.names[old_i],
                parent=None if p < 0 else int(index_map[p]),
                axis=new_axis[old_i],
                offset=new_offset[old_i],
                limits=new_limits[old_i],
            )
        )

    # sites keep their owner joint so their orientation keeps meaning the
    # same frame across repeated re-rooting; on reversed joints the offset is
    # re-expressed at this pose (the reversed frame differs by the joint's
    # own local rotation)
    sites = []
    for s in skeleton.effector_sites:
        if s.joint in on_path:
            local = axis_angle_matrix(skeleton.axes[s.joint], angles[s.joint])
            sites.append(EffectorSite(s.name, int(index_map[s.joint]), local @ s.offset))
        else:
            sites.append(EffectorSite(s.name, int(index_map[s.joint]), s.offset.copy()))

    root_tf = RigidTransform(tf.rotations[new_root].copy(), tf.positions[new_root].copy())
    return RebaseResult(Skeleton(joints, sites, root_tf), new_angle[order], index_map)


# -- JSON schema ------------------------------------------------------------


def skeleton_to_dict(skeleton: Skeleton) -> dict:
    d = {
        "joints": [
            {
                "name": j.name,
                "parent": j.parent,
                "axis": list(map(float, j.axis)),
                "offset": list(map(float, j.offset)),
                "limits": [j.limits[0], j.limits[1]],
            }
            for j in skeleton.joints
        ],
        "effectors": [
            {"name": s.name, "joint": s.joint, "offset": list(map(float, s.offset))}
            for s in skeleton.effector_sites
        ],
    }
    rt = skeleton.root_transform
    if not (np.allclose(rt.rotation, np.eye(3)) and np.allclose(rt.position, 0.0)):
        d["root_transform"] = {
            "rotation": list(map(float, matrix_to_quat(rt.rotation))),
            "position": list(map(float, rt.position)),
        }
    return d


def skeleton_from_dict(data: dict) -> Skeleton:
    if not isinstance(data, dict) or not isinstance(data.get("joints"), list):
        raise SchemaError("skeleton JSON must be an object with a 'joints' array")
    if not isinstance(data.get("effectors", []), list):
        raise SchemaError("'effectors' must be an array")
    joints = []
    names: dict[str, int] = {}
    for i, jd in enumerate(data["joints"]):
        if not isinstance(jd, dict):
            raise SchemaError(f"joint {i}: expected an object")
        try:
            parent = jd.get("parent")
            if isinstance(parent, str):
                parent = names[parent]
            axis = np.asarray(jd["axis"], dtype=float)
            norm = np.linalg.norm(axis)
            if abs(norm - 1.0) > 1e-6 or norm == 0.0:
                raise SchemaError(f"joint {i}: axis must be (near) unit length")
            lo, hi = jd.get("limits", [-np.pi, np.pi])
            joints.append(
                Joint(
                    name=jd.get("name", f"joint{i}"),
                    parent=parent,
                    axis=axis / norm,
                    offset=np.asarray(jd["offset"], dtype=float),
                    limits=(float(lo), float(hi)),
                )
            )
            names[joints[-1].name] = i
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"joint {i}: {exc}") from exc
    sites = []
    for i, sd in enumerate(data.get("effectors", [])):
        if not isinstance(sd, dict):
            raise SchemaError(f"effector {i}: expected an object")
        try:
            joint = sd["joint"]
            if isinstance(joint, str):
                joint = names[joint]
            sites.append(
                EffectorSite(
                    name=sd.get("name", f"effector{i}"),
                    joint=int(joint),
                    offset=np.asarray(sd.get("offset", [0.0, 0.0, 0.0]), dtype=float),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"effector {i}: {exc}") from exc
    root_tf = None
    if "root_transform" in data:
        rt = data["root_transform"]
        root_tf = RigidTransform(
            quat_to_matrix(np.asarray(rt.get("rotation", [0, 0, 0, 1]), dtype=float)),
            np.asarray(rt.get("position", [0, 0, 0]), dtype=float),
        )
    try:
        return Skeleton(joints, sites, root_tf)
    except ValidationError as exc:
        raise SchemaError(str(exc)) from exc


def load_skeleton(path) -> Skeleton:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return skeleton_from_dict(data)


def build_default_biped() -> Skeleton:
    """The 30-DOF biped shipped with the package, right foot as root.

    Proportions and joint limits live in data/biped.json, not in code.
    """
    text = resources.files("gsik.data").joinpath("biped.json").read_text()
    return skeleton_from_dict(json.loads(text))
