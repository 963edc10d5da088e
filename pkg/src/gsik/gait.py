"""Walking by alternating the IK base between the feet.

The planted (stance) foot is the kinematic root, so it cannot move by
construction. The swinging foot follows a smoothstep arc with a sinusoidal
lift; pelvis, head and hands follow continuous functions of the global step
phase so every emitted goal is continuous across root swaps. When the phase
crosses a step boundary the generator emits a root-swap command naming the
new stance foot, and the driver re-roots the skeleton there.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .controller import IkConfig, IkSession, FrameReport, solve_frame
from .errors import ValidationError
from .jacobian import EffectorGoal
from .kinematics import Skeleton, build_default_biped, forward_kinematics, site_positions
from .pgs import SolverConfig

LEFT = "left"
RIGHT = "right"

FOOT_SITES = {LEFT: "left-foot", RIGHT: "right-foot"}
_PHASE_EPS = 1e-9  # absorbs float accumulation when dt sums to a step exactly


@dataclass
class GaitParams:
    step_length: float = 0.3
    step_height: float = 0.08
    step_duration: float = 0.5
    stance_foot: str = RIGHT
    body_sway: float = 0.02

    def __post_init__(self):
        if min(self.step_length, self.step_height, self.step_duration) <= 0.0:
            raise ValidationError("step_length, step_height, step_duration must be > 0")
        if self.stance_foot not in (LEFT, RIGHT):
            raise ValidationError("stance_foot must be 'left' or 'right'")


@dataclass
class GaitPhase:
    t: float  # normalized phase within the current step, [0, 1]
    step_index: int = 0


def smoothstep(t: float) -> float:
    t = min(1.0, max(0.0, t))
    return t * t * (3.0 - 2.0 * t)


def swing_foot_target(
    params: GaitParams, phase: GaitPhase, start: np.ndarray, end: np.ndarray
) -> np.ndarray:
    """Point on the swing arc: smoothstep toward the landing, sine lift up."""
    s = smoothstep(phase.t)
    p = start + (end - start) * s
    p[1] += params.step_height * np.sin(np.pi * phase.t)
    return p


def _other(foot: str) -> str:
    return LEFT if foot == RIGHT else RIGHT


@dataclass
class _Rest:
    """Reference geometry captured from the rest pose."""

    pelvis: np.ndarray
    head: np.ndarray
    hands: dict
    mid_x: float


class GaitGenerator:
    """Pure phase/goal generator; owns no solver state.

    Goals are keyed by effector-site name. The optional third element of
    advance() names the new stance foot when a root swap is due; the caller
    re-roots the skeleton before applying the returned goals.
    """

    def __init__(self, params: GaitParams, foot_positions: dict, rest: _Rest):
        self.params = params
        self.phase = GaitPhase(0.0, 0)
        self.stance = params.stance_foot
        self.stance_pos = np.asarray(foot_positions[self.stance], dtype=float).copy()
        swing = _other(self.stance)
        self.swing_start = np.asarray(foot_positions[swing], dtype=float).copy()
        self.swing_end = self.swing_start.copy()
        self.swing_end[0] = self.stance_pos[0] + params.step_length
        # the foot goal may start from the foot's measured position (see
        # rebind_swing_start); body targets always follow this ideal arc so
        # they stay exactly continuous across swaps
        self.goal_swing_start = self.swing_start.copy()
        self._rest = rest
        self._sway_sign = 1.0 if self.stance == RIGHT else -1.0

    def rebind_swing_start(self, position: np.ndarray):
        """Anchor the emitted swing-foot goal at the foot's actual position.

        Called right after a root swap: while a foot is the base its toe can
        rotate with the body lean, so the new swing arc should depart from
        where the foot really is, not from the ideal footprint.
        """
        self.goal_swing_start = np.asarray(position, dtype=float).copy()

    def advance(self, dt: float) -> tuple[GaitPhase, dict, Optional[str]]:
        """Step time forward by dt (< step_duration) and emit the goal set."""
        if dt < 0.0:
            raise ValidationError("dt must be nonnegative")
        if dt >= self.params.step_duration:
            raise ValidationError("dt must be smaller than one step")
        t = self.phase.t + dt / self.params.step_duration
        swap = None
        if t >= 1.0 - _PHASE_EPS:
            t -= 1.0
            landed = self.swing_end.copy()
            new_swing_start = self.stance_pos.copy()
            self.stance = _other(self.stance)
            self.stance_pos = landed
            self.swing_start = new_swing_start
            self.goal_swing_start = new_swing_start.copy()
            self.swing_end = new_swing_start.copy()
            self.swing_end[0] = self.stance_pos[0] + self.params.step_length
            self.phase = GaitPhase(max(t, 0.0), self.phase.step_index + 1)
            swap = self.stance
        else:
            self.phase = GaitPhase(t, self.phase.step_index)
        return self.phase, self._goals(), swap

    def _goals(self) -> dict:
        """Goal specs (position, orientation-or-None) by site name.

        The stance foot gets no goal: it is the IK base and cannot move.
        The swing foot and the pelvis carry 6-DOF goals (flat foot, upright
        pelvis) so landings stay clean across root swaps; head and hands are
        position-only. Every target is continuous in the global phase."""
        params = self.params
        swing = _other(self.stance)
        swing_goal = swing_foot_target(params, self.phase, self.goal_swing_start, self.swing_end)
        swing_ideal = swing_foot_target(params, self.phase, self.swing_start, self.swing_end)
        feet = {self.stance: self.stance_pos.copy(), swing: swing_ideal}

        t = self.phase.t
        tau = self.phase.step_index + t
        sway = self._sway_sign * params.body_sway * np.sin(np.pi * tau)
        mid_x = 0.5 * (feet[LEFT][0] + feet[RIGHT][0])
        shift = mid_x - self._rest.mid_x
        # the hips must drop when the feet spread fore-aft, most at footfall
        # (t near 0 and 1), least at mid-stance; cos^2 keeps it C1 across swaps
        spread = 0.5 * params.step_length
        leg = self._rest.pelvis[1] - self.stance_pos[1]
        dip = 0.02 + max(0.0, leg - np.sqrt(max(leg * leg - spread * spread, 0.0)))
        crouch = dip * np.cos(np.pi * t) ** 2 + 0.02
        if tau < 1.0:  # ease the crouch in from the standing start
            crouch *= smoothstep(tau)

        rest = self._rest
        upright = np.eye(3)
        pelvis = rest.pelvis + [shift, -crouch, sway]
        head = rest.head + [shift, -crouch, 0.5 * sway]
        goals = {
            FOOT_SITES[swing]: (swing_goal, upright),
            "pelvis": (pelvis, upright),
            "head": (head, None),
        }
        # hands counter-swing the same-side foot about the body midline
        for foot, hand in ((LEFT, "left-hand"), (RIGHT, "right-hand")):
            counter = -0.5 * (feet[foot][0] - mid_x)
            goals[hand] = (rest.hands[hand] + [shift + counter, -crouch, 0.0], None)
        return goals


def default_gait_ik_config() -> IkConfig:
    """Solver settings tuned for 60 Hz walking updates."""
    return IkConfig(
        max_outer_iterations=2,
        solver=SolverConfig(max_iterations=20, delta_x_tol=1e-6),
    )


class WalkingDriver:
    """Owns an IkSession and a GaitGenerator; re-roots the skeleton on swaps."""

    def __init__(
        self,
        skeleton: Optional[Skeleton] = None,
        params: Optional[GaitParams] = None,
        ik_config: Optional[IkConfig] = None,
    ):
        skeleton = skeleton or build_default_biped()
        self.params = params or GaitParams()
        self.ik_config = ik_config or default_gait_ik_config()
        skeleton = self._ensure_foot_sites(skeleton)
        self.session = IkSession(skeleton)
        tf = forward_kinematics(skeleton, self.session.angles)
        pos = {s.name: p for s, p in zip(skeleton.effector_sites, site_positions(skeleton, tf))}
        feet = {LEFT: pos[FOOT_SITES[LEFT]], RIGHT: pos[FOOT_SITES[RIGHT]]}
        rest = _Rest(
            pelvis=pos["pelvis"].copy(),
            head=pos["head"].copy(),
            hands={"left-hand": pos["left-hand"].copy(), "right-hand": pos["right-hand"].copy()},
            mid_x=0.5 * (feet[LEFT][0] + feet[RIGHT][0]),
        )
        self.generator = GaitGenerator(self.params, feet, rest)
        self.root_swaps = 0
        # Joint names survive rebasing; site owners do not (rebasing re-anchors
        # sites that sit on the reversed path). Resolve each foot's base joint
        # by name once, against the skeleton as authored.
        self._foot_joint = {
            foot: skeleton.names[
                skeleton.effector_sites[skeleton.site_index(FOOT_SITES[foot])].joint
            ]
            for foot in (LEFT, RIGHT)
        }
        # re-root at startup only if the requested stance foot is not already
        # the base (co-located ankle joints count as the same foot)
        root_pos = tf.positions[skeleton.root_index]
        stance_pos = tf.positions[skeleton.joint_index(self._foot_joint[self.generator.stance])]
        if np.linalg.norm(root_pos - stance_pos) > 1e-9:
            self._rebase_to(self.params.stance_foot)

    @staticmethod
    def _ensure_foot_sites(skeleton: Skeleton) -> Skeleton:
        """The default biped roots at the right foot and carries no site for
        it; mirror the left-foot site so both feet are targetable."""
        names = {s.name for s in skeleton.effector_sites}
        if FOOT_SITES[RIGHT] not in names and FOOT_SITES[LEFT] in names:
            left = skeleton.effector_sites[skeleton.site_index(FOOT_SITES[LEFT])]
            mirror_joint = skeleton.joint_index("r_ankle_z")
            skeleton = skeleton.with_site(FOOT_SITES[RIGHT], mirror_joint, left.offset.copy())
        for foot in (LEFT, RIGHT):
            if FOOT_SITES[foot] not in {s.name for s in skeleton.effector_sites}:
                raise ValidationError(f"skeleton lacks a {FOOT_SITES[foot]} effector site")
        return skeleton

    def _rebase_to(self, foot: str):
        skeleton = self.session.skeleton
        self.session.rebase(skeleton.joint_index(self._foot_joint[foot]))
        self.root_swaps += 1

    def tick(self, dt: float) -> FrameReport:
        phase, goals_by_name, swap = self.generator.advance(dt)
        if swap is not None:
            self._rebase_to(swap)
            # depart the new swing arc from where that foot actually is
            skeleton = self.session.skeleton
            tf = self.session.transforms()
            swing_site = skeleton.site_index(FOOT_SITES[_other(swap)])
            actual = site_positions(skeleton, tf)[swing_site]
            self.generator.rebind_swing_start(actual)
            goals_by_name = self.generator._goals()
        skeleton = self.session.skeleton
        goals = []
        for name, (pos, orient) in sorted(goals_by_name.items()):
            goals.append(
                EffectorGoal(
                    site=skeleton.site_index(name),
                    target_position=pos,
                    target_orientation=np.eye(3) if orient is None else orient,
                    orientation_enabled=orient is not None,
                )
            )
        self.session.set_goals(goals)
        return solve_frame(self.session, self.ik_config)
