/**
 * Pure scene construction: turns the latest pose_update (plus any drag in
 * progress) into a flat list of drawable primitives. No canvas access here,
 * so the whole visual convention is unit-testable.
 *
 * Conventions: ideal targets are red, current effectors are green, joint
 * markers are tinted by their rotation axis (x/y/z -> red/green/blue).
 */
import type { PoseUpdate } from "./protocol.js";
import type { Vec3 } from "./math3.js";

export const TARGET_COLOR = "#e5484d"; // red
export const EFFECTOR_COLOR = "#30a46c"; // green
export const AXIS_COLORS: Record<string, string> = {
  x: "#e5484d",
  y: "#30a46c",
  z: "#3e63dd",
};
export const BONE_COLOR = "#8b9199";

export interface LinePrimitive {
  kind: "line";
  from: Vec3;
  to: Vec3;
  color: string;
  width: number;
}

export interface MarkerPrimitive {
  kind: "marker";
  at: Vec3;
  color: string;
  radius: number;
  label?: string;
  pickId?: string; // effector name when the marker is a draggable target
}

export type Primitive = LinePrimitive | MarkerPrimitive;

export function dominantAxis(axis: [number, number, number]): "x" | "y" | "z" {
  const abs = axis.map(Math.abs);
  const k = abs.indexOf(Math.max(abs[0], abs[1], abs[2]));
  return (["x", "y", "z"] as const)[k];
}

export interface DragOverride {
  effector: string;
  position: Vec3;
}

/** Build the draw list for one frame of the editor. */
export function buildScene(pose: PoseUpdate | null, drag: DragOverride | null = null): Primitive[] {
  const prims: Primitive[] = [];
  if (!pose) {
    return prims;
  }
  const positions = pose.positions;
  const parents = pose.parents ?? [];
  const axes = pose.axes ?? [];

  // bones: segments from parent joint to child joint
  for (let i = 0; i < positions.length; i++) {
    const p = parents[i];
    if (p !== undefined && p >= 0) {
      prims.push({ kind: "line", from: positions[p], to: positions[i], color: BONE_COLOR, width: 3 });
    }
  }
  // joint markers tinted by rotation axis
  for (let i = 0; i < positions.length; i++) {
    const axis = axes[i] ?? [0, 0, 1];
    prims.push({
      kind: "marker",
      at: positions[i],
      color: AXIS_COLORS[dominantAxis(axis)],
      radius: 3.5,
    });
  }
  // effectors: green current markers, red target gizmos; both are grabbable
  // (grabbing a green marker creates a target at its position)
  for (const [name, info] of Object.entries(pose.effectors ?? {})) {
    prims.push({
      kind: "marker",
      at: info.position,
      color: EFFECTOR_COLOR,
      radius: 6,
      label: name,
      pickId: name,
    });
    let target = info.target;
    if (drag && drag.effector === name) {
      target = drag.position;
    }
    if (target) {
      prims.push({
        kind: "marker",
        at: target,
        color: TARGET_COLOR,
        radius: 7,
        pickId: name,
      });
    }
  }
  return prims;
}
