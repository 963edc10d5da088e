/**
 * Target-gizmo dragging: picking in screen space, camera-plane unprojection,
 * and per-render-frame throttling of set_target messages. Pure logic; the
 * DOM wiring lives in main.ts.
 */
import { Camera, Vec3, add } from "./math3.js";
import type { Primitive } from "./scene.js";
import type { SetTarget } from "./protocol.js";

export const PICK_RADIUS_PX = 14;

export interface DragState {
  effector: string;
  depth: number; // view depth of the grabbed point, kept fixed for the drag
  position: Vec3; // current world position of the dragged target
  lastScreen: [number, number];
  dirty: boolean; // a move happened since the last emitted message
}

/** Nearest pickable marker within the pick radius, or null. */
export function pick(
  prims: Primitive[],
  camera: Camera,
  sx: number,
  sy: number,
): { id: string; at: Vec3 } | null {
  let best: { id: string; at: Vec3 } | null = null;
  let bestDist = PICK_RADIUS_PX;
  for (const prim of prims) {
    if (prim.kind !== "marker" || !prim.pickId) continue;
    const [px, py, depth] = camera.project(prim.at);
    if (depth <= 0) continue;
    const d = Math.hypot(px - sx, py - sy);
    if (d < bestDist) {
      bestDist = d;
      best = { id: prim.pickId, at: prim.at };
    }
  }
  return best;
}

export function beginDrag(camera: Camera, id: string, at: Vec3, sx: number, sy: number): DragState {
  return {
    effector: id,
    depth: camera.depthOf(at),
    position: [at[0], at[1], at[2]],
    lastScreen: [sx, sy],
    dirty: false,
  };
}

/** Apply mouse motion: moves the target in the camera-facing plane. */
export function moveDrag(drag: DragState, camera: Camera, sx: number, sy: number): void {
  const dx = sx - drag.lastScreen[0];
  const dy = sy - drag.lastScreen[1];
  if (dx === 0 && dy === 0) return;
  drag.position = add(drag.position, camera.unprojectDelta(dx, dy, drag.depth));
  drag.lastScreen = [sx, sy];
  drag.dirty = true;
}

/**
 * Called once per render frame: emits at most one set_target per frame
 * while dragging. Returns the message to send, or null.
 */
export function throttledMessage(drag: DragState): SetTarget | null {
  if (!drag.dirty) return null;
  drag.dirty = false;
  return {
    type: "set_target",
    effector: drag.effector,
    position: [drag.position[0], drag.position[1], drag.position[2]],
  };
}

/** Final exact position on release (always emitted). */
export function releaseMessage(drag: DragState): SetTarget {
  return {
    type: "set_target",
    effector: drag.effector,
    position: [drag.position[0], drag.position[1], drag.position[2]],
  };
}
