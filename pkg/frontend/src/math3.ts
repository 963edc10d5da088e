/** Small 3D vector helpers and an orbit camera with screen projection. */

export type Vec3 = [number, number, number];

export function add(a: Vec3, b: Vec3): Vec3 {
  return [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
}

export function sub(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

export function scale(a: Vec3, s: number): Vec3 {
  return [a[0] * s, a[1] * s, a[2] * s];
}

export function dot(a: Vec3, b: Vec3): number {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

export function cross(a: Vec3, b: Vec3): Vec3 {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
}

export function length(a: Vec3): number {
  return Math.hypot(a[0], a[1], a[2]);
}

export function normalize(a: Vec3): Vec3 {
  const n = length(a);
  return n < 1e-12 ? [0, 0, 0] : scale(a, 1 / n);
}

/**
 * Orbit camera: yaw/pitch around a target point at a distance, y-up,
 * perspective projection. Screen x grows right, screen y grows down.
 */
export class Camera {
  yaw = 0.5;
  pitch = 0.25;
  distance = 4.0;
  target: Vec3 = [0, 0.9, 0];
  fov = Math.PI / 4;
  width = 800;
  height = 600;

  /** Camera basis in world space: right, up, forward (toward the target). */
  basis(): { right: Vec3; up: Vec3; forward: Vec3; eye: Vec3 } {
    const cp = Math.cos(this.pitch);
    const sp = Math.sin(this.pitch);
    const cy = Math.cos(this.yaw);
    const sy = Math.sin(this.yaw);
    // eye offset from target (spherical, y-up)
    const offset: Vec3 = [cp * cy, sp, cp * sy];
    const eye = add(this.target, scale(offset, this.distance));
    const forward = normalize(sub(this.target, eye));
    const right = normalize(cross(forward, [0, 1, 0]));
    const up = cross(right, forward);
    return { right, up, forward, eye };
  }

  /** World point -> [screenX, screenY, viewDepth]; depth <= 0 is behind. */
  project(p: Vec3): [number, number, number] {
    const { right, up, forward, eye } = this.basis();
    const rel = sub(p, eye);
    const depth = dot(rel, forward);
    const fScale = this.height / (2 * Math.tan(this.fov / 2));
    const x = (dot(rel, right) / depth) * fScale + this.width / 2;
    const y = (-dot(rel, up) / depth) * fScale + this.height / 2;
    return [x, y, depth];
  }

  /**
   * Inverse of project at a fixed view depth: maps a screen-pixel delta to
   * the world-space move in the camera-facing plane through that depth.
   */
  unprojectDelta(dxPixels: number, dyPixels: number, depth: number): Vec3 {
    const { right, up } = this.basis();
    const fScale = this.height / (2 * Math.tan(this.fov / 2));
    const wx = (dxPixels * depth) / fScale;
    const wy = (-dyPixels * depth) / fScale;
    return add(scale(right, wx), scale(up, wy));
  }

  depthOf(p: Vec3): number {
    const { forward, eye } = this.basis();
    return dot(sub(p, eye), forward);
  }

  orbit(dYaw: number, dPitch: number): void {
    this.yaw += dYaw;
    const limit = Math.PI / 2 - 0.05;
    this.pitch = Math.min(limit, Math.max(-limit, this.pitch + dPitch));
  }

  zoom(factor: number): void {
    this.distance = Math.min(30, Math.max(0.5, this.distance * factor));
  }

  pan(dxPixels: number, dyPixels: number): void {
    const move = this.unprojectDelta(dxPixels, dyPixels, this.distance);
    this.target = sub(this.target, move);
  }
}
