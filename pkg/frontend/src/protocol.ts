/**
 * Wire protocol spoken with the pose service: JSON text frames tagged by a
 * `type` field. Mirrors the server's schema; every message round-trips
 * losslessly through encode/decode.
 */

export interface SetTarget {
  type: "set_target";
  effector: string;
  position: [number, number, number];
  orientation?: [number, number, number, number];
  weight?: number;
}

export interface SetConfig {
  type: "set_config";
  damping?: number;
  residual_tol?: number;
  delta_x_tol?: number;
  stagnation_tol?: number;
  max_iterations?: number;
  max_outer_iterations?: number;
  max_step?: number;
  warm_start?: boolean;
}

export interface LoadSkeleton {
  type: "load_skeleton";
  skeleton: Record<string, unknown>;
}

export interface StartGait {
  type: "start_gait";
  step_length?: number;
  step_height?: number;
  step_duration?: number;
  stance_foot?: "left" | "right";
  body_sway?: number;
}

export interface StopGait {
  type: "stop_gait";
}

export interface RebaseRoot {
  type: "rebase_root";
  joint: string | number;
}

export interface EffectorInfo {
  joint: number;
  position: [number, number, number];
  target?: [number, number, number];
}

export interface PoseUpdate {
  type: "pose_update";
  angles: number[];
  positions: [number, number, number][];
  effector_errors: Record<string, number>;
  joint_names?: string[];
  parents?: number[];
  axes?: [number, number, number][];
  effectors?: Record<string, EffectorInfo>;
}

export interface SolveStats {
  type: "solve_stats";
  iterations: number;
  residual: number;
  termination: string;
  solve_time: number;
  outer_iterations?: number;
}

export interface ErrorMessage {
  type: "error";
  message: string;
}

export type ClientMessage =
  | SetTarget
  | SetConfig
  | LoadSkeleton
  | StartGait
  | StopGait
  | RebaseRoot;

export type ServerMessage = PoseUpdate | SolveStats | ErrorMessage;
export type WireMessage = ClientMessage | ServerMessage;

const MESSAGE_TYPES = new Set([
  "set_target",
  "set_config",
  "load_skeleton",
  "start_gait",
  "stop_gait",
  "rebase_root",
  "pose_update",
  "solve_stats",
  "error",
]);

export function encode(message: WireMessage): string {
  if (!MESSAGE_TYPES.has(message.type)) {
    throw new Error(`not a wire message: ${(message as { type: string }).type}`);
  }
  // drop undefined optionals so the frame matches the server's canonical form
  return JSON.stringify(message, (_k, v) => (v === undefined ? undefined : v));
}

export function decode(text: string): WireMessage {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch (err) {
    throw new Error(`invalid JSON frame: ${(err as Error).message}`);
  }
  if (typeof data !== "object" || data === null || Array.isArray(data)) {
    throw new Error("wire message must be a JSON object");
  }
  const type = (data as { type?: unknown }).type;
  if (typeof type !== "string" || !MESSAGE_TYPES.has(type)) {
    throw new Error(`unknown message type: ${String(type)}`);
  }
  return data as WireMessage;
}

export function isPoseUpdate(m: WireMessage): m is PoseUpdate {
  return m.type === "pose_update";
}

export function isSolveStats(m: WireMessage): m is SolveStats {
  return m.type === "solve_stats";
}

export function isError(m: WireMessage): m is ErrorMessage {
  return m.type === "error";
}
