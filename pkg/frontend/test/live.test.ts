/**
 * Protocol conformance against the real server: spawns `gsik serve`, replays
 * a scripted drag session, and checks that every set_target is answered by a
 * pose_update plus solve_stats pair.
 */
import test from "node:test";
import assert from "node:assert/strict";
import { spawn, ChildProcess } from "node:child_process";
import { WebSocket } from "ws";

import { decode, encode, PoseUpdate, SolveStats, WireMessage } from "../src/protocol.js";

const PORT = 18340 + (process.pid % 1000);
const BASE = `http://127.0.0.1:${PORT}`;

async function waitForServer(proc: ChildProcess, timeoutMs = 30000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  let lastErr: unknown = null;
  while (Date.now() < deadline) {
    if (proc.exitCode !== null) {
      throw new Error(`server exited early with code ${proc.exitCode}`);
    }
    try {
      const resp = await fetch(BASE + "/");
      if (resp.ok) return;
    } catch (err) {
      lastErr = err;
    }
    await new Promise((r) => setTimeout(r, 150));
  }
  throw new Error(`server did not come up: ${lastErr}`);
}

class FrameReader {
  private frames: WireMessage[] = [];
  private waiters: ((m: WireMessage) => void)[] = [];

  constructor(ws: WebSocket) {
    ws.on("message", (data) => {
      const msg = decode(data.toString());
      const waiter = this.waiters.shift();
      if (waiter) waiter(msg);
      else this.frames.push(msg);
    });
  }

  next(timeoutMs = 10000): Promise<WireMessage> {
    const queued = this.frames.shift();
    if (queued) return Promise.resolve(queued);
    return new Promise((resolve, reject) => {
      const timer = setTimeout(() => reject(new Error("timed out waiting for frame")), timeoutMs);
      this.waiters.push((m) => {
        clearTimeout(timer);
        resolve(m);
      });
    });
  }
}

test("scripted drag session: every set_target answered by pose_update + solve_stats", async () => {
  const server = spawn("python3", ["-m", "gsik.cli", "serve", "--port", String(PORT)], {
    stdio: ["ignore", "pipe", "pipe"],
  });
  let stderr = "";
  server.stderr?.on("data", (d) => (stderr += d.toString()));
  try {
    await waitForServer(server);
    const ws = new WebSocket(`ws://127.0.0.1:${PORT}/ws`);
    await new Promise<void>((resolve, reject) => {
      ws.on("open", () => resolve());
      ws.on("error", reject);
    });
    const reader = new FrameReader(ws);

    const hello = (await reader.next()) as PoseUpdate;
    assert.equal(hello.type, "pose_update");
    assert.equal(hello.angles.length, 30);
    const start = hello.effectors!["right-hand"].position;

    const frames = 40;
    let answered = 0;
    for (let k = 1; k <= frames; k++) {
      const target: [number, number, number] = [
        start[0] + 0.004 * k,
        start[1] + 0.002 * k,
        start[2],
      ];
      ws.send(encode({ type: "set_target", effector: "right-hand", position: target }));
      const pose = (await reader.next()) as PoseUpdate;
      const stats = (await reader.next()) as SolveStats;
      assert.equal(pose.type, "pose_update", `frame ${k}`);
      assert.equal(stats.type, "solve_stats", `frame ${k}`);
      assert.ok(Number.isFinite(stats.residual));
      assert.ok(pose.angles.every(Number.isFinite));
      assert.ok(pose.effector_errors["right-hand"] < 0.25);
      answered++;
    }
    assert.equal(answered, frames);

    // temporal coherence is visible over the session: dragging stays cheap
    ws.send(encode({ type: "set_target", effector: "right-hand", position: [
      start[0] + 0.004 * frames, start[1] + 0.002 * frames, start[2]] }));
    await reader.next();
    const settled = (await reader.next()) as SolveStats;
    assert.ok(settled.iterations <= 20);

    ws.close();
  } finally {
    server.kill("SIGINT");
    await new Promise((r) => setTimeout(r, 300));
    if (server.exitCode === null) server.kill("SIGKILL");
    if (stderr.includes("Traceback")) {
      throw new Error(`server errors:\n${stderr}`);
    }
  }
});
