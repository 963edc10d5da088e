import test from "node:test";
import assert from "node:assert/strict";

import { PoseClient } from "../src/client.js";
import { encode } from "../src/protocol.js";

/** Scriptable stand-in for a WebSocket. */
class FakeSocket {
  static instances: FakeSocket[] = [];
  readyState = 0; // CONNECTING
  sent: string[] = [];
  onopen: ((ev?: unknown) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;
  onerror: ((ev?: unknown) => void) | null = null;

  constructor(public url: string) {
    FakeSocket.instances.push(this);
  }

  open(): void {
    this.readyState = 1;
    this.onopen?.();
  }

  receive(frame: string): void {
    this.onmessage?.({ data: frame });
  }

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.readyState = 3;
    this.onclose?.();
  }
}

function makeClient(): { client: PoseClient; socket: () => FakeSocket } {
  FakeSocket.instances = [];
  const client = new PoseClient("ws://test/ws", (url) => new FakeSocket(url), false);
  client.connect();
  return { client, socket: () => FakeSocket.instances[FakeSocket.instances.length - 1] };
}

test("messages queue while disconnected and flush in order on open", () => {
  const { client, socket } = makeClient();
  client.send({ type: "set_target", effector: "a", position: [1, 2, 3] });
  client.send({ type: "stop_gait" });
  assert.equal(client.queuedCount, 2);
  assert.equal(socket().sent.length, 0);
  socket().open();
  assert.equal(client.queuedCount, 0);
  assert.deepEqual(
    socket().sent.map((f) => JSON.parse(f).type),
    ["set_target", "stop_gait"],
  );
});

test("latest pose wins between render frames", () => {
  const { client, socket } = makeClient();
  socket().open();
  const mk = (y: number) =>
    encode({
      type: "pose_update",
      angles: [y],
      positions: [[0, y, 0]],
      effector_errors: {},
    });
  socket().receive(mk(1));
  socket().receive(mk(2));
  socket().receive(mk(3));
  assert.deepEqual(client.latestPose?.angles, [3]);
});

test("stats and errors route to their handlers; garbage is dropped", () => {
  const { client, socket } = makeClient();
  socket().open();
  const stats: number[] = [];
  const errors: string[] = [];
  client.onStats = (s) => stats.push(s.iterations);
  client.onServerError = (m) => errors.push(m);
  socket().receive(encode({ type: "solve_stats", iterations: 4, residual: 1e-7, termination: "x", solve_time: 0.001 }));
  socket().receive(encode({ type: "error", message: "nope" }));
  socket().receive("{broken");
  assert.deepEqual(stats, [4]);
  assert.deepEqual(errors, ["nope"]);
  assert.equal(client.latestStats?.iterations, 4);
});

test("UI never computes poses: the buffer only ever holds server frames", () => {
  const { client, socket } = makeClient();
  const pose = () => client.latestPose as { angles: number[] } | null;
  assert.equal(pose(), null);
  socket().open();
  assert.equal(pose(), null); // connecting alone produces nothing
  client.send({ type: "set_target", effector: "a", position: [0, 0, 0] });
  assert.equal(pose(), null); // sending alone produces nothing
  socket().receive(
    encode({ type: "pose_update", angles: [1], positions: [[0, 0, 0]], effector_errors: {} }),
  );
  assert.deepEqual(pose()?.angles, [1]);
});
