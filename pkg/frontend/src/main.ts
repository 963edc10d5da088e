/**
 * Editor bootstrap: socket, render loop, mouse wiring. The UI never solves
 * IK itself; every pose on screen came from a pose_update frame.
 */
import { PoseClient } from "./client.js";
import { Camera } from "./math3.js";
import { buildScene, DragOverride } from "./scene.js";
import { drawScene } from "./renderer.js";
import {
  DragState,
  beginDrag,
  moveDrag,
  pick,
  releaseMessage,
  throttledMessage,
} from "./drag.js";
import { StatsPanel } from "./stats.js";

const canvas = document.getElementById("view") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const statusEl = document.getElementById("status")!;
const errorsEl = document.getElementById("errors")!;
const camera = new Camera();

function resize(): void {
  canvas.width = canvas.clientWidth;
  canvas.height = canvas.clientHeight;
  camera.width = canvas.width;
  camera.height = canvas.height;
}
window.addEventListener("resize", resize);

const proto = location.protocol === "https:" ? "wss" : "ws";
const client = new PoseClient(
  `${proto}://${location.host}/ws`,
  (url) => new WebSocket(url),
);
client.onStateChange = (up) => {
  statusEl.textContent = up ? "connected" : "reconnecting…";
  statusEl.className = up ? "ok" : "down";
};
client.onServerError = (message) => {
  errorsEl.textContent = message;
  setTimeout(() => {
    if (errorsEl.textContent === message) errorsEl.textContent = "";
  }, 4000);
};

const panel = new StatsPanel(
  document.getElementById("stats-readout")!,
  document.getElementById("spark") as HTMLCanvasElement,
);
client.onStats = (s) => panel.push(s);

// -- mouse interaction --------------------------------------------------------

let drag: DragState | null = null;
let orbiting = false;
let panning = false;
let last: [number, number] = [0, 0];

function mousePos(ev: MouseEvent): [number, number] {
  const r = canvas.getBoundingClientRect();
  return [ev.clientX - r.left, ev.clientY - r.top];
}

canvas.addEventListener("mousedown", (ev) => {
  const [sx, sy] = mousePos(ev);
  last = [sx, sy];
  if (ev.button === 0) {
    const prims = buildScene(client.latestPose, dragOverride());
    const hit = pick(prims, camera, sx, sy);
    if (hit) {
      drag = beginDrag(camera, hit.id, hit.at, sx, sy);
      return;
    }
    orbiting = true;
  } else if (ev.button === 1 || ev.button === 2) {
    panning = true;
  }
});

window.addEventListener("mousemove", (ev) => {
  const [sx, sy] = mousePos(ev);
  if (drag) {
    moveDrag(drag, camera, sx, sy);
  } else if (orbiting) {
    camera.orbit((sx - last[0]) * 0.008, (sy - last[1]) * 0.008);
  } else if (panning) {
    camera.pan(sx - last[0], sy - last[1]);
  }
  last = [sx, sy];
});

window.addEventListener("mouseup", () => {
  if (drag) {
    client.send(releaseMessage(drag));
    drag = null;
  }
  orbiting = false;
  panning = false;
});

canvas.addEventListener("wheel", (ev) => {
  ev.preventDefault();
  camera.zoom(ev.deltaY > 0 ? 1.1 : 1 / 1.1);
});
canvas.addEventListener("contextmenu", (ev) => ev.preventDefault());

function dragOverride(): DragOverride | null {
  return drag ? { effector: drag.effector, position: drag.position } : null;
}

// -- controls -----------------------------------------------------------------

function bindSlider(id: string, format: (v: number) => string, send: (v: number) => void): void {
  const input = document.getElementById(id) as HTMLInputElement;
  const label = document.getElementById(`${id}-value`)!;
  const update = () => {
    const v = Number(input.value);
    label.textContent = format(v);
    send(v);
  };
  input.addEventListener("change", update);
  label.textContent = format(Number(input.value));
}

bindSlider("damping", (v) => (10 ** v).toExponential(0), (v) =>
  client.send({ type: "set_config", damping: 10 ** v }),
);
bindSlider("iterations", (v) => String(v), (v) =>
  client.send({ type: "set_config", max_iterations: Math.round(v) }),
);

document.getElementById("gait-start")!.addEventListener("click", () => {
  client.send({ type: "start_gait" });
});
document.getElementById("gait-stop")!.addEventListener("click", () => {
  client.send({ type: "stop_gait" });
});
document.getElementById("rebase-left")!.addEventListener("click", () => {
  client.send({ type: "rebase_root", joint: "l_ankle_z" });
});
document.getElementById("rebase-right")!.addEventListener("click", () => {
  client.send({ type: "rebase_root", joint: "r_ankle_z" });
});

// -- render loop ----------------------------------------------------------------

function frame(): void {
  // at most one set_target per render frame while dragging
  if (drag) {
    const msg = throttledMessage(drag);
    if (msg) client.send(msg);
  }
  drawScene(ctx, camera, buildScene(client.latestPose, dragOverride()));
  requestAnimationFrame(frame);
}

resize();
client.connect();
requestAnimationFrame(frame);
