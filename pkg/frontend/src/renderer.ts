/** Canvas-2D renderer: projects primitives and paints them depth-sorted. */
import { Camera, Vec3 } from "./math3.js";
import type { Primitive } from "./scene.js";

const GRID_COLOR = "#2a2e35";

export function drawScene(
  ctx: CanvasRenderingContext2D,
  camera: Camera,
  prims: Primitive[],
): void {
  ctx.clearRect(0, 0, camera.width, camera.height);
  drawGrid(ctx, camera);

  const items: { depth: number; draw: () => void }[] = [];
  for (const prim of prims) {
    if (prim.kind === "line") {
      const a = camera.project(prim.from);
      const b = camera.project(prim.to);
      if (a[2] <= 0 || b[2] <= 0) continue;
      items.push({
        depth: (a[2] + b[2]) / 2,
        draw: () => {
          ctx.strokeStyle = prim.color;
          ctx.lineWidth = prim.width;
          ctx.beginPath();
          ctx.moveTo(a[0], a[1]);
          ctx.lineTo(b[0], b[1]);
          ctx.stroke();
        },
      });
    } else {
      const p = camera.project(prim.at);
      if (p[2] <= 0) continue;
      items.push({
        depth: p[2],
        draw: () => {
          ctx.fillStyle = prim.color;
          ctx.beginPath();
          ctx.arc(p[0], p[1], prim.radius, 0, 2 * Math.PI);
          ctx.fill();
          if (prim.pickId) {
            ctx.strokeStyle = prim.color;
            ctx.lineWidth = 1.5;
            ctx.beginPath();
            ctx.arc(p[0], p[1], prim.radius + 4, 0, 2 * Math.PI);
            ctx.stroke();
          }
          if (prim.label) {
            ctx.fillStyle = "#aab2bc";
            ctx.font = "11px system-ui, sans-serif";
            ctx.fillText(prim.label, p[0] + prim.radius + 5, p[1] + 3);
          }
        },
      });
    }
  }
  items.sort((a, b) => b.depth - a.depth); // far first
  for (const item of items) item.draw();
}

function drawGrid(ctx: CanvasRenderingContext2D, camera: Camera): void {
  ctx.strokeStyle = GRID_COLOR;
  ctx.lineWidth = 1;
  const lines: [Vec3, Vec3][] = [];
  const extent = 3;
  for (let i = -extent; i <= extent; i++) {
    lines.push([
      [i, 0, -extent],
      [i, 0, extent],
    ]);
    lines.push([
      [-extent, 0, i],
      [extent, 0, i],
    ]);
  }
  for (const [a, b] of lines) {
    const pa = camera.project(a);
    const pb = camera.project(b);
    if (pa[2] <= 0 || pb[2] <= 0) continue;
    ctx.beginPath();
    ctx.moveTo(pa[0], pa[1]);
    ctx.lineTo(pb[0], pb[1]);
    ctx.stroke();
  }
}
