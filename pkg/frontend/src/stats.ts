/**
 * Solver telemetry panel: iterations/residual/termination/time readouts,
 * a sparkline of iterations over the last N frames, and the solver/gait
 * controls. Keeps its own history; rendering is driven by main.ts.
 */
import type { SolveStats } from "./protocol.js";

export const HISTORY = 120;

export class StatsPanel {
  history: number[] = [];

  constructor(
    private readout: HTMLElement,
    private spark: HTMLCanvasElement,
  ) {}

  push(stats: SolveStats): void {
    this.history.push(stats.iterations);
    if (this.history.length > HISTORY) {
      this.history.shift();
    }
    this.readout.textContent =
      `iterations ${stats.iterations}` +
      (stats.outer_iterations ? ` (outer ${stats.outer_iterations})` : "") +
      `  residual ${stats.residual.toExponential(2)}` +
      `  ${stats.termination}` +
      `  ${(stats.solve_time * 1e3).toFixed(2)} ms`;
    this.draw();
  }

  private draw(): void {
    const ctx = this.spark.getContext("2d");
    if (!ctx) return;
    const w = this.spark.width;
    const h = this.spark.height;
    ctx.clearRect(0, 0, w, h);
    if (this.history.length < 2) return;
    const max = Math.max(4, ...this.history);
    ctx.strokeStyle = "#3e63dd";
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    this.history.forEach((v, i) => {
      const x = (i / (HISTORY - 1)) * w;
      const y = h - (v / max) * (h - 4) - 2;
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    });
    ctx.stroke();
    ctx.fillStyle = "#aab2bc";
    ctx.font = "10px system-ui, sans-serif";
    ctx.fillText(`max ${max}`, 4, 10);
  }
}
