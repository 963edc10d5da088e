"""Figure rendering for the CLI report paths (bench and gait)."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def bench_figure(report, path: Path):
    """Solve time and sweeps-used versus iteration budget."""
    budgets = [r.iteration_budget for r in report.results]
    times = [r.mean_solve_time * 1e3 for r in report.results]
    iters = [r.mean_inner_iterations for r in report.results]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    x = np.arange(len(budgets))
    ax1.bar(x, times, color="#336699")
    ax1.set_xticks(x, [str(b) for b in budgets])
    ax1.set_xlabel("iteration budget")
    ax1.set_ylabel("mean solve time (ms)")
    ax1.axhline(report.warm_frame_time * 1e3, color="#cc4444", linestyle="--",
                label=f"warm frame {report.warm_frame_time*1e3:.2f} ms")
    ax1.legend(fontsize=8)
    ax2.bar(x, iters, color="#669933")
    ax2.set_xticks(x, [str(b) for b in budgets])
    ax2.set_xlabel("iteration budget")
    ax2.set_ylabel("mean sweeps used")
    fig.suptitle("Gauss-Seidel IK: cost vs iteration budget")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def gait_figure(times, foot_heights, pelvis_path, swap_times, path: Path):
    """Foot height profiles and pelvis trajectory over a walk."""
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(9, 5.5), sharex=True)
    for name, series in foot_heights.items():
        ax1.plot(times, series, label=name)
    for t in swap_times:
        ax1.axvline(t, color="gray", alpha=0.3, linewidth=0.8)
    ax1.set_ylabel("foot height (m)")
    ax1.legend(fontsize=8)
    pelvis = np.asarray(pelvis_path)
    ax2.plot(times, pelvis[:, 0], label="pelvis x")
    ax2.plot(times, pelvis[:, 1], label="pelvis y")
    ax2.plot(times, pelvis[:, 2], label="pelvis z")
    ax2.set_xlabel("time (s)")
    ax2.set_ylabel("pelvis (m)")
    ax2.legend(fontsize=8)
    fig.suptitle("gait trace (vertical lines mark root swaps)")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
