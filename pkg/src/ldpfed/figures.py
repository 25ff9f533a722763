"""Matplotlib renderings written next to report files.

All figures go through the Agg backend so the CLI works headless.  File
names derive from the report path: report.json gets report.cost.png and
report.recovery.png (simulate) or report.tradeoff.png (sweep).
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .recovery import RecoveryReport
from .reports import ExperimentReport, SweepRow

# e^-1, the heuristic boundary between a good and a useless reconstruction
GOOD_GUESS_THRESHOLD = float(np.exp(-1.0))


def _fig_path(out_path: Path, tag: str) -> Path:
    return out_path.with_suffix(f".{tag}.png")


def render_experiment_figures(
    report: ExperimentReport, recovery: RecoveryReport, out_path: Path
) -> list[Path]:
    """Cost-per-epoch curve and per-user recovery scores for one run."""
    paths = []

    epochs = [s.epoch for s in report.epoch_summaries]
    costs = [s.cost for s in report.epoch_summaries]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(epochs, costs, marker="o", markersize=3, linewidth=1.2, color="#2E86AB")
    ax.set_xlabel("epoch")
    ax.set_ylabel("cost")
    ax.set_title(f"{report.model} / {report.mechanism} training cost")
    ax.grid(alpha=0.3)
    if min(costs) > 0:
        ax.set_yscale("log")
    cost_path = _fig_path(out_path, "cost")
    fig.tight_layout()
    fig.savefig(cost_path, dpi=150)
    plt.close(fig)
    paths.append(cost_path)

    scores = [r.exp_hamming for r in recovery.per_user]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(range(len(scores)), scores, width=1.0, color="#A23B72")
    ax.axhline(
        GOOD_GUESS_THRESHOLD,
        color="gray",
        linestyle="--",
        linewidth=1,
        label=f"good-guess threshold {GOOD_GUESS_THRESHOLD:.3f}",
    )
    ax.set_xlabel("user")
    ax.set_ylabel("exp-hamming recovery")
    ax.set_ylim(0, 1.05)
    ax.set_title(
        f"recovery per user (avg {recovery.average_exp_hamming:.3f})"
    )
    ax.legend(loc="upper right", fontsize=8)
    rec_path = _fig_path(out_path, "recovery")
    fig.tight_layout()
    fig.savefig(rec_path, dpi=150)
    plt.close(fig)
    paths.append(rec_path)
    return paths


def render_sweep_figures(rows: list[SweepRow], out_path: Path) -> list[Path]:
    """Privacy-utility tradeoff: per-epsilon mean recovery and mean cost."""
    epsilons = sorted({row.epsilon for row in rows})
    mean_recovery = []
    mean_cost = []
    for eps in epsilons:
        grp = [row for row in rows if row.epsilon == eps]
        mean_recovery.append(np.mean([row.avg_exp_hamming for row in grp]))
        mean_cost.append(np.mean([row.final_cost for row in grp]))

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.plot(epsilons, mean_recovery, marker="o", color="#A23B72")
    ax1.axhline(GOOD_GUESS_THRESHOLD, color="gray", linestyle="--", linewidth=1)
    ax1.set_xlabel("privacy budget")
    ax1.set_ylabel("mean avg exp-hamming recovery")
    ax1.set_ylim(0, 1.05)
    ax1.set_title("recovery vs budget")
    ax1.grid(alpha=0.3)
    ax2.plot(epsilons, mean_cost, marker="o", color="#2E86AB")
    ax2.set_xlabel("privacy budget")
    ax2.set_ylabel("mean final cost")
    ax2.set_title("model cost vs budget")
    ax2.grid(alpha=0.3)
    fig.tight_layout()
    path = _fig_path(out_path, "tradeoff")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return [path]
