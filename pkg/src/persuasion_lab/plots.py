"""Figure rendering for the report-producing commands.

Every report path can drop a PNG next to its delimited output: the gain
search plots per-trial ambiguous values against the statistical benchmark,
the theorem campaign plots the constructed experiments and their obedience
margins, and the solver plots the obedient region with the optimum.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .campaign import TheoremTrial
from .model import GameSpec
from .senderopt import (
    GainReport,
    GainTrial,
    SenderSolution,
    _feasible_mask,
    _sender_objective,
)


def render_gain_figure(report: GainReport, trials: list[GainTrial], path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    xs = [t.trial for t in trials if t.obedient]
    ys = [t.sender_value for t in trials if t.obedient]
    if xs:
        ax.scatter(xs, ys, s=14, color="#3173b3", alpha=0.8, label="obedient ambiguous value")
    ax.axhline(report.v_stat, color="#c23b22", lw=1.5, label="optimal statistical value")
    ax.set_xlabel("trial")
    ax.set_ylabel("sender value")
    gap = "n/a" if report.gap is None else f"{report.gap:.3g}"
    ax.set_title(f"gain search: {report.obedient_count}/{report.trials} obedient, gap {gap}")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def render_theorem_figure(records: list[TheoremTrial], path: str | Path) -> Path:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.5, 4.2))
    if records:
        xs = np.array([r.hat_x for r in records])
        ys = np.array([r.hat_y for r in records])
        margins = np.array([r.margin for r in records])
        sc = ax1.scatter(xs, ys, c=margins, s=10, cmap="viridis", alpha=0.8)
        fig.colorbar(sc, ax=ax1, label="obedience margin")
        ax2.hist(margins, bins=40, color="#3173b3")
    ax1.set_xlim(-0.02, 1.02)
    ax1.set_ylim(-0.02, 1.02)
    ax1.set_xlabel("constructed x")
    ax1.set_ylabel("constructed y")
    ax1.set_title("constructed obedient experiments")
    ax2.set_xlabel("obedience margin")
    ax2.set_ylabel("count")
    ax2.set_title("margin distribution")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def render_solve_figure(game: GameSpec, solution: SenderSolution, path: str | Path) -> Path | None:
    """Obedient region and sender objective over the unit square; binary only."""
    if not game.is_binary:
        return None
    axis = np.linspace(0.0, 1.0, 201)
    X, Y = np.meshgrid(axis, axis, indexing="ij")
    mask = _feasible_mask(game, X, Y)
    vals = _sender_objective(game, X, Y)
    fig, ax = plt.subplots(figsize=(5.8, 5.2))
    shaded = np.where(mask, vals, np.nan)
    pc = ax.pcolormesh(X, Y, shaded, shading="auto", cmap="viridis")
    fig.colorbar(pc, ax=ax, label="worst-case sender payoff")
    ax.contour(X, Y, mask.astype(float), levels=[0.5], colors="k", linewidths=0.8)
    k = solution.experiment.kernel
    ax.plot([k[0, 0]], [k[1, 0]], marker="*", ms=16, color="#c23b22", label="optimum")
    ax.set_xlabel("first-action probability in state 1")
    ax.set_ylabel("first-action probability in state 2")
    ax.set_title(f"obedient region, value {solution.value:.6g} ({solution.method})")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)
