"""Report figures: trajectory plots and metric comparisons rendered to files.

These live on the CLI report path: `analyze --report-dir` drops PNG figures
next to the JSON report and the per-journey CSV; `tlx --report-dir` does the
same for questionnaire scores.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .logstore import FlightLog
from .metrics import JourneyReport, TaskGeometry
from .tlx import CONDITION_LABELS, CRITERIA, CRITERION_LABELS, TlxResponse


def save_trajectory_figure(log: FlightLog, geom: TaskGeometry, path: Path, title: str = "") -> Path:
    """Top-down flight path with the task markers."""
    fig, ax = plt.subplots(figsize=(7, 7))
    xs = [s.x for s in log.samples]
    ys = [s.y for s in log.samples]
    ax.plot(xs, ys, lw=0.7, color="tab:blue", label="flight path")
    sx, sy, _ = geom.start
    ax.plot([geom.start[0], geom.arrival[0]], [geom.start[1], geom.arrival[1]],
            ls="--", color="gray", label="reference path")
    ax.scatter(*geom.start[:2], marker="o", s=60, color="green", zorder=5, label="start")
    ax.scatter(*geom.arrival[:2], marker="o", s=60, color="purple", zorder=5, label="arrival")
    ax.scatter(*geom.checkpoint[:2], marker="^", s=60, color="orange", zorder=5, label="checkpoint")
    ax.scatter(*geom.target[:2], marker="s", s=80, color="red", zorder=5, label="target")
    # Window tripods sit either side of the checkpoint, across the path.
    dx = geom.arrival[0] - geom.start[0]
    dy = geom.arrival[1] - geom.start[1]
    norm = math.hypot(dx, dy)
    px, py = -dy / norm, dx / norm
    for sgn in (-1, 1):
        ax.scatter(
            geom.checkpoint[0] + sgn * px * geom.window_halfwidth,
            geom.checkpoint[1] + sgn * py * geom.window_halfwidth,
            marker="1", s=120, color="black", zorder=4,
        )
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_title(title or "Flight trajectory")
    ax.set_aspect("equal")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_metric_comparison_figure(reports: list[JourneyReport], path: Path) -> Path:
    """Bar chart per metric, one bar per condition."""
    fig, axes = plt.subplots(1, 3, figsize=(10, 3.5))
    labels = [r.label or f"cond{i}" for i, r in enumerate(reports)]
    series = [
        ("mle_m", "Mean lateral error [m]"),
        ("mye_rad", "Mean yaw error [rad]"),
        ("mct_s", "Mean completion time [s]"),
    ]
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for ax, (attr, title) in zip(axes, series):
        values = [getattr(r, attr) for r in reports]
        ax.bar(labels, values, color=colors[: len(reports)])
        for i, v in enumerate(values):
            ax.text(i, v, f"{v:.3f}", ha="center", va="bottom", fontsize=8)
        ax.set_title(title, fontsize=10)
        ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_journey_series_figure(report: JourneyReport, path: Path) -> Path:
    """Per-journey metric series for one condition."""
    fig, axes = plt.subplots(3, 1, figsize=(8, 7), sharex=True)
    idx = list(range(1, report.n_journeys + 1))
    axes[0].bar(idx, [j.lateral_mean_m for j in report.journeys], color="tab:blue")
    axes[0].set_ylabel("lateral [m]")
    axes[1].bar(idx, [j.yaw_mean_rad for j in report.journeys], color="tab:orange")
    axes[1].set_ylabel("yaw [rad]")
    axes[2].bar(idx, [j.completion_s for j in report.journeys], color="tab:green")
    axes[2].set_ylabel("time [s]")
    axes[2].set_xlabel("journey")
    axes[0].set_title(f"Per-journey metrics ({report.label or 'unlabeled'})")
    for ax in axes:
        ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_journeys_csv(reports: list[JourneyReport], path: Path) -> Path:
    """Comma-delimited per-journey rows across all conditions."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["condition", "journey", "direction", "departure_s", "arrival_s",
                    "completion_s", "lateral_mean_m", "yaw_mean_rad", "n_samples"])
        for rep in reports:
            for i, j in enumerate(rep.journeys, start=1):
                w.writerow([
                    rep.label or "", i, j.direction,
                    f"{j.departure_s:.6g}", f"{j.arrival_s:.6g}", f"{j.completion_s:.6g}",
                    f"{j.lateral_mean_m:.9g}", f"{j.yaw_mean_rad:.9g}", j.n_metric_samples,
                ])
    return path


def save_tlx_means_figure(responses: list[TlxResponse], path: Path) -> Path:
    """Grouped bars: mean score per criterion and condition."""
    fig, ax = plt.subplots(figsize=(9, 4.5))
    conditions = [c for c in CONDITION_LABELS if any(r.condition == c for r in responses)]
    width = 0.8 / max(len(conditions), 1)
    for ci, cond in enumerate(conditions):
        rows = [r for r in responses if r.condition == cond]
        means = [sum(getattr(r, crit) for r in rows) / len(rows) for crit in CRITERIA]
        xs = [i + ci * width for i in range(len(CRITERIA))]
        ax.bar(xs, means, width=width, label=CONDITION_LABELS[cond])
    ax.set_xticks([i + width * (len(conditions) - 1) / 2 for i in range(len(CRITERIA))])
    ax.set_xticklabels([CRITERION_LABELS[c] for c in CRITERIA], rotation=20, ha="right", fontsize=8)
    ax.set_ylabel("mean score")
    ax.set_title("Workload scores by criterion")
    ax.legend()
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
