"""Figure rendering for simulator outputs.

Four styles: 3-D Bloch-sphere trajectories with stability-colored
equilibrium markers, probability-versus-time curves with the measurement
window shaded, 2-D phase portraits from sampled vector-field grids, and
ensemble outcome histograms.  Rendering is deterministic: fixed figure
geometry, no timestamps in the image metadata.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .jobs import CLASS_COLORS, PlotJob
from .trajectory_io import InputError, read_run_log, read_trajectory

_SAVE_KWARGS = {"dpi": 150, "metadata": {"Software": None}}


def render(job: PlotJob) -> Path:
    """Render one job to its output image; returns the written path."""
    fig = {
        "bloch3d": _render_bloch3d,
        "prob-curves": _render_prob_curves,
        "phase-portrait": _render_phase_portrait,
        "ensemble-hist": _render_ensemble_hist,
    }[job.style](job)
    job.output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(job.output, **_SAVE_KWARGS)
    plt.close(fig)
    return job.output


def _sphere_wireframe(ax):
    u = np.linspace(0, 2 * np.pi, 25)
    v = np.linspace(0, np.pi, 13)
    x = np.outer(np.cos(u), np.sin(v))
    y = np.outer(np.sin(u), np.sin(v))
    z = np.outer(np.ones_like(u), np.cos(v))
    ax.plot_wireframe(x, y, z, color="lightsteelblue", linewidth=0.3, alpha=0.6)


def _annotate_fixed_points(ax, annotations, three_d):
    for fp in annotations.get("fixed_points", ()):
        color = CLASS_COLORS.get(fp.get("classification", ""), "black")
        loc = fp.get("location", ())
        if fp.get("classification") == "line-of-fixed-points" and three_d:
            ax.plot([0, 0], [0, 0], [-1, 1], color=color, linewidth=2.0)
            continue
        if three_d:
            ax.scatter(*loc[:3], color=color, s=60, depthshade=False)
        else:
            ax.axhline(0.0, color="none")  # keep axes untouched in 2-D styles


def _render_bloch3d(job: PlotJob):
    fig = plt.figure(figsize=(6, 6))
    ax = fig.add_subplot(projection="3d")
    _sphere_wireframe(ax)
    for path in job.inputs:
        table = read_trajectory(path)
        xs, ys, zs = table.column("x"), table.column("y"), table.column("z")
        ax.plot(xs, ys, zs, linewidth=1.2)
    _annotate_fixed_points(ax, job.annotations, three_d=True)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")
    ax.set_box_aspect((1, 1, 1))
    if job.title:
        ax.set_title(job.title)
    return fig


def _render_prob_curves(job: PlotJob):
    fig, ax = plt.subplots(figsize=(7, 4))
    for path in job.inputs:
        table = read_trajectory(path)
        t = table.column("t")
        names = list(job.columns) or table.names_matching("p", "overlap_")
        if not names:
            raise InputError(f"{path}: no probability columns to plot")
        for name in names:
            series = table.column(name)
            label = name if len(job.inputs) == 1 else f"{Path(path).stem}:{name}"
            ax.plot(t, series, label=label)
    window = job.annotations.get("window")
    if window:
        ax.axvspan(window[0], window[1], color="gold", alpha=0.25,
                   label="measurement window")
    ax.set_xlabel("t")
    ax.set_ylabel("probability")
    ax.set_ylim(-0.05, 1.05)
    ax.legend(loc="center right", fontsize=8)
    if job.title:
        ax.set_title(job.title)
    fig.tight_layout()
    return fig


def _render_phase_portrait(job: PlotJob):
    fig, ax = plt.subplots(figsize=(5.5, 5.5))
    for path in job.inputs:
        table = read_trajectory(path)
        x, z = table.column("x"), table.column("z")
        dx, dz = table.column("dx"), table.column("dz")
        norm = np.hypot(dx, dz)
        norm[norm == 0] = 1.0
        ax.quiver(x, z, dx / norm, dz / norm, norm, cmap="viridis",
                  width=0.004, scale=30)
    for fp in job.annotations.get("fixed_points", ()):
        color = CLASS_COLORS.get(fp.get("classification", ""), "black")
        loc = fp.get("location", ())
        if len(loc) >= 3:
            ax.plot(loc[0], loc[2], "o", color=color, markersize=9)
    ax.set_xlabel("x")
    ax.set_ylabel("z")
    ax.set_aspect("equal")
    if job.title:
        ax.set_title(job.title)
    fig.tight_layout()
    return fig


def _render_ensemble_hist(job: PlotJob):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    rows = []
    for path in job.inputs:
        rows.extend(read_run_log(path))
    labels = ("zero", "one", "indeterminate")
    counts = [sum(1 for r in rows if r.get("outcome") == lab) for lab in labels]
    ax.bar(labels, counts, color=("tab:blue", "tab:orange", "tab:gray"))
    ax.set_ylabel("runs")
    total = len(rows)
    for k, c in enumerate(counts):
        ax.text(k, c, f"{c / total:.3f}", ha="center", va="bottom", fontsize=9)
    if job.title:
        ax.set_title(job.title)
    fig.tight_layout()
    return fig
