"""Deterministic serialization of trajectories and reports.

Trajectory CSVs carry, per sample: the time, the re/im parts of the upper
triangle of the state (row-major), Bloch coordinates for two-level states,
the trace ``w`` for unnormalized runs, populations, purity and one column
per registered overlap reference.  Floats are written with 17 significant
digits so parsing them back reproduces the doubles exactly.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .evolution import Trajectory


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def trajectory_columns(traj: Trajectory) -> list[str]:
    n = traj.dim
    cols = ["t"]
    for i in range(n):
        for j in range(i, n):
            cols += [f"re_rho_{i}_{j}", f"im_rho_{i}_{j}"]
    if n == 2:
        cols += ["x", "y", "z"]
    if not traj.normalized:
        cols += ["w"]
    cols += [f"p{i}" for i in range(n)]
    cols += ["purity"]
    cols += [f"overlap_{name}" for name in traj.references]
    return cols


def write_trajectory_csv(traj: Trajectory, path) -> Path:
    path = Path(path)
    n = traj.dim
    pops = traj.populations()
    purity = traj.purity()
    bloch = traj.bloch() if n == 2 else None
    traces = traj.traces() if not traj.normalized else None
    overlaps = {name: traj.overlap_series(name) for name in traj.references}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(trajectory_columns(traj))
        for k, t in enumerate(traj.times):
            row = [_fmt(t)]
            state = traj.states[k]
            for i in range(n):
                for j in range(i, n):
                    row += [_fmt(state[i, j].real), _fmt(state[i, j].imag)]
            if bloch is not None:
                row += [_fmt(v) for v in bloch[k]]
            if traces is not None:
                row += [_fmt(traces[k])]
            row += [_fmt(p) for p in pops[k]]
            row += [_fmt(purity[k])]
            row += [_fmt(overlaps[name][k]) for name in traj.references]
            writer.writerow(row)
    return path


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.complexfloating):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    return obj


def write_report_json(record: dict, path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(record), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def write_runs_csv(runs, path) -> Path:
    """Per-run hidden-variable log of an ensemble."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n_partitions", "t_f", "outcome", "p0", "p1"])
        for r in runs:
            writer.writerow([r.n_partitions, _fmt(r.t_f), r.label,
                             _fmt(r.final_populations[0]), _fmt(r.final_populations[1])])
    return path
