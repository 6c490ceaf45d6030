"""Readers for the simulator's serialized outputs.

The plotting layer never imports the simulator; it consumes the documented
CSV/JSON formats only.  Trajectory CSVs carry a header row naming columns
(t, re/im state entries, x/y/z for two-level runs, populations p0..pN-1,
purity, overlap_*); ensemble run logs carry (n_partitions, t_f, outcome,
p0, p1).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class InputError(ValueError):
    """Input file missing, empty, or lacking a required column."""


@dataclass(frozen=True)
class TrajectoryTable:
    path: Path
    columns: tuple
    data: np.ndarray  # shape (n_samples, n_columns)

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise InputError(f"{self.path}: no column {name!r} "
                             f"(available: {', '.join(self.columns)})")
        return self.data[:, self.columns.index(name)]

    def has(self, name: str) -> bool:
        return name in self.columns

    def names_matching(self, *prefixes: str) -> list[str]:
        return [c for c in self.columns if any(c.startswith(p) for p in prefixes)]


def read_trajectory(path) -> TrajectoryTable:
    path = Path(path)
    if not path.exists():
        raise InputError(f"input file {path} does not exist")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InputError(f"{path}: empty file")
    header, body = rows[0], rows[1:]
    if not body:
        raise InputError(f"{path}: trajectory has a header but no samples")
    data = np.array([[float(v) for v in row] for row in body])
    return TrajectoryTable(path=path, columns=tuple(header), data=data)


def read_run_log(path) -> list[dict]:
    path = Path(path)
    if not path.exists():
        raise InputError(f"input file {path} does not exist")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
    if not rows:
        raise InputError(f"{path}: empty run log")
    return rows
