"""Plot job description and loading."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

STYLES = ("bloch3d", "prob-curves", "phase-portrait", "ensemble-hist")

# Stability-class colors follow the simulator's reports: attracting points
# are drawn red, repelling ones green.
CLASS_COLORS = {
    "sink": "crimson",
    "source": "forestgreen",
    "line-of-fixed-points": "crimson",
    "center": "slategray",
    "non-hyperbolic": "slategray",
}


class JobError(ValueError):
    """Malformed job description."""


@dataclass(frozen=True)
class PlotJob:
    style: str
    inputs: tuple
    output: Path
    columns: tuple = ()
    annotations: dict = field(default_factory=dict)
    title: str = ""

    def __post_init__(self):
        if self.style not in STYLES:
            raise JobError(f"unknown style {self.style!r} (expected one of {STYLES})")
        if not self.inputs:
            raise JobError("job needs at least one input file")


def load_job(path) -> PlotJob:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise JobError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    unknown = set(data) - {"style", "input", "output", "columns", "annotations", "title"}
    if unknown:
        raise JobError(f"{path}: unknown keys {sorted(unknown)}")
    for key in ("style", "input", "output"):
        if key not in data:
            raise JobError(f"{path}: missing required key {key!r}")
    inputs = data["input"] if isinstance(data["input"], list) else [data["input"]]
    base = path.parent
    return PlotJob(
        style=data["style"],
        inputs=tuple((base / p).resolve() if not Path(p).is_absolute() else Path(p)
                     for p in inputs),
        output=(base / data["output"]).resolve() if not Path(data["output"]).is_absolute()
               else Path(data["output"]),
        columns=tuple(data.get("columns", ())),
        annotations=dict(data.get("annotations", {})),
        title=data.get("title", ""),
    )
