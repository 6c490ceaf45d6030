"""Scenario configuration: JSON format, schema validation and defaults.

A configuration is a JSON object ``{"kind": ..., "parameters": {...},
"output": {...}}``.  Structural validation happens against JSON schemas
(unknown keys are rejected everywhere); physical constraints (positive
rates, ordered windows, normalized states) are checked afterwards so error
messages can name the offending key and rule.  Parsing fills defaults, so
``parse(serialize(config))`` round-trips exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import jsonschema

from .errors import ConfigError

KINDS = ("evolve", "collapse", "degeneracy", "cases", "lindblad", "ensemble", "fixed-points")

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_COMPLEX = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}
_MATRIX = {"type": "array", "items": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 8},
           "minItems": 2, "maxItems": 8}

_INITIAL = {
    "type": "object",
    "additionalProperties": False,
    "minProperties": 1,
    "maxProperties": 1,
    "properties": {
        "bloch": {"type": "array", "items": _NUM, "minItems": 3, "maxItems": 3},
        "amplitudes": {
            "type": "object", "additionalProperties": False,
            "properties": {"c1": _COMPLEX, "c2": _COMPLEX},
            "required": ["c1", "c2"],
        },
        "p0": {"type": "number", "minimum": 0, "maximum": 1},
        "diagonal": {"type": "array", "items": {"type": "number", "minimum": 0},
                     "minItems": 2, "maxItems": 8},
    },
}

_HAMILTONIAN = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "builder": {"enum": ["sigma_z", "sigma_x", "lossy_sigma_z"]},
        "gamma": {"type": "number", "minimum": 0},
        "matrix": {
            "type": "object", "additionalProperties": False,
            "properties": {"re": _MATRIX, "im": _MATRIX},
            "required": ["re"],
        },
    },
}

PARAMETER_SCHEMAS = {
    "evolve": {
        "type": "object", "additionalProperties": False,
        "required": ["hamiltonian", "t_span"],
        "properties": {
            "hamiltonian": _HAMILTONIAN,
            "initial": _INITIAL,
            "initial_list": {"type": "array", "items": _INITIAL, "minItems": 1},
            "t_span": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
            "sample_every": _POS,
            "engine": {"enum": ["normalized", "unnormalized"]},
            "rtol": _POS,
            "atol": _POS,
        },
    },
    "collapse": {
        "type": "object", "additionalProperties": False,
        "properties": {
            "basis": {"enum": ["z", "x"]},
            "variant": {"enum": ["projector", "flip_readout"]},
            "sign": {"enum": [1, -1]},
            "gamma": _POS,
            "gamma_m": {"type": "number", "exclusiveMinimum": 1},
            "t_i": _NUM, "t_f": _NUM, "t_start": _NUM, "t_end": _NUM,
            "profile": {"enum": ["tanh", "hard"]},
            "literal_window": {"type": "boolean"},
            "initial": _INITIAL,
            "sample_every": _POS,
            "rtol": _POS,
            "atol": _POS,
        },
    },
    "degeneracy": {
        "type": "object", "additionalProperties": False,
        "required": ["case"],
        "properties": {
            "case": {"enum": ["a", "b", "c"]},
            "gamma": _POS,
            "t_i": _NUM, "t_f": _NUM, "t_start": _NUM, "t_end": _NUM,
            "initial": _INITIAL,
            "sample_every": _POS,
        },
    },
    "cases": {
        "type": "object", "additionalProperties": False,
        "properties": {
            "lambda1": _NUM, "lambda2": _NUM, "gamma": _POS,
            "initial": _INITIAL,
            "t_max": _POS,
            "n_points": {"type": "integer", "minimum": 2},
        },
    },
    "lindblad": {
        "type": "object", "additionalProperties": False,
        "properties": {
            "lambda1": _NUM, "lambda2": _NUM, "gamma": _POS,
            "initial": _INITIAL,
            "t_max": _POS,
            "n_points": {"type": "integer", "minimum": 2},
        },
    },
    "ensemble": {
        "type": "object", "additionalProperties": False,
        "required": ["gamma", "n_runs", "seed"],
        "properties": {
            "initial": _INITIAL,
            "gamma": _POS,
            "t_i": _NUM,
            "window": _POS,
            "n_runs": {"type": "integer", "minimum": 1},
            "partitions": {
                "type": "object", "additionalProperties": False,
                "required": ["kind"],
                "properties": {
                    "kind": {"enum": ["fixed", "uniform-even"]},
                    "value": {"type": "integer", "minimum": 2},
                    "min": {"type": "integer", "minimum": 2},
                    "max": {"type": "integer", "minimum": 2},
                },
            },
            "tf_jitter": {"enum": ["none", "uniform-period"]},
            "seed": {"type": "integer", "minimum": 0},
            "g_mode": {"enum": ["square", "fourier"]},
            "fourier_order": {"type": "integer", "minimum": 1},
            "log_runs": {"type": "boolean"},
        },
    },
    "fixed-points": {
        "type": "object", "additionalProperties": False,
        "properties": {
            "variant": {"enum": ["normalized", "unnormalized"]},
            "gamma": {"type": "number", "minimum": 0},
            "portrait_grid": {
                "type": "object", "additionalProperties": False,
                "properties": {"plane": {"enum": ["xz"]},
                               "n": {"type": "integer", "minimum": 2, "maximum": 101}},
            },
        },
    },
}

TOP_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "nhsim scenario configuration",
    "type": "object",
    "additionalProperties": False,
    "required": ["kind", "parameters"],
    "properties": {
        "kind": {"enum": list(KINDS)},
        "parameters": {"type": "object"},
        "output": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "prefix": {"type": "string", "minLength": 1},
                "format": {"enum": ["csv", "json"]},
            },
        },
    },
}

DEFAULTS = {
    "evolve": {"sample_every": 0.02, "engine": "normalized", "rtol": 1e-10, "atol": 1e-13,
               "initial": {"bloch": [1.0, 0.0, 0.0]}},
    "collapse": {"basis": "z", "variant": "projector", "sign": 1, "gamma": 3.0,
                 "t_i": 7.0, "t_f": 8.0, "t_start": 0.0, "t_end": 13.0,
                 "profile": "tanh", "literal_window": False,
                 "initial": {"bloch": [1.0, 0.0, 0.0]}, "sample_every": 0.02,
                 "rtol": 1e-10, "atol": 1e-13},
    "degeneracy": {"gamma": 3.0, "t_i": 6.0, "t_f": 8.0, "t_start": 0.0, "t_end": 10.0,
                   "initial": {"diagonal": [0.1, 0.2, 0.3, 0.4]}, "sample_every": 0.02},
    "cases": {"lambda1": 1.0, "lambda2": -1.0, "gamma": 1.0,
              "initial": {"p0": 0.5}, "t_max": 3.0, "n_points": 61},
    "lindblad": {"lambda1": 1.0, "lambda2": -1.0, "gamma": 1.0,
                 "initial": {"p0": 0.5}, "t_max": 6.0, "n_points": 121},
    "ensemble": {"initial": {"p0": 0.7}, "t_i": 0.0, "window": 1.0,
                 "partitions": {"kind": "uniform-even", "min": 20, "max": 60},
                 "tf_jitter": "uniform-period", "g_mode": "square",
                 "fourier_order": 51, "log_runs": False},
    "fixed-points": {"variant": "normalized", "gamma": 3.0},
}


@dataclass(frozen=True)
class ScenarioConfig:
    """A validated scenario with all defaults filled."""

    kind: str
    parameters: dict
    output: dict = field(default_factory=dict)


def _schema_issues(instance, schema, prefix):
    validator = jsonschema.Draft7Validator(schema)
    issues = []
    for err in sorted(validator.iter_errors(instance), key=lambda e: list(e.absolute_path)):
        path = ".".join(str(p) for p in err.absolute_path)
        loc = f"{prefix}.{path}" if path else prefix
        issues.append(f"{loc}: {err.message}")
    return issues


def _physical_issues(kind: str, p: dict) -> list[str]:
    issues = []

    def check_window(t_i, t_f, where="parameters"):
        if not t_f > t_i:
            issues.append(f"{where}: require t_i < t_f (got t_i={t_i}, t_f={t_f})")

    def check_initial(init, where):
        if "bloch" in init:
            r = float(np.linalg.norm(init["bloch"]))
            if r > 1.0 + 1e-9:
                issues.append(f"{where}.bloch: vector norm {r:.6g} exceeds 1")
        if "amplitudes" in init:
            c1 = complex(*init["amplitudes"]["c1"])
            c2 = complex(*init["amplitudes"]["c2"])
            norm = abs(c1) ** 2 + abs(c2) ** 2
            if abs(norm - 1.0) > 1e-9:
                issues.append(f"{where}.amplitudes: |c1|^2 + |c2|^2 = {norm:.9g}, expected 1")
        if "diagonal" in init:
            s = float(sum(init["diagonal"]))
            if abs(s - 1.0) > 1e-9:
                issues.append(f"{where}.diagonal: probabilities sum to {s:.9g}, expected 1")

    if kind == "evolve":
        t0, t1 = p["t_span"]
        if not t1 > t0:
            issues.append(f"parameters.t_span: require t0 < t1 (got {p['t_span']})")
        ham = p["hamiltonian"]
        if ("builder" in ham) == ("matrix" in ham):
            issues.append("parameters.hamiltonian: exactly one of 'builder' or 'matrix' required")
        if ham.get("builder") == "lossy_sigma_z" and "gamma" not in ham:
            issues.append("parameters.hamiltonian: builder 'lossy_sigma_z' needs 'gamma'")
        if "matrix" in ham:
            re = ham["matrix"]["re"]
            im = ham["matrix"].get("im")
            n = len(re)
            if any(len(row) != n for row in re) or (im is not None and
                                                    (len(im) != n or any(len(r) != n for r in im))):
                issues.append("parameters.hamiltonian.matrix: re/im must be square and same shape")
        if "initial" in p and "initial_list" in p:
            issues.append("parameters: give either 'initial' or 'initial_list', not both")
        for k, init in enumerate(p.get("initial_list", [])):
            check_initial(init, f"parameters.initial_list.{k}")
        if "initial" in p:
            check_initial(p["initial"], "parameters.initial")
    elif kind in ("collapse", "degeneracy"):
        check_window(p["t_i"], p["t_f"])
        if not (p["t_start"] < p["t_i"] and p["t_f"] < p["t_end"]):
            issues.append("parameters: window must lie strictly inside [t_start, t_end]")
        check_initial(p["initial"], "parameters.initial")
        if kind == "collapse" and p["variant"] == "flip_readout" and "gamma_m" not in p:
            issues.append("parameters: variant 'flip_readout' needs 'gamma_m'")
    elif kind in ("cases", "lindblad"):
        check_initial(p["initial"], "parameters.initial")
        if not ({"p0", "amplitudes"} & set(p["initial"])):
            issues.append("parameters.initial: two-level amplitudes (p0 or amplitudes) required")
    elif kind == "ensemble":
        check_initial(p["initial"], "parameters.initial")
        part = p["partitions"]
        if part["kind"] == "fixed":
            if "value" not in part:
                issues.append("parameters.partitions: 'fixed' needs 'value'")
            elif part["value"] % 2:
                issues.append("parameters.partitions.value: must be even")
        else:
            if not {"min", "max"} <= set(part):
                issues.append("parameters.partitions: 'uniform-even' needs 'min' and 'max'")
            elif part["min"] % 2 or part["max"] % 2 or part["min"] > part["max"]:
                issues.append("parameters.partitions: bounds must be even with min <= max")
    return issues


def _fill_defaults(kind: str, params: dict) -> dict:
    filled = json.loads(json.dumps(DEFAULTS[kind]))
    filled.update(params)
    if kind == "evolve" and "initial_list" in params:
        filled.pop("initial", None)
    return filled


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a JSON scenario; raises ConfigError listing every issue."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"line {exc.lineno}, column {exc.colno}: {exc.msg}"]) from exc
    issues = _schema_issues(data, TOP_SCHEMA, "config")
    if issues:
        raise ConfigError(issues)
    kind = data["kind"]
    params = _fill_defaults(kind, data["parameters"])
    issues = _schema_issues(params, PARAMETER_SCHEMAS[kind], "parameters")
    if not issues:
        issues = _physical_issues(kind, params)
    if kind == "ensemble" and "seed" not in data["parameters"]:
        issues.append("parameters.seed: ensembles require an explicit seed")
    if issues:
        raise ConfigError(issues)
    output = {"prefix": kind, "format": "csv" if kind in ("evolve",) else "json"}
    output.update(data.get("output", {}))
    return ScenarioConfig(kind=kind, parameters=params, output=output)


def load_config(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def serialize_config(config: ScenarioConfig) -> str:
    """Canonical JSON text whose re-parse reproduces the config exactly."""
    return json.dumps(
        {"kind": config.kind, "parameters": config.parameters, "output": config.output},
        indent=2, sort_keys=True) + "\n"


def schema_document() -> dict:
    """The complete schema shipped with the repo (structure + per-kind parameters)."""
    return {"config": TOP_SCHEMA, "parameters_by_kind": PARAMETER_SCHEMAS,
            "defaults_by_kind": DEFAULTS}
