"""JSON schemas for space files, experiment configs and summary reports."""

from __future__ import annotations

import math
from typing import Any, List

import jsonschema

NUMBER_OR_VECTOR = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 1},
    ]
}

SPACE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "finite probability space with one random variable",
    "type": "object",
    "required": ["outcomes", "atoms", "weights", "values"],
    "properties": {
        "outcomes": {"type": "array", "items": {"type": ["string", "integer"]}, "minItems": 1},
        "atoms": {
            "type": "array",
            "items": {"type": "array", "items": {"type": ["string", "integer"]}, "minItems": 1},
            "minItems": 1,
        },
        "weights": {"type": "array", "items": {"type": "number", "minimum": 0}},
        "values": {"type": "object", "additionalProperties": NUMBER_OR_VECTOR},
    },
}

COMMANDS = ("expand", "solve", "verify", "measurability", "mle-demo", "delta-demo", "two-rv")
STOCHASTIC = ("verify", "mle-demo", "delta-demo")

_REQUIRED = {
    "expand": ["fn", "a", "x", "n"],
    "solve": ["fn", "a", "x", "n"],
    "verify": ["fn", "a", "n", "dist", "N", "seed"],
    "measurability": ["fn", "space"],
    "mle-demo": ["model", "theta0", "size", "reps", "seed"],
    "delta-demo": ["fn", "dist", "size", "reps", "seed"],
    "two-rv": ["fn", "space", "other"],
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "experiment config",
    "type": "object",
    "required": ["command"],
    "additionalProperties": False,
    "properties": {
        "command": {"enum": list(COMMANDS)},
        "fn": {"type": "string", "minLength": 1},
        "a": {"type": "number"},
        "x": {"type": "number"},
        "n": {"type": "integer", "minimum": 1},
        "policy": {"enum": ["sup", "inf"]},
        "scan_points": {"type": "integer", "minimum": 2},
        "refine_tol": {"type": "number", "exclusiveMinimum": 0},
        "residual_tol": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "N": {"type": "integer", "minimum": 1},
        "reps": {"type": "integer", "minimum": 1},
        "size": {"type": "integer", "minimum": 1},
        "dist": {"type": "string", "minLength": 1},
        "space": {"type": "string", "minLength": 1},
        "other": {"type": "string", "minLength": 1},
        "model": {"enum": ["bernoulli", "normal-mean", "exponential-rate"]},
        "theta0": {"type": "number"},
        "out_dir": {"type": "string"},
        "tag": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
    },
    "allOf": [
        {"if": {"properties": {"command": {"const": cmd}}}, "then": {"required": req}}
        for cmd, req in _REQUIRED.items()
    ],
}

SUMMARY_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "run summary",
    "type": "object",
    "required": ["command", "config", "total", "passed", "failed", "max_residual"],
    "properties": {
        "command": {"enum": list(COMMANDS)},
        "config": {"type": "object"},
        "total": {"type": "integer", "minimum": 0},
        "passed": {"type": "integer", "minimum": 0},
        "failed": {"type": "integer", "minimum": 0},
        "max_residual": {"type": ["number", "null"]},
        "ks_distance": {"type": ["number", "null"]},
        "measurable": {"type": "boolean"},
        "failures": {"type": "array", "items": {"type": "string"}},
    },
}


class SchemaError(ValueError):
    """Document does not match its schema; ``errors`` holds ``path: message`` lines."""

    def __init__(self, errors: List[str]):
        self.errors = errors
        super().__init__("; ".join(errors))


def _nonfinite(obj: Any, path: str = "$") -> List[str]:
    if isinstance(obj, float) and not math.isfinite(obj):
        return [f"{path}: must be finite"]
    if isinstance(obj, dict):
        return [e for k, v in obj.items() for e in _nonfinite(v, f"{path}.{k}")]
    if isinstance(obj, list):
        return [e for i, v in enumerate(obj) for e in _nonfinite(v, f"{path}[{i}]")]
    return []


def validate(instance: Any, schema: dict, finite: bool = True) -> None:
    """Raise :class:`SchemaError` listing every violation with its field path."""
    validator = jsonschema.Draft202012Validator(schema)
    errors = [
        f"{err.json_path}: {err.message}"
        for err in sorted(validator.iter_errors(instance), key=lambda e: e.json_path)
    ]
    if finite:
        errors += _nonfinite(instance)
    if errors:
        raise SchemaError(errors)
