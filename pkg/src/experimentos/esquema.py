"""Esquema JSON (Draft 2020-12) de la configuración de ejecución y de barrido."""

from __future__ import annotations

from typing import Any, Dict

from jsonschema import Draft202012Validator
from jsonschema.exceptions import ValidationError

from errores import ConfigError

__all__ = ["RUN_SCHEMA", "EXPERIMENT_SCHEMA", "validate"]

_NUM_OR_NULL = {"type": ["number", "null"]}
_STR_OR_NULL = {"type": ["string", "null"]}
_INT_OR_NULL = {"type": ["integer", "null"]}
_TOPOLOGIES = ["ring", "cycle2", "cycle3", "grid2d", "complete", "custom"]

_PROBLEM = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "kind": {"enum": ["lasso", "ridge"]},
        "lam": {"type": ["number", "null"], "exclusiveMinimum": 0},
        "lam_ratio": {"type": ["number", "null"], "exclusiveMinimum": 0},
        "radius": {"type": ["number", "null"], "exclusiveMinimum": 0},
        "orientation": {"enum": ["primal", "dual"]},
    },
    "required": ["kind"],
}

_DATA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "kind": {"enum": ["synthetic", "libsvm"]},
        "path": _STR_OR_NULL,
        "d": {"type": "integer", "minimum": 1},
        "n": {"type": "integer", "minimum": 1},
        "density": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "noise": {"type": "number", "minimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "support": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "n_features": _INT_OR_NULL,
    },
    "required": ["kind"],
}

_TOPOLOGY = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "kind": {"enum": _TOPOLOGIES},
        "K": {"type": "integer", "minimum": 1},
        "rows": _INT_OR_NULL,
        "wrap": {"type": "boolean"},
        "adjacency_path": _STR_OR_NULL,
        "time_varying": {"type": "boolean"},
    },
    "required": ["kind", "K"],
}

_SEEDS = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "partition": {"type": "integer", "minimum": 0},
        "solver": {"type": "integer", "minimum": 0},
        "dropout": {"type": "integer", "minimum": 0},
    },
}

_COST = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "update_us": {"type": "number", "minimum": 0},
        "gossip_ms": {"type": "number", "minimum": 0},
    },
}

_RUN_PROPERTIES: Dict[str, Any] = {
    "problem": _PROBLEM,
    "data": _DATA,
    "topology": _TOPOLOGY,
    "gamma": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
    "sigma_prime_mode": {"enum": ["safe", "data"]},
    "sigma_prime": _NUM_OR_NULL,
    "kappa": {"type": "integer", "minimum": 1},
    "sampling": {"enum": ["uniform", "permutation"]},
    "rounds": {"type": "integer", "minimum": 0},
    "dropout_p": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
    "failure_model": {"enum": ["freeze", "reset"]},
    "gossip_B": {"type": "integer", "minimum": 1},
    "seeds": _SEEDS,
    "cert_epsilon": {"type": ["number", "null"], "exclusiveMinimum": 0},
    "cert_every": {"type": "integer", "minimum": 1},
    "cert_neighbor_average": {"enum": ["mixing", "uniform"]},
    "cert_local_gap": {"enum": ["neighborhood", "scaled", "plain"]},
    "workers": {"type": "integer", "minimum": 1},
    "baseline": {"enum": ["cola", "diging"]},
    "alpha_candidates": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
    "diging_budget": {"type": "integer", "minimum": 1},
    "reference_budget": {"type": "integer", "minimum": 0},
    "reference_gap": {"type": "number", "exclusiveMinimum": 0},
    "cost_model": _COST,
    "output": _STR_OR_NULL,
    "certs_output": _STR_OR_NULL,
    "log_every": {"type": "integer", "minimum": 0},
}

RUN_SCHEMA: Dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": _RUN_PROPERTIES,
    "required": ["problem", "data", "topology"],
}

EXPERIMENT_SCHEMA: Dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        **_RUN_PROPERTIES,
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kappa": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                "topology": {"type": "array", "items": {"enum": _TOPOLOGIES}},
                "dropout": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0, "maximum": 1}},
            },
        },
        "output_dir": _STR_OR_NULL,
    },
    "required": ["problem", "data", "topology"],
}

Draft202012Validator.check_schema(RUN_SCHEMA)
Draft202012Validator.check_schema(EXPERIMENT_SCHEMA)


def validate(data: Any, schema: Dict[str, Any] = EXPERIMENT_SCHEMA) -> None:
    """Lanza ConfigError con la ruta del primer campo inválido."""
    validator = Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err: ValidationError = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<raíz>"
        raise ConfigError(f"config inválida en {where}: {err.message}")
