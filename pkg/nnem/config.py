"""
Run configuration: package defaults (config.yaml next to this file) merged with the
run's YAML file, flattened to dotted keys and checked against SCHEMA before any
computation starts.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

import yaml

from .errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULTS_PATH = Path(__file__).with_name("config.yaml")


@dataclass(frozen=True)
class Key:
    kind: type
    choices: tuple[Any, ...] | None = None
    minimum: float | None = None
    maximum: float | None = None
    nullable: bool = False
    min_items: int | None = None
    strict_min: bool = False


SCHEMA: dict[str, Key] = {
    "mesh.kind": Key(str, choices=("unit_square", "l_shape", "file")),
    "mesh.n": Key(int, minimum=1),
    "mesh.path": Key(str, nullable=True),
    "envelope.kind": Key(str, choices=("lagrange", "hierarchical")),
    "envelope.order": Key(int, choices=(1, 2, 3)),
    "envelope.bubbles": Key(bool),
    "net.hidden_layers": Key(int, minimum=1),
    "net.width": Key(int, minimum=1),
    "net.activation": Key(str, choices=("sine", "tanh", "identity")),
    "space.augment_constant": Key(bool),
    "train.steps": Key(int, minimum=0),
    "train.lr": Key(float, minimum=0.0, strict_min=True),
    "train.beta1": Key(float, minimum=0.0, maximum=0.999999),
    "train.beta2": Key(float, minimum=0.0, maximum=0.999999),
    "train.eps": Key(float, minimum=0.0, strict_min=True),
    "train.seed": Key(int, minimum=0),
    "train.tau": Key(float, minimum=0.0, maximum=1.0, strict_min=True),
    "train.log_every": Key(int, minimum=1),
    "quad.triangle_points": Key(int, minimum=1),
    "quad.edge_points": Key(int, minimum=1, maximum=64),
    "problem.name": Key(str),
    "boundary.lift": Key(str, choices=("constant", "full")),
    "study.sizes": Key(list, min_items=1),
    "study.methods": Key(list, min_items=1),
    "output.dir": Key(str),
    "threads": Key(int, minimum=0),
    "deterministic": Key(bool),
}


def flatten(tree: Mapping[str, Any], prefix: str = "") -> dict[str, Any]:
    """{"train": {"lr": 1}} -> {"train.lr": 1}; lists and scalars are leaves."""
    out: dict[str, Any] = {}
    for key, value in tree.items():
        name = f"{prefix}{key}"
        if isinstance(value, Mapping):
            out.update(flatten(value, f"{name}."))
        else:
            out[name] = value
    return out


def _coerce(name: str, key: Key, value: Any) -> Any:
    if value is None:
        if key.nullable:
            return None
        raise ConfigError("must not be null", key=name)
    if key.kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"expected true/false, got {value!r}", key=name)
        return value
    if key.kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"expected an integer, got {value!r}", key=name)
        return value
    if key.kind is float:
        if isinstance(value, bool):
            raise ConfigError(f"expected a number, got {value!r}", key=name)
        try:
            # PyYAML reads exponent literals without a dot (3e-4) as strings
            return float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"expected a number, got {value!r}", key=name) from None
    if key.kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"expected a string, got {value!r}", key=name)
        return value
    if key.kind is list:
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"expected a list, got {value!r}", key=name)
        return list(value)
    raise ConfigError(f"unsupported schema type {key.kind}", key=name)


def _check_range(name: str, key: Key, value: Any) -> None:
    if value is None:
        return
    if key.choices is not None and value not in key.choices:
        raise ConfigError(f"must be one of {list(key.choices)}, got {value!r}", key=name)
    if key.minimum is not None:
        if value < key.minimum or (key.strict_min and value == key.minimum):
            op = ">" if key.strict_min else ">="
            raise ConfigError(f"must be {op} {key.minimum}, got {value!r}", key=name)
    if key.maximum is not None and value > key.maximum:
        raise ConfigError(f"must be <= {key.maximum}, got {value!r}", key=name)
    if key.min_items is not None and len(value) < key.min_items:
        raise ConfigError(f"needs at least {key.min_items} item(s)", key=name)


def validate_config(config: Mapping[str, Any]) -> dict[str, Any]:
    """Type- and range-check a flat config; returns the coerced copy."""
    out: dict[str, Any] = {}
    for name, value in config.items():
        key = SCHEMA.get(name)
        if key is None:
            raise ConfigError("unknown configuration key", key=name)
        value = _coerce(name, key, value)
        _check_range(name, key, value)
        out[name] = value
    missing = sorted(set(SCHEMA) - set(out))
    if missing:
        raise ConfigError("missing configuration key", key=missing[0])

    for n in out["study.sizes"]:
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise ConfigError(f"mesh sizes must be positive integers, got {n!r}", key="study.sizes")
    for m in out["study.methods"]:
        if m not in ("fem", "nnem"):
            raise ConfigError(f"unknown method {m!r}", key="study.methods")
    if out["mesh.kind"] == "file" and not out["mesh.path"]:
        raise ConfigError("mesh.kind = file needs a mesh path", key="mesh.path")
    return out


def load_defaults() -> dict[str, Any]:
    with DEFAULTS_PATH.open(encoding="utf-8") as fh:
        return flatten(yaml.safe_load(fh) or {})


def load_config(
    path: str | Path | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> dict[str, Any]:
    """Defaults, then the YAML file at path, then overrides (dotted keys); validated."""
    config = load_defaults()
    if path is not None:
        try:
            with Path(path).open(encoding="utf-8") as fh:
                data = yaml.safe_load(fh) or {}
        except OSError as e:
            raise ConfigError(f"cannot read config file {path}: {e}") from e
        except yaml.YAMLError as e:
            raise ConfigError(f"invalid YAML in {path}: {e}") from e
        if not isinstance(data, Mapping):
            raise ConfigError(f"{path}: top level must be a mapping")
        user = flatten(data)
        for name in user:
            if name not in SCHEMA:
                raise ConfigError("unknown configuration key", key=name)
        config.update(user)
    if overrides:
        config.update({k: v for k, v in overrides.items() if v is not None})
    validated = validate_config(config)
    logger.debug("Configuration: %s", validated)
    return validated
