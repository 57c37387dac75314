"""CLI configuration: JSON file schema and merging with flag overrides."""

from __future__ import annotations

import json
from importlib import resources

import jsonschema

DEFAULTS = {
    "epsilon": 1.0,
    "A": 0.0,
    "c0": 0.0,
    "rm0_sq": 0.0,
    "t_end": 1.0,
    "tol": 1e-10,
    "grid_n": 16,
    "modes": 2,
    "amplitude": 0.05,
    "model": "ccy",
    "output_path": "g2coflow_out",
    "seed": 20240,
}


class ConfigError(ValueError):
    pass


def schema():
    with resources.files("g2coflow").joinpath("schema/config.schema.json").open() as fh:
        return json.load(fh)


def load_config(path=None, overrides=None):
    """Read a JSON config, validate against the schema, apply overrides."""
    data = dict(DEFAULTS)
    if path is not None:
        with open(path) as fh:
            raw = json.load(fh)
        try:
            jsonschema.validate(raw, schema())
        except jsonschema.ValidationError as exc:
            raise ConfigError(f"invalid config: {exc.message}") from exc
        data.update(raw)
    if overrides:
        data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        jsonschema.validate(data, schema())
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid config after overrides: {exc.message}") from exc
    return data
