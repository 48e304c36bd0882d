"""Run configuration: a JSON document of nested blocks, overridable by flags.

Example::

    {
      "seed": 0,
      "output_dir": "out",
      "data": {"path": "d.csv", "label": "y", "standardize": true},
      "model": {"loss": "squared", "intercept": false, "penalty": "l2", "lambda": 0.5},
      "cost": {"form": "binary", "gamma_fp": 5, "gamma_fn": 10, "currency": "USD"},
      "scenario": {"n0": 70, "n1": 30, "alpha": 0.05, "beta": 0.2, "theta": 0.4,
                   "unit_fp_cost": 5, "price": 50},
      "tuning": {"method": "grid", "lambdas": [0.01, 0.1, 1], "folds": 5},
      "contour": {"beta_range": [0.01, 0.99], "price_range": [1, 100], "resolution": 100},
      "regime": {"gamma_low": 0.001, "gamma_high": 1000000},
      "lagrange": {"c": 0.25, "delta_c": 0.0001},
      "solver": {"max_iterations": 20000, "tolerance": 1e-13, "restarts": 4}
    }
"""

from __future__ import annotations

import copy
import json
from pathlib import Path

from .errors import ConfigError

BLOCKS = ("data", "model", "cost", "scenario", "tuning", "contour", "regime",
          "lagrange", "solver")
TOP_LEVEL = ("seed", "output_dir")


def load_config(path):
    if path is None:
        return empty_config()
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    return normalize(raw)


def empty_config():
    cfg = {b: {} for b in BLOCKS}
    cfg.update(seed=0, output_dir="out")
    return cfg


def normalize(raw):
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - set(BLOCKS) - set(TOP_LEVEL)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    cfg = empty_config()
    for key, value in raw.items():
        if key in BLOCKS:
            if not isinstance(value, dict):
                raise ConfigError(f"config block {key!r} must be an object")
            cfg[key] = copy.deepcopy(value)
        else:
            cfg[key] = value
    return cfg


def override(cfg, block, **values):
    """Set non-None ``values`` into ``cfg[block]`` (or top level if block is None)."""
    target = cfg if block is None else cfg.setdefault(block, {})
    for key, value in values.items():
        if value is not None:
            target[key] = value
    return cfg
