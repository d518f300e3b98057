"""Experiment configuration files.

A config is a JSON object::

    {
      "schema_version": 1,
      "model": {"q": 2, "G": 12, "L": 2, "N": 100, "m": 1, "alpha": 0.05},
      "decoder": "typicality",          # typicality | ml | refine
      "ball_epsilon": null,             # required for refine
      "tau": null,                      # null: 5% of H(f(X_s), Y)
      "epsilon": 0.4,
      "trials": 200,
      "master_seed": 2018,
      "error_mode": "average",          # average | worst_case_exhaustive | worst_case_sampled
      "wc_samples": 32,
      "budget": 100000000,
      "grid": {"N": [25, 50, 100], "tau": [0.05, 0.1, 0.2]}
    }

``model.N`` may be omitted when the grid sweeps N. Grid axes are ``N``,
``tau``, ``epsilon`` and ``GL`` (a list of ``[G, L]`` pairs).
"""
from __future__ import annotations

import json

from ..exceptions import ConfigError
from ..model import ModelParams
from .experiments import TrialSpec

SCHEMA_VERSION = 1

_TOP_KEYS = {"schema_version", "model", "decoder", "ball_epsilon", "tau", "epsilon", "trials",
             "master_seed", "error_mode", "wc_samples", "budget", "grid"}
_MODEL_KEYS = {"q", "G", "L", "N", "m", "alpha"}


def load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return validate_config(cfg)


def validate_config(cfg: dict) -> dict:
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if cfg.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"schema_version must be {SCHEMA_VERSION}")
    unknown = set(cfg) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    model = cfg.get("model")
    if not isinstance(model, dict):
        raise ConfigError("config needs a 'model' object")
    unknown = set(model) - _MODEL_KEYS
    if unknown:
        raise ConfigError(f"unknown model keys {sorted(unknown)}")
    return cfg


def spec_from_config(cfg: dict, master_seed: int | None = None) -> tuple[TrialSpec, dict]:
    """Build the base TrialSpec and the grid. ``master_seed`` overrides the file."""
    cfg = validate_config(cfg)
    model = dict(cfg["model"])
    grid = dict(cfg.get("grid") or {})
    if "N" not in model:
        if not grid.get("N"):
            raise ConfigError("model.N is required unless the grid sweeps N")
        model["N"] = grid["N"][0]
    if "G" not in model or "L" not in model:
        if not grid.get("GL"):
            raise ConfigError("model.G and model.L are required unless the grid sweeps GL")
        model.setdefault("G", grid["GL"][0][0])
        model.setdefault("L", grid["GL"][0][1])
    seed = master_seed if master_seed is not None else cfg.get("master_seed")
    if seed is None:
        raise ConfigError("a master seed is required (config master_seed or --seed)")
    try:
        params = ModelParams(q=int(model.get("q", 2)), G=int(model["G"]), L=int(model["L"]),
                             N=int(model["N"]), m=int(model.get("m", 1)), alpha=float(model.get("alpha", 0.0)))
        spec = TrialSpec(
            params=params,
            tau=cfg.get("tau"),
            epsilon=float(cfg.get("epsilon", 0.4)),
            decoder=cfg.get("decoder", "typicality"),
            ball_epsilon=cfg.get("ball_epsilon"),
            trials=int(cfg.get("trials", 200)),
            master_seed=int(seed),
            error_mode=cfg.get("error_mode", "average"),
            wc_samples=int(cfg.get("wc_samples", 32)),
            budget=int(cfg.get("budget", 10**8)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid config: {exc}") from exc
    return spec, grid
