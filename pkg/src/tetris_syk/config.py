"""Versioned YAML experiment configuration with strict validation."""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import yaml

SCHEMA_VERSION = 1

KINDS = (
    "loschmidt_scan",
    "variance_study",
    "angle_sweep",
    "lgae_hardware_protocol",
    "noise_model_overlay",
    "trotter_crossover",
    "mirror_sweep",
    "resources",
)


class ConfigError(ValueError):
    """Invalid configuration; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


_COMMON = {
    "schema_version": SCHEMA_VERSION,
    "experiment": None,
    "syk": {"n_majorana": 8, "coupling": 1.0, "sparsity": 2.3, "dense": False, "seed": 0},
    "times": [0.2, 0.5, 0.8],
    "angle": {"policy": "optimal", "factor": 1.5, "alpha": 1.0},
    "noise": {"mode": "none", "p_dep": 0.0, "q": 0.0},
    "circuits": 10000,
    "shots_per_circuit": 1,
    "ensemble_size": 1,
    "seeds": {"circuits": 0},
    "output": None,
    "options": {},
}

# kind-specific defaults; "options" holds keys that only make sense for one kind
_KIND_DEFAULTS: dict[str, dict[str, Any]] = {
    "loschmidt_scan": {},
    "variance_study": {
        "syk": {"n_majorana": 24},
        "ensemble_size": 20,
        "times": [0.5],
        "circuits": 1000,
        "options": {"shots_list": [1, 10], "angle_scales": [1.0, 0.5, 0.25]},
    },
    "angle_sweep": {
        "times": [0.5],
        "circuits": 2000,
        "angle": {"policy": "shallow", "factor": 1.5, "alpha": 1.0},
        "options": {"factors": [0.5, 1.0, 1.5, 2.0]},
    },
    "lgae_hardware_protocol": {
        "syk": {"n_majorana": 12},
        "times": [0.2, 0.35, 0.5, 0.65, 0.8],
        "noise": {"mode": "per_gate", "p_dep": 1e-3},
        "circuits": 2000,
        "shots_per_circuit": 6,
        "ensemble_size": 20,
        "options": {"alpha": 1 / 3, "shallow_factor": 1.5},
    },
    "noise_model_overlay": {
        "times": [0.2, 0.35, 0.5, 0.65, 0.8],
        "noise": {"mode": "global"},
        "circuits": 4000,
        "ensemble_size": 10,
        "options": {"beta": 2.46, "alpha": 1 / 3, "shallow_factor": 1.5, "grid_steps": 200},
    },
    "trotter_crossover": {
        "times": [round(0.1 * i, 10) for i in range(1, 21)],
        "ensemble_size": 10,
        "options": {"controlled": False},
    },
    "mirror_sweep": {
        "syk": {"n_majorana": 16},
        "times": [0.8],
        "noise": {"mode": "per_gate"},
        "circuits": 500,
        "shots_per_circuit": 0,
        "ensemble_size": 20,
        "options": {"p_dep_list": [0.0, 5e-4, 1e-3, 2e-3]},
    },
    "resources": {
        "times": [],
        "options": {"sizes": [50, 100], "sparsity": 2.3, "depth_time": 0.030},
    },
}

_OPTION_TYPES = {
    "shots_list": list,
    "angle_scales": list,
    "factors": list,
    "alpha": float,
    "shallow_factor": float,
    "beta": float,
    "grid_steps": int,
    "controlled": bool,
    "p_dep_list": list,
    "sizes": list,
    "sparsity": float,
    "depth_time": float,
}


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def defaults(kind: str) -> dict:
    if kind not in KINDS:
        raise ConfigError("experiment", f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    cfg = _merge(_COMMON, _KIND_DEFAULTS[kind])
    cfg["experiment"] = kind
    return cfg


def _check_keys(given: dict, allowed: dict, path: str):
    for k in given:
        if k not in allowed:
            where = f"{path}.{k}" if path else k
            raise ConfigError(where, "unknown key")


def _num(v, path: str, lo=None, integer=False, positive=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(path, f"expected a number, got {v!r}")
    if integer and int(v) != v:
        raise ConfigError(path, f"expected an integer, got {v!r}")
    if lo is not None and v < lo:
        raise ConfigError(path, f"must be >= {lo}, got {v!r}")
    if positive and v <= 0:
        raise ConfigError(path, f"must be positive, got {v!r}")
    return int(v) if integer else float(v)


def validate(raw: dict, kind: str | None = None) -> dict:
    """Merge ``raw`` over the kind's defaults and check every field."""
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "config must be a mapping")
    if "schema_version" in raw and raw["schema_version"] != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"unsupported version {raw['schema_version']!r}; expected {SCHEMA_VERSION}")
    given = raw.get("experiment")
    if kind is not None and given is not None and given != kind:
        raise ConfigError("experiment", f"config is for {given!r} but the command is {kind!r}")
    kind = kind or given
    if kind is None:
        raise ConfigError("experiment", "missing experiment kind")
    base = defaults(kind)
    _check_keys(raw, base, "")
    for sect in ("syk", "angle", "noise", "seeds"):
        if sect in raw:
            if not isinstance(raw[sect], dict):
                raise ConfigError(sect, "expected a mapping")
            _check_keys(raw[sect], base[sect], sect)
    if "options" in raw:
        if not isinstance(raw["options"], dict):
            raise ConfigError("options", "expected a mapping")
        _check_keys(raw["options"], base["options"], "options")
    cfg = _merge(base, raw)
    cfg["experiment"] = kind

    s = cfg["syk"]
    s["n_majorana"] = _num(s["n_majorana"], "syk.n_majorana", lo=4, integer=True)
    if s["n_majorana"] % 2:
        raise ConfigError("syk.n_majorana", "must be even")
    s["coupling"] = _num(s["coupling"], "syk.coupling", positive=True)
    s["sparsity"] = _num(s["sparsity"], "syk.sparsity", positive=True)
    s["seed"] = _num(s["seed"], "syk.seed", lo=0, integer=True)
    if not isinstance(s["dense"], bool):
        raise ConfigError("syk.dense", "expected true or false")

    if not isinstance(cfg["times"], list):
        raise ConfigError("times", "expected a list")
    cfg["times"] = [_num(t, f"times[{i}]", positive=True) for i, t in enumerate(cfg["times"])]
    if kind != "resources" and not cfg["times"]:
        raise ConfigError("times", "time grid is empty")

    a = cfg["angle"]
    if a["policy"] not in ("optimal", "shallow", "scaled"):
        raise ConfigError("angle.policy", f"expected optimal, shallow or scaled, got {a['policy']!r}")
    a["factor"] = _num(a["factor"], "angle.factor", positive=True)
    a["alpha"] = _num(a["alpha"], "angle.alpha", positive=True)

    n = cfg["noise"]
    if n["mode"] not in ("none", "per_gate", "global"):
        raise ConfigError("noise.mode", f"expected none, per_gate or global, got {n['mode']!r}")
    n["p_dep"] = _num(n["p_dep"], "noise.p_dep", lo=0)
    if n["p_dep"] > 1:
        raise ConfigError("noise.p_dep", "must be a probability")
    n["q"] = _num(n["q"], "noise.q", lo=0)

    cfg["circuits"] = _num(cfg["circuits"], "circuits", lo=1, integer=True)
    cfg["shots_per_circuit"] = _num(cfg["shots_per_circuit"], "shots_per_circuit", lo=0, integer=True)
    cfg["ensemble_size"] = _num(cfg["ensemble_size"], "ensemble_size", lo=1, integer=True)
    cfg["seeds"]["circuits"] = _num(cfg["seeds"]["circuits"], "seeds.circuits", lo=0, integer=True)
    if cfg["output"] is not None and not isinstance(cfg["output"], str):
        raise ConfigError("output", "expected a path string")

    for k, v in cfg["options"].items():
        typ = _OPTION_TYPES[k]
        path = f"options.{k}"
        if typ is list:
            if not isinstance(v, list) or not v:
                raise ConfigError(path, "expected a non-empty list")
            cfg["options"][k] = [_num(x, f"{path}[{i}]", lo=0) for i, x in enumerate(v)]
        elif typ is bool:
            if not isinstance(v, bool):
                raise ConfigError(path, "expected true or false")
        elif typ is int:
            cfg["options"][k] = _num(v, path, positive=True, integer=True)
        else:
            cfg["options"][k] = _num(v, path, positive=True)
    opts = cfg["options"]
    if "alpha" in opts and not 0 < opts["alpha"] < 1:
        raise ConfigError("options.alpha", "must lie in (0, 1)")
    for key in ("shots_list", "sizes"):
        if key in opts:
            opts[key] = [int(x) for x in opts[key]]
    return cfg


def load(path: str | Path, kind: str | None = None) -> dict:
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"not valid YAML: {exc}") from exc
    return validate(raw or {}, kind)


def config_hash(cfg: dict) -> str:
    """Digest of the validated config, ignoring the output location."""
    body = {k: v for k, v in cfg.items() if k != "output"}
    return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class Seeds:
    disorder: int
    circuits: int

    @classmethod
    def of(cls, cfg: dict) -> Seeds:
        return cls(cfg["syk"]["seed"], cfg["seeds"]["circuits"])
