"""Experiment configuration: presets, JSON loading and validation."""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from .gas import DomainError, GasModel, State
from .riemann import WaveFan, build_fan


class ConfigError(ValueError):
    """Invalid experiment configuration."""


_MODERATE = [
    {"kind": "gaussian", "field": "v", "amplitude": 0.05, "center": -10.0, "width": 4.0},
    {"kind": "gaussian", "field": "h", "amplitude": 0.05, "center": 10.0, "width": 4.0},
]

_BASE: Dict[str, Any] = {
    "gas": {"gamma": 2.0, "alpha": 1.0, "b": None},
    "fan": {"v_minus": 1.0, "u_minus": 0.0, "eps1": 0.1, "eps2": 0.1},
    "lambda": 0.25,
    "delta1": 0.05,
    "delta0": 0.1,
    "grid": {"x_min": -250.0, "x_max": 250.0, "n": 4000},
    "T": 2.0,
    "dt": None,
    "c_cfl": 0.4,
    "c_diff": 0.25,
    "perturbation": _MODERATE,
    "cadence": 10,
    "seed": 0,
    "profile": {"eps_sweep": [0.05, 0.1, 0.2], "dxi_factor": 0.01, "residual_tol": 1e-6},
    "limit": {
        "nu_list": [0.1, 0.05, 0.025],
        "T": 1.0,
        "dx_unit": 0.25,
        "half_width_unit": 250.0,
        "core_half_width": 3.0,
        "perturbation": [
            {"kind": "gaussian", "field": "v", "amplitude": 0.05, "center": 0.0, "width": 0.25},
            {"kind": "gaussian", "field": "h", "amplitude": 0.03, "center": 0.3, "width": 0.25},
        ],
    },
    "poincare": {"deltas": [0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5], "C1": [1.0, 2.5, 5.0, 10.0],
                 "n_samples": 1000, "degree": 8, "n_polish": 10},
}


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


PRESETS: Dict[str, dict] = {
    "shallow-water-0.1": {},
    "shallow-water-unperturbed": {"perturbation": []},
    "shallow-water-large": {
        "perturbation": [
            {"kind": "gaussian", "field": "v", "amplitude": -0.4, "center": 0.0, "width": 6.0},
            {"kind": "gaussian", "field": "h", "amplitude": -0.2, "center": -15.0, "width": 6.0},
        ],
    },
    "gamma-1.4": {"gas": {"gamma": 1.4, "alpha": 1.0}},
}


def preset(name: str) -> dict:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return _merge(_BASE, PRESETS[name])


@dataclass
class ExperimentConfig:
    raw: Dict[str, Any]
    gas: GasModel
    fan: WaveFan
    lam: float
    delta1: float
    delta0: float
    x_min: float
    x_max: float
    n: int
    T: float
    dt: Optional[float]
    c_cfl: float
    c_diff: float
    perturbation: List[dict]
    cadence: int
    seed: int
    profile: Dict[str, Any] = field(default_factory=dict)
    limit: Dict[str, Any] = field(default_factory=dict)
    poincare: Dict[str, Any] = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.raw.get("preset", "custom")


def _num(d: dict, key: str, lo=None, hi=None, strict_lo=False, allow_none=False):
    if key not in d:
        raise ConfigError(f"missing field {key!r}")
    v = d[key]
    if v is None and allow_none:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key!r} must be a number, got {v!r}")
    v = float(v)
    if v != v or v in (float("inf"), float("-inf")):
        raise ConfigError(f"{key!r} must be finite")
    if lo is not None and (v < lo or (strict_lo and v == lo)):
        raise ConfigError(f"{key!r}={v} out of range")
    if hi is not None and v > hi:
        raise ConfigError(f"{key!r}={v} out of range")
    return v


def validate(raw: dict) -> ExperimentConfig:
    """Check every field and build the derived objects; raises :class:`ConfigError`."""
    try:
        g = raw["gas"]
        gas = GasModel(_num(g, "gamma"), _num(g, "alpha"), b=g.get("b"))
        f = raw["fan"]
        eps1 = _num(f, "eps1", 0.0)
        eps2 = _num(f, "eps2", 0.0)
        fan = build_fan(State(_num(f, "v_minus", 0.0, strict_lo=True), _num(f, "u_minus")), eps1, eps2, gas)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed gas/fan section: {exc}") from exc
    lam = _num(raw, "lambda", 0.0, 1.0, strict_lo=True)
    if lam >= 1.0:
        raise ConfigError("lambda must be < 1")
    for e in (eps1, eps2):
        if e / lam > 1.0:
            raise ConfigError(f"eps/lambda = {e / lam:.3g} > 1")
    delta1 = _num(raw, "delta1", 0.0, strict_lo=True)
    delta0 = _num(raw, "delta0", 0.0, 1.0, strict_lo=True)
    grid = raw.get("grid", {})
    x_min, x_max = _num(grid, "x_min"), _num(grid, "x_max")
    n = int(_num(grid, "n", 2))
    if x_max <= x_min:
        raise ConfigError("grid x_max must exceed x_min")
    T = _num(raw, "T", 0.0)
    dt = _num(raw, "dt", 0.0, strict_lo=True, allow_none=True)
    c_cfl = _num(raw, "c_cfl", 0.0, 1.0, strict_lo=True)
    c_diff = _num(raw, "c_diff", 0.0, 0.5, strict_lo=True)
    cadence = int(_num(raw, "cadence", 1))
    seed = int(_num(raw, "seed", 0))
    pert = raw.get("perturbation", [])
    if not isinstance(pert, list):
        raise ConfigError("perturbation must be a list")
    for item in pert:
        if not isinstance(item, dict) or item.get("kind", "gaussian") not in ("gaussian", "sine") \
                or item.get("field", "v") not in ("v", "h"):
            raise ConfigError(f"bad perturbation entry {item!r}")
        _num(item, "amplitude")
        _num(item, "width", 0.0, strict_lo=True)
    # layers plus tail margin must fit into the domain
    eps_min = min(e for e in (eps1, eps2, 1.0) if e > 0)
    margin = 20.0 * gas.diffusivity / eps_min
    reach = max(abs(fan.sigma1), abs(fan.sigma2)) * T
    if x_min > -(reach + margin) or x_max < reach + margin:
        raise ConfigError(f"domain too small: need |x| >= {reach + margin:.4g} on both sides")
    lim = raw.get("limit", {})
    nus = lim.get("nu_list", [])
    if any((not isinstance(v, (int, float))) or v <= 0 for v in nus):
        raise ConfigError("nu_list entries must be positive numbers")
    if list(nus) != sorted(nus, reverse=True) or len(set(nus)) != len(nus):
        raise ConfigError("nu_list must be strictly decreasing")
    pc = raw.get("poincare", {})
    if any(not (0 < d < 1) for d in pc.get("deltas", [])):
        raise ConfigError("poincare deltas must lie in (0, 1)")
    if any(c <= 0 for c in pc.get("C1", [])):
        raise ConfigError("poincare C1 values must be positive")
    return ExperimentConfig(raw, gas, fan, lam, delta1, delta0, x_min, x_max, n, T, dt, c_cfl,
                            c_diff, pert, cadence, seed, raw.get("profile", {}), lim, pc)


def load_config(path: Optional[str] = None, overrides: Optional[dict] = None) -> ExperimentConfig:
    """Read a JSON config (optionally naming a ``preset`` to start from) and validate it."""
    doc: Dict[str, Any] = {}
    if path is not None:
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
    if overrides:
        doc = _merge(doc, overrides)
    name = doc.get("preset", "shallow-water-0.1")
    raw = _merge(preset(name), {k: v for k, v in doc.items()})
    raw["preset"] = name
    return validate(raw)
