"""JSON run configuration: schema, loading, bundled examples."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from .control import MODES, SWITCHING, GainSet
from .actuation import ACTUATION_MODES
from .model import N_STATE, STATE_NAMES, DerivedConstants, QuadParams, state_from_dict
from .sim import SimConfig
from .trajectory import CHANNELS, KINDS, TrajectorySpec
from .tune import GAIN_FIELDS, TuneProblem

BUNDLED = ("hover", "fig3_attitude", "fig7_position", "motor_mode", "tune_fig3")


class ConfigError(ValueError):
    pass


_num = {"type": "number"}
_gain = {"oneOf": [_num, {"type": "array", "items": _num, "minItems": 6, "maxItems": 6}]}
_channel = {
    "type": "object",
    "additionalProperties": False,
    "required": ["type"],
    "properties": {
        "type": {"enum": list(KINDS)},
        "params": {
            "type": "object",
            "additionalProperties": False,
            "properties": {k: _num for k in ("amplitude", "frequency", "phase", "slope", "offset", "value")},
        },
    },
}

SCHEMA: dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "params": {
            "type": "object",
            "additionalProperties": False,
            "properties": {f.name: _num for f in fields(QuadParams)},
        },
        "gains": {
            "type": "object",
            "additionalProperties": False,
            "properties": {k: _gain for k in GAIN_FIELDS},
        },
        "trajectory": {
            "type": "object",
            "additionalProperties": False,
            "properties": {c: _channel for c in CHANNELS},
        },
        "sim": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "dt": {"type": "number", "exclusiveMinimum": 0},
                "t_end": {"type": "number", "exclusiveMinimum": 0},
                "stride": {"type": "integer", "minimum": 1},
                "initial_state": {
                    "oneOf": [
                        {"type": "array", "items": _num, "minItems": N_STATE, "maxItems": N_STATE},
                        {
                            "type": "object",
                            "additionalProperties": False,
                            "properties": {n: _num for n in STATE_NAMES},
                        },
                    ]
                },
            },
        },
        "actuation": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"mode": {"enum": list(ACTUATION_MODES)}},
        },
        "controller": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "mode": {"enum": list(MODES)},
                "switching": {"enum": list(SWITCHING)},
                "epsilon": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"dir": {"type": "string"}},
        },
        "tune": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "budget": {"type": "integer"},
                "seed": {"type": "integer", "minimum": 0},
                "free": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                "bounds": {
                    "type": "object",
                    "additionalProperties": {
                        "type": "array", "items": _num, "minItems": 2, "maxItems": 2,
                    },
                },
                "spread": {"type": "number", "exclusiveMinimum": 0},
                "selftest": {"type": "boolean"},
            },
        },
        "check": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "samples": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0},
                "constants_override": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {f.name: _num for f in fields(DerivedConstants)},
                },
            },
        },
    },
}


@dataclass
class TuneSettings:
    budget: int = 200
    seed: int = 0
    free: tuple = GAIN_FIELDS
    bounds: dict = field(default_factory=dict)
    spread: float = 0.1
    selftest: bool = False


@dataclass
class RunConfig:
    params: QuadParams
    gains: GainSet
    trajectory: TrajectorySpec
    sim: SimConfig
    name: str = ""
    output_dir: str | None = None
    tune: TuneSettings | None = None
    check_samples: int = 1000
    check_seed: int = 0
    constants_override: dict = field(default_factory=dict)

    def tune_problem(self) -> TuneProblem:
        t = self.tune or TuneSettings()
        bounds = tuple(tuple(t.bounds.get(name, (0.0, 1000.0))) for name in t.free)
        return TuneProblem(self.sim, self.params, self.trajectory, self.gains, t.free, bounds)


def parse(doc: Any) -> RunConfig:
    """Validate a decoded JSON document and build a RunConfig."""
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{path}: {exc.message}") from None
    try:
        params = QuadParams.from_dict(doc.get("params", {}))
        gains = GainSet.from_dict(doc.get("gains", {}))
        traj = TrajectorySpec.from_dict(doc.get("trajectory", {}))
        sim = doc.get("sim", {})
        ctrl = doc.get("controller", {})
        s0 = sim.get("initial_state", {})
        s0 = state_from_dict(s0) if isinstance(s0, dict) else s0
        sim_cfg = SimConfig(
            dt=sim.get("dt", 1e-3),
            t_end=sim.get("t_end", 10.0),
            initial_state=tuple(s0),
            actuation=doc.get("actuation", {}).get("mode", "ideal"),
            mode=ctrl.get("mode", "attitude"),
            switching=ctrl.get("switching", "sign"),
            epsilon=ctrl.get("epsilon", 0.05),
            stride=sim.get("stride", 1),
        )
        tune = None
        if "tune" in doc:
            t = doc["tune"]
            tune = TuneSettings(
                budget=t.get("budget", 200),
                seed=t.get("seed", 0),
                free=tuple(t.get("free", GAIN_FIELDS)),
                bounds={k: tuple(v) for k, v in t.get("bounds", {}).items()},
                spread=t.get("spread", 0.1),
                selftest=t.get("selftest", False),
            )
        check = doc.get("check", {})
        cfg = RunConfig(
            params=params,
            gains=gains,
            trajectory=traj,
            sim=sim_cfg,
            name=doc.get("name", ""),
            output_dir=doc.get("output", {}).get("dir"),
            tune=tune,
            check_samples=check.get("samples", 1000),
            check_seed=check.get("seed", 0),
            constants_override=dict(check.get("constants_override", {})),
        )
        if tune is not None:
            cfg.tune_problem()
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def bundled_path(name: str) -> Path:
    stem = name[:-5] if name.endswith(".json") else name
    if stem not in BUNDLED:
        raise FileNotFoundError(name)
    return Path(str(resources.files("quadsmc") / "configs" / f"{stem}.json"))


def resolve(path: str | Path) -> Path:
    """A filesystem path, or the name of a bundled config."""
    p = Path(path)
    if p.exists():
        return p
    try:
        return bundled_path(str(path))
    except FileNotFoundError:
        raise FileNotFoundError(f"config not found: {path}") from None


def load(path: str | Path) -> RunConfig:
    p = resolve(path)
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {p}: {exc}") from None
    return parse(doc)
