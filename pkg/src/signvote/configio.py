"""JSON config documents and run manifests.

The config grammar mirrors the run/fleet dataclass fields in
lower_snake_case. Parsing is fail-closed: any unknown key is rejected
with the offending key named. Defaults (applied when a key is absent):

    objective:    {"kind": "quadratic", "dim": 1000}
    fleet:        {"q": 27, "byzantine_count": 0, "attack": "none",
                   "batch": {"mode": "constant", "size": 1},
                   "noise": {"family": "gaussian", "sigma": 1.0}}
    iterations:   500
    initial_lr:   1.0
    lr_schedule:  "inv_sqrt"
    weight_decay: 0.0
    master_seed:  0
    x0:           "ones"   (or an explicit list of numbers)

A run manifest wraps the fully-resolved config under a "config" key plus
a "versions" block; feeding a manifest back in as a config reproduces
the run exactly.
"""

from __future__ import annotations

import json
import platform
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .adversary import AttackStrategy
from .core import GradVector
from .oracle import BatchSchedule, NoiseFamily, NoiseModel, Objective, ObjectiveKind
from .sim import FleetConfig, RunConfig

__all__ = [
    "ConfigError",
    "load_config_file",
    "parse_run_config",
    "run_config_to_doc",
    "build_manifest",
]


class ConfigError(ValueError):
    """The document does not parse or does not match the schema."""


def _require_mapping(doc: Any, where: str) -> dict:
    if not isinstance(doc, dict):
        raise ConfigError(f"{where} must be a JSON object, got {type(doc).__name__}")
    return doc


def _reject_unknown(doc: dict, allowed: "set[str]", where: str) -> None:
    for key in doc:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {where}")


def _get_number(doc: dict, key: str, default: float, where: str) -> float:
    value = doc.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number")
    return float(value)


def _get_int(doc: dict, key: str, default: int, where: str) -> int:
    value = doc.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}.{key} must be an integer")
    return value


def _get_str(doc: dict, key: str, default: str, where: str) -> str:
    value = doc.get(key, default)
    if not isinstance(value, str):
        raise ConfigError(f"{where}.{key} must be a string")
    return value


def _parse_objective(doc: Any) -> Objective:
    doc = _require_mapping(doc, "objective")
    _reject_unknown(doc, {"kind", "dim"}, "objective")
    kind = _get_str(doc, "kind", "quadratic", "objective")
    try:
        kind_enum = ObjectiveKind(kind)
    except ValueError:
        raise ConfigError(f"objective.kind must be one of {[k.value for k in ObjectiveKind]}")
    return Objective(kind=kind_enum, dim=_get_int(doc, "dim", 1000, "objective"))


def _parse_batch(doc: Any) -> BatchSchedule:
    doc = _require_mapping(doc, "fleet.batch")
    _reject_unknown(doc, {"mode", "size"}, "fleet.batch")
    mode = _get_str(doc, "mode", "constant", "fleet.batch")
    size = _get_int(doc, "size", 1, "fleet.batch")
    try:
        return BatchSchedule(mode=mode, size=size)
    except ValueError as exc:
        raise ConfigError(str(exc))


def _parse_noise(doc: Any) -> NoiseModel:
    doc = _require_mapping(doc, "fleet.noise")
    _reject_unknown(doc, {"family", "sigma"}, "fleet.noise")
    family = _get_str(doc, "family", "gaussian", "fleet.noise")
    try:
        family_enum = NoiseFamily(family)
    except ValueError:
        raise ConfigError(f"fleet.noise.family must be one of {[f.value for f in NoiseFamily]}")
    try:
        return NoiseModel(family=family_enum, sigma=_get_number(doc, "sigma", 1.0, "fleet.noise"))
    except ValueError as exc:
        raise ConfigError(str(exc))


def _parse_fleet(doc: Any) -> FleetConfig:
    doc = _require_mapping(doc, "fleet")
    _reject_unknown(doc, {"q", "byzantine_count", "attack", "batch", "noise"}, "fleet")
    attack = _get_str(doc, "attack", "none", "fleet")
    try:
        attack_enum = AttackStrategy(attack)
    except ValueError:
        raise ConfigError(f"fleet.attack must be one of {[a.value for a in AttackStrategy]}")
    return FleetConfig(
        q=_get_int(doc, "q", 27, "fleet"),
        byzantine_count=_get_int(doc, "byzantine_count", 0, "fleet"),
        attack=attack_enum,
        batch=_parse_batch(doc.get("batch", {})),
        noise=_parse_noise(doc.get("noise", {})),
    )


_TOP_LEVEL_KEYS = {
    "objective",
    "fleet",
    "iterations",
    "initial_lr",
    "lr_schedule",
    "weight_decay",
    "master_seed",
    "x0",
}


def parse_run_config(doc: Any) -> RunConfig:
    """Build a RunConfig from a parsed JSON document, fail-closed."""
    doc = _require_mapping(doc, "config")
    if {"config", "versions"} <= set(doc):
        # a run manifest: the resolved config travels under "config"
        doc = _require_mapping(doc["config"], "manifest config")
    _reject_unknown(doc, _TOP_LEVEL_KEYS, "config")

    x0_raw = doc.get("x0", "ones")
    x0: "GradVector | str"
    if isinstance(x0_raw, str):
        if x0_raw != "ones":
            raise ConfigError(f"x0 initializer must be 'ones' or a number list, got {x0_raw!r}")
        x0 = x0_raw
    elif isinstance(x0_raw, list):
        try:
            x0 = GradVector(np.asarray(x0_raw, dtype=np.float64))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"x0 list is not a finite numeric vector: {exc}")
    else:
        raise ConfigError("x0 must be 'ones' or a list of numbers")

    lr_schedule = _get_str(doc, "lr_schedule", "inv_sqrt", "config")
    if lr_schedule not in ("constant", "inv_sqrt"):
        raise ConfigError("lr_schedule must be 'constant' or 'inv_sqrt'")

    return RunConfig(
        objective=_parse_objective(doc.get("objective", {})),
        fleet=_parse_fleet(doc.get("fleet", {})),
        iterations=_get_int(doc, "iterations", 500, "config"),
        initial_lr=_get_number(doc, "initial_lr", 1.0, "config"),
        lr_schedule=lr_schedule,
        weight_decay=_get_number(doc, "weight_decay", 0.0, "config"),
        master_seed=_get_int(doc, "master_seed", 0, "config"),
        x0=x0,
    )


def load_config_file(path: "str | Path") -> RunConfig:
    """Parse the JSON document at `path` into a RunConfig."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}")
    return parse_run_config(doc)


def run_config_to_doc(config: RunConfig) -> dict:
    """Fully-resolved document echo of a RunConfig (all defaults explicit)."""
    x0 = config.x0 if isinstance(config.x0, str) else config.x0.tolist()
    return {
        "objective": {"kind": config.objective.kind.value, "dim": config.objective.dim},
        "fleet": {
            "q": config.fleet.q,
            "byzantine_count": config.fleet.byzantine_count,
            "attack": config.fleet.attack.value,
            "batch": {"mode": config.fleet.batch.mode, "size": config.fleet.batch.size},
            "noise": {
                "family": config.fleet.noise.family.value,
                "sigma": config.fleet.noise.sigma,
            },
        },
        "iterations": config.iterations,
        "initial_lr": config.initial_lr,
        "lr_schedule": config.lr_schedule,
        "weight_decay": config.weight_decay,
        "master_seed": config.master_seed,
        "x0": x0,
    }


def build_manifest(config: RunConfig) -> dict:
    """Manifest documenting a run: resolved config plus tool versions."""
    return {
        "config": run_config_to_doc(config),
        "versions": {
            "signvote": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
        },
    }
