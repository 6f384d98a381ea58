"""Pipeline configuration: one JSON document mirroring PipelineConfig."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .energy import VehicleParams
from .filtering import FilterConfig
from .mapclient import EndpointConfig
from .pidsim import ControllerConfig
from .rules import RuleThresholds


class ConfigError(ValueError):
    pass


# config sections a service client may override per request; endpoint URLs
# and file paths stay server-controlled
OVERRIDABLE = {"thresholds", "controller", "filter", "vehicle", "initial_soc", "closed_loop"}


@dataclass(frozen=True)
class PipelineConfig:
    thresholds: RuleThresholds = field(default_factory=RuleThresholds)
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    filter: FilterConfig = field(default_factory=FilterConfig)
    vehicle: VehicleParams = field(default_factory=VehicleParams)
    endpoints: EndpointConfig = field(default_factory=EndpointConfig)
    weights_path: Optional[str] = None
    initial_soc: float = 0.80
    offline_mode: bool = True
    fixture_path: Optional[str] = None  # attribute records used in offline mode
    attribute_sample_m: float = 10.0  # spacing of map attribute queries
    closed_loop: bool = False  # feed predictions back as past states


_SECTIONS = {
    "thresholds": RuleThresholds,
    "controller": ControllerConfig,
    "filter": FilterConfig,
    "vehicle": VehicleParams,
    "endpoints": EndpointConfig,
}


def _build_section(cls, data: dict, section: str):
    if not isinstance(data, dict):
        raise ConfigError(f"config section '{section}' must be an object")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown keys in config section '{section}': {unknown}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config section '{section}': {exc}") from exc


def config_from_dict(data: dict) -> PipelineConfig:
    if not isinstance(data, dict):
        raise ConfigError("config document must be a JSON object")
    known = {f.name for f in dataclasses.fields(PipelineConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown top-level config keys: {unknown}")
    kwargs = {}
    for name, value in data.items():
        if name in _SECTIONS:
            kwargs[name] = _build_section(_SECTIONS[name], value, name)
        else:
            kwargs[name] = value
    try:
        return PipelineConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc


def load_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from exc
    cfg = config_from_dict(data)
    # relative file references resolve against the config file, not the CWD
    base = path.resolve().parent
    updates = {}
    for name in ("weights_path", "fixture_path"):
        value = getattr(cfg, name)
        if value and not Path(value).is_absolute():
            updates[name] = str(base / value)
    return dataclasses.replace(cfg, **updates) if updates else cfg


def config_to_dict(cfg: PipelineConfig) -> dict:
    out = dataclasses.asdict(cfg)
    # IntEnum fields serialize as ints already; nothing else is exotic
    return out


def apply_overrides(cfg: PipelineConfig, overrides: dict) -> PipelineConfig:
    """Merge a request-level override object into an existing config."""
    if not overrides:
        return cfg
    if not isinstance(overrides, dict):
        raise ConfigError("overrides must be an object")
    illegal = sorted(set(overrides) - OVERRIDABLE)
    if illegal:
        raise ConfigError(f"overrides not permitted for: {illegal}")
    merged = config_to_dict(cfg)
    for name, value in overrides.items():
        if name in _SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError(f"override '{name}' must be an object")
            merged[name].update(value)
        else:
            merged[name] = value
    return config_from_dict(merged)
