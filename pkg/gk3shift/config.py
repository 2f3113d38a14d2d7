"""Configuration loading for gk3shift."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import voluptuous as vol
import yaml

from .const import (
    DEFAULT_CANON_PERMUTATION_LIMIT,
    DEFAULT_CANON_VERTEX_LIMIT,
    DEFAULT_LOG_LEVEL,
    DEFAULT_MAX_CLASSES,
    DEFAULT_MAX_DEPTH,
    DEFAULT_MAX_LEVEL,
    DEFAULT_MAX_VERTICES,
    DEFAULT_WITNESS_CANDIDATE_LIMIT,
    DEFAULT_WITNESS_ENTRY_MAX,
    DEFAULT_WITNESS_LAG_MAX,
    INPUT_FORMATS,
    LOG_LEVELS,
)
from .exceptions import ConfigError

_LOGGER = logging.getLogger(__name__)

_POSITIVE = vol.All(int, vol.Range(min=1))
_LEVEL = vol.All(str, vol.Lower, vol.In(LOG_LEVELS))

CONFIG_SCHEMA = vol.Schema(
    {
        vol.Optional("logger", default={}): {
            vol.Optional("default", default=DEFAULT_LOG_LEVEL): _LEVEL,
            vol.Optional("logs", default={}): {str: _LEVEL},
        },
        vol.Optional("oracle", default={}): {
            vol.Optional("max_depth", default=DEFAULT_MAX_DEPTH): _POSITIVE,
            vol.Optional("max_vertices", default=DEFAULT_MAX_VERTICES): _POSITIVE,
            vol.Optional("max_classes", default=DEFAULT_MAX_CLASSES): _POSITIVE,
            vol.Optional(
                "canon_vertex_limit", default=DEFAULT_CANON_VERTEX_LIMIT
            ): _POSITIVE,
            vol.Optional(
                "canon_permutation_limit", default=DEFAULT_CANON_PERMUTATION_LIMIT
            ): _POSITIVE,
            vol.Optional("witness_entry_max", default=DEFAULT_WITNESS_ENTRY_MAX): _POSITIVE,
            vol.Optional("witness_lag_max", default=DEFAULT_WITNESS_LAG_MAX): _POSITIVE,
            vol.Optional(
                "witness_candidate_limit", default=DEFAULT_WITNESS_CANDIDATE_LIMIT
            ): _POSITIVE,
        },
        vol.Optional("monoid", default={}): {
            vol.Optional("max_level", default=DEFAULT_MAX_LEVEL): _POSITIVE,
        },
        vol.Optional("cli", default={}): {
            vol.Optional("format", default="json"): vol.In(INPUT_FORMATS),
        },
    }
)


@dataclass(frozen=True)
class OracleLimits:
    """Bounds for the brute-force search and witness enumeration."""

    max_depth: int = DEFAULT_MAX_DEPTH
    max_vertices: int = DEFAULT_MAX_VERTICES
    max_classes: int = DEFAULT_MAX_CLASSES
    canon_vertex_limit: int = DEFAULT_CANON_VERTEX_LIMIT
    canon_permutation_limit: int = DEFAULT_CANON_PERMUTATION_LIMIT
    witness_entry_max: int = DEFAULT_WITNESS_ENTRY_MAX
    witness_lag_max: int = DEFAULT_WITNESS_LAG_MAX
    witness_candidate_limit: int = DEFAULT_WITNESS_CANDIDATE_LIMIT


@dataclass(frozen=True)
class Config:
    """Validated configuration."""

    log_level: str = DEFAULT_LOG_LEVEL
    log_levels: dict[str, str] = field(default_factory=dict)
    oracle: OracleLimits = field(default_factory=OracleLimits)
    max_level: int = DEFAULT_MAX_LEVEL
    input_format: str = "json"


def config_from_dict(data: dict[str, Any] | None) -> Config:
    """Validate a raw mapping and build a Config."""
    try:
        validated = CONFIG_SCHEMA(data or {})
    except vol.Invalid as err:
        msg = f"Invalid configuration: {err}"
        raise ConfigError(msg) from err

    return Config(
        log_level=validated["logger"]["default"],
        log_levels=dict(validated["logger"]["logs"]),
        oracle=OracleLimits(**validated["oracle"]),
        max_level=validated["monoid"]["max_level"],
        input_format=validated["cli"]["format"],
    )


def load_config(path: str | Path | None = None) -> Config:
    """
    Load the configuration file, or the defaults when no path is given.

    Raises:
        ConfigError: If the file cannot be read or does not validate.

    """
    if path is None:
        return Config()

    try:
        raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as err:
        msg = f"Cannot read configuration {path}: {err}"
        raise ConfigError(msg) from err

    if raw is not None and not isinstance(raw, dict):
        msg = f"Configuration {path} must be a mapping"
        raise ConfigError(msg)

    _LOGGER.debug("Loaded configuration from %s", path)
    return config_from_dict(raw)
