"""Tests for configuration loading."""

from __future__ import annotations

from pathlib import Path

import pytest

from gk3shift.config import Config, OracleLimits, config_from_dict, load_config
from gk3shift.const import DEFAULT_MAX_DEPTH, DEFAULT_MAX_LEVEL
from gk3shift.exceptions import ConfigError

REPO_CONFIG = Path(__file__).parent.parent / "config" / "configuration.yaml"


def test_defaults():
    assert load_config() == Config()
    config = config_from_dict(None)
    assert config.oracle == OracleLimits()
    assert config.oracle.max_depth == DEFAULT_MAX_DEPTH
    assert config.max_level == DEFAULT_MAX_LEVEL
    assert config.input_format == "json"


def test_repository_configuration_validates():
    config = load_config(REPO_CONFIG)
    assert config.log_levels["gk3shift"] == "debug"
    assert config.oracle.max_vertices == 8


def test_yaml_file(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text(
        "logger:\n"
        "  default: WARNING\n"
        "oracle:\n"
        "  max_depth: 6\n"
        "monoid:\n"
        "  max_level: 10\n"
        "cli:\n"
        "  format: matrix\n",
        encoding="utf-8",
    )
    config = load_config(path)
    assert config.log_level == "warning"
    assert config.oracle.max_depth == 6
    assert config.oracle.max_vertices == OracleLimits().max_vertices
    assert config.max_level == 10
    assert config.input_format == "matrix"


def test_empty_file_gives_defaults(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("", encoding="utf-8")
    assert load_config(path) == Config()


@pytest.mark.parametrize(
    "data",
    [
        {"oracle": {"max_depth": 0}},
        {"oracle": {"depth": 3}},
        {"logger": {"default": "loud"}},
        {"cli": {"format": "csv"}},
        {"monoid": {"max_level": "high"}},
        {"unknown": {}},
    ],
)
def test_invalid_values(data):
    with pytest.raises(ConfigError):
        config_from_dict(data)


def test_unreadable_files(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.yaml")
    listing = tmp_path / "list.yaml"
    listing.write_text("- a\n- b\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="mapping"):
        load_config(listing)
    broken = tmp_path / "broken.yaml"
    broken.write_text("oracle: [\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(broken)
