#!/usr/bin/env python3
"""
Tests for configuration loading and structured logging.

Covers:
1. Defaults, config file, QUIVAR_* environment variables and explicit overrides
2. Validation failures surface as InvalidInputError
3. JSON and text log formats go to stderr
"""

import json
import logging

import pytest

from errors import InvalidInputError
from log_setup import configure_logging
from settings import ConfigManager, QuivarConfig

# ---------------------------------------------------------------------------
# 1. Load order
# ---------------------------------------------------------------------------


class TestLoad:
    def test_defaults(self, tmp_path):
        config = ConfigManager(tmp_path / "missing.json").load()
        assert config == QuivarConfig()
        assert config.numerics.tol == 1e-9
        assert config.numerics.length_cap is None
        assert config.run.output_format == "json"
        assert config.server.transport == "stdio"

    def test_default_path_is_read_at_call_time(self, tmp_path):
        import settings.config_manager

        assert ConfigManager().config_path == settings.config_manager.CONFIG_PATH
        assert str(tmp_path) in str(ConfigManager().config_path)

    def test_file(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"numerics": {"tol": 1e-6}, "run": {"seed": 9}}))
        config = ConfigManager(path).load()
        assert config.numerics.tol == 1e-6
        assert config.run.seed == 9

    def test_env_overrides_file(self, tmp_path, monkeypatch):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"run": {"seed": 9}}))
        monkeypatch.setenv("QUIVAR_SEED", "11")
        monkeypatch.setenv("QUIVAR_LOG_LEVEL", "debug")
        config = ConfigManager(path).load()
        assert config.run.seed == 11
        assert config.logging.level == "DEBUG"

    def test_overrides_beat_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("QUIVAR_PRECISION", "1e-6")
        config = ConfigManager(tmp_path / "c.json").load({"numerics.tol": 1e-4, "run.seed": None})
        assert config.numerics.tol == 1e-4
        assert config.run.seed == 0

    def test_empty_env_value_is_ignored(self, tmp_path, monkeypatch):
        monkeypatch.setenv("QUIVAR_FORMAT", "")
        assert ConfigManager(tmp_path / "c.json").load().run.output_format == "json"


# ---------------------------------------------------------------------------
# 2. Validation
# ---------------------------------------------------------------------------


class TestValidation:
    @pytest.mark.parametrize(
        "overrides",
        [
            {"numerics.tol": 0},
            {"numerics.tol": 0.5},
            {"numerics.length_cap": 1000},
            {"run.seed": -1},
            {"run.output_format": "yaml"},
            {"logging.level": "LOUD"},
            {"server.port": 0},
        ],
    )
    def test_rejects(self, tmp_path, overrides):
        with pytest.raises(InvalidInputError, match="Invalid configuration"):
            ConfigManager(tmp_path / "c.json").load(overrides)

    def test_broken_file(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text("{")
        with pytest.raises(InvalidInputError, match="Failed to read"):
            ConfigManager(path).load()

    def test_file_must_hold_an_object(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text("[1, 2]")
        with pytest.raises(InvalidInputError):
            ConfigManager(path).load()


# ---------------------------------------------------------------------------
# 3. Logging
# ---------------------------------------------------------------------------


class TestLogging:
    def test_json_lines_on_stderr(self, capsys):
        configure_logging("INFO", "json")
        logging.getLogger("quivar.test").info("hello", extra={"extra": {"command": "roots"}})
        captured = capsys.readouterr()
        assert captured.out == ""
        record = json.loads(captured.err.strip().splitlines()[-1])
        assert record["message"] == "hello"
        assert record["level"] == "INFO"
        assert record["command"] == "roots"

    def test_text_format(self, capsys):
        configure_logging("warning", "text")
        logging.getLogger("quivar.test").warning("careful")
        assert "WARNING quivar.test: careful" in capsys.readouterr().err

    def test_level_filters(self, capsys):
        configure_logging("ERROR", "json")
        logging.getLogger("quivar.test").warning("quiet")
        assert capsys.readouterr().err == ""

    def test_exceptions_are_included(self, capsys):
        configure_logging("INFO", "json")
        try:
            raise ValueError("boom")
        except ValueError:
            logging.getLogger("quivar.test").error("failed", exc_info=True)
        record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert "ValueError: boom" in record["exception"]
