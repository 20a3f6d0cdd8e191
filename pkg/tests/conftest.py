"""Root conftest.py -- pytest configuration and test isolation.

1. Puts src/ on sys.path so tests import the flat modules directly.

2. Prevents sys.modules pollution from test_server.py, which stubs fastmcp at import
   time so the server module can be loaded without the MCP runtime. Without cleanup
   the stub would leak into later test modules.

3. Restores the root logger after every test: the CLI and server entry points call
   configure_logging(), which replaces the root handlers.
"""

import logging
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

FIXTURES = Path(__file__).resolve().parent / "fixtures"


# -- 2. Isolate sys.modules stubs injected by server test modules --------

_STUBBED_MODULES = (
    "fastmcp",
    "quivar_server",
)

_snapshots: dict = {}


def pytest_collectstart(collector) -> None:
    """Snapshot sys.modules before each collector so we can restore stubs."""
    _snapshots[collector.nodeid] = {
        name: sys.modules.get(name) for name in _STUBBED_MODULES
    }


def pytest_collectreport(report) -> None:
    """After collecting a test module, restore original sys.modules entries."""
    saved = _snapshots.pop(report.nodeid, None)
    if saved is None:
        return

    for name in _STUBBED_MODULES:
        current = sys.modules.get(name)
        original = saved.get(name)
        if current is not original:
            if original is None:
                sys.modules.pop(name, None)
            else:
                sys.modules[name] = original


# -- 3. Logging isolation and shared fixtures ------------------------------


@pytest.fixture(autouse=True)
def _restore_root_logger():
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture(autouse=True)
def _isolated_config(monkeypatch, tmp_path):
    """No QUIVAR_* variable or user config file leaks into a test."""
    for name in (
        "QUIVAR_PRECISION",
        "QUIVAR_LENGTH_CAP",
        "QUIVAR_MAX_ITER",
        "QUIVAR_SEED",
        "QUIVAR_FORMAT",
        "QUIVAR_LOG_LEVEL",
        "QUIVAR_LOG_FORMAT",
        "QUIVAR_TRANSPORT",
        "QUIVAR_HOST",
        "QUIVAR_PORT",
    ):
        monkeypatch.delenv(name, raising=False)
    import settings.config_manager

    monkeypatch.setattr(settings.config_manager, "CONFIG_PATH", tmp_path / "quivar" / "config.json")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
