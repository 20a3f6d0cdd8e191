"""Config loading: optional JSON file + environment variable overrides.

Load: config file (if present) -> QUIVAR_* environment variables -> explicit overrides
(CLI flags) -> Pydantic validation.
"""

import json
import logging
import os
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from errors import InvalidInputError

from .schemas import QuivarConfig

logger = logging.getLogger(__name__)

CONFIG_PATH = Path(
    os.environ.get("QUIVAR_CONFIG_PATH", str(Path.home() / ".config" / "quivar" / "config.json"))
)

# Mapping from config keys to environment variable names
_ENV_MAP = {
    "numerics.tol": "QUIVAR_PRECISION",
    "numerics.length_cap": "QUIVAR_LENGTH_CAP",
    "numerics.max_iter": "QUIVAR_MAX_ITER",
    "run.seed": "QUIVAR_SEED",
    "run.output_format": "QUIVAR_FORMAT",
    "logging.level": "QUIVAR_LOG_LEVEL",
    "logging.format": "QUIVAR_LOG_FORMAT",
    "server.transport": "QUIVAR_TRANSPORT",
    "server.host": "QUIVAR_HOST",
    "server.port": "QUIVAR_PORT",
}


class ConfigManager:
    """Manages quivar configuration with file persistence."""

    def __init__(self, config_path: Path | None = None):
        self.config_path = Path(config_path) if config_path else CONFIG_PATH
        self._config: QuivarConfig | None = None

    def load(self, overrides: dict[str, Any] | None = None) -> QuivarConfig:
        """Merge file, environment and overrides (dotted keys), then validate."""
        data: dict[str, Any] = {}
        if self.config_path.exists():
            try:
                data = json.loads(self.config_path.read_text())
                logger.info(f"Config loaded from {self.config_path}")
            except (OSError, json.JSONDecodeError) as e:
                raise InvalidInputError(f"Failed to read config file {self.config_path}: {e}") from e
            if not isinstance(data, dict):
                raise InvalidInputError(f"Config file {self.config_path} must hold a JSON object")

        for config_key, env_var in _ENV_MAP.items():
            value = os.environ.get(env_var)
            if value is not None and value != "":
                self._set_nested(data, config_key, value)

        for config_key, value in (overrides or {}).items():
            if value is not None:
                self._set_nested(data, config_key, value)

        try:
            self._config = QuivarConfig.model_validate(data)
        except ValidationError as e:
            raise InvalidInputError(f"Invalid configuration: {e.errors()[0]['loc']}: {e.errors()[0]['msg']}") from e
        return self._config

    @property
    def config(self) -> QuivarConfig:
        if self._config is None:
            self.load()
        return self._config

    @staticmethod
    def _set_nested(data: dict[str, Any], dotted_key: str, value: Any) -> None:
        """Set a value in a nested dict using dotted key notation."""
        keys = dotted_key.split(".")
        d = data
        for k in keys[:-1]:
            d = d.setdefault(k, {})
        d[keys[-1]] = value
