"""Configuration models and persistence."""

from .config_manager import CONFIG_PATH, ConfigManager
from .schemas import QuivarConfig

__all__ = ["CONFIG_PATH", "ConfigManager", "QuivarConfig"]
