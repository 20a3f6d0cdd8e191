"""Single source of truth for the quivar version."""

__version__ = "0.4.0"
