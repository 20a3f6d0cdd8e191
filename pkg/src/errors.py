"""
Quivar error hierarchy.

Every failure raised by the library derives from QuivarError so callers (the CLI
dispatcher, the MCP tool layer) can map failures onto exit codes and error payloads:
- InvalidInputError      -> exit 2
- UnsupportedTypeError   -> exit 3
- ConvergenceError       -> exit 1
"""


class QuivarError(Exception):
    """Base class for all quivar failures."""

    exit_code = 1


class InvalidInputError(QuivarError, ValueError):
    """Malformed data, shape mismatch or violated precondition."""

    exit_code = 2


class UnsupportedTypeError(QuivarError):
    """Quiver type outside the supported finite/affine (or ADE) range."""

    exit_code = 3


class ConvergenceError(QuivarError, RuntimeError):
    """Iterative solver stopped without reaching the requested residual."""

    exit_code = 1

    def __init__(self, message: str, residual: float, iterations: int = 0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class InvalidClassError(InvalidInputError):
    """Correspondence class that is not unitriangular over its component poset."""


class NonDominantWeightError(InvalidInputError):
    """A dominant weight was required; signals an empty stratum."""
