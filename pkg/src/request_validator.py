#!/usr/bin/env python3
"""
Request Validator
Validates command and tool arguments before any computation starts.

- Command whitelisting (CLI subcommands and MCP tools share one set)
- Dimension-vector and weight string formats
- Quiver references: bundled names, Dynkin labels or JSON file paths
- Numeric ranges for tolerance, length cap and seed
"""

import logging
import re
from typing import Any

logger = logging.getLogger(__name__)


class RequestValidator:
    """Validates quivar requests of the form {"command": ..., "arguments": {...}}"""

    def __init__(self):
        self.allowed_commands = {
            "type",
            "roots",
            "strata",
            "fixed",
            "poset",
            "sigma-fibers",
            "mu",
            "stable",
            "member",
            "limit",
            "solve",
            "coproduct",
            "coassoc",
            "tensor",
            "tensor-n",
            "selftest",
        }
        self.coproduct_actions = {"invert", "check", "coassoc"}
        self.output_formats = {"json", "table", "dot"}

        self.dim_vector_pattern = re.compile(r"^\d+(,\d+)*$")
        self.weight_pattern = re.compile(r"^-?\d+(,-?\d+)*$")
        self.quiver_name_pattern = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")
        self.json_path_pattern = re.compile(r"^[^\x00;|&`$]+\.json$")

        self.vector_arguments = ("bound", "v", "w", "w1", "w2", "v1", "v2", "v0")
        self.weight_arguments = ("lhs", "rhs")
        self.path_arguments = ("rep", "poset", "class", "class_", "triple")

    def validate_request(self, request: dict[str, Any]) -> tuple[bool, str]:
        """
        Validate a request.
        Returns (is_valid, error_message)
        """
        try:
            if not isinstance(request, dict):
                return False, "Request must be a dictionary"

            command = request.get("command", "")
            if command not in self.allowed_commands:
                return False, f"Unknown command '{command}'"

            arguments = request.get("arguments", {})
            if not isinstance(arguments, dict):
                return False, "Arguments must be a dictionary"

            if command == "coproduct" and arguments.get("action") not in self.coproduct_actions:
                return False, f"Unknown coproduct action '{arguments.get('action')}'"

            return self._validate_arguments(arguments)

        except Exception as e:
            logger.error(f"Validation error: {e}")
            return False, f"Validation error: {str(e)}"

    def _validate_arguments(self, arguments: dict[str, Any]) -> tuple[bool, str]:
        quiver = arguments.get("quiver")
        if quiver is not None and not self._is_quiver_reference(str(quiver)):
            return False, f"Invalid quiver reference: {quiver}"

        for key in self.vector_arguments:
            value = arguments.get(key)
            if value is not None and not self._is_vector(value, self.dim_vector_pattern):
                return False, f"Invalid dimension vector for {key}: {value}"

        for key in self.weight_arguments:
            value = arguments.get(key)
            if value is not None and not self._is_vector(value, self.weight_pattern):
                return False, f"Invalid weight for {key}: {value}"

        for key in self.path_arguments:
            value = arguments.get(key)
            if value is not None and not self.json_path_pattern.match(str(value)):
                return False, f"Invalid JSON path for {key}: {value}"

        return self._validate_numbers(arguments)

    def _validate_numbers(self, arguments: dict[str, Any]) -> tuple[bool, str]:
        tol = arguments.get("tol")
        if tol is not None:
            if isinstance(tol, bool) or not isinstance(tol, (int, float)) or not 0 < tol <= 1e-2:
                return False, "Tolerance must be a number in (0, 1e-2]"

        cap = arguments.get("cap")
        if cap is not None:
            if isinstance(cap, bool) or not isinstance(cap, int) or cap < 0 or cap > 256:
                return False, "Length cap must be an integer in [0, 256]"

        seed = arguments.get("seed")
        if seed is not None:
            if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0 or seed >= 2**32:
                return False, "Seed must be a nonnegative 32-bit integer"

        fmt = arguments.get("format")
        if fmt is not None and fmt not in self.output_formats:
            return False, f"Unknown output format '{fmt}'"

        return True, ""

    def _is_vector(self, value: Any, pattern: re.Pattern) -> bool:
        if isinstance(value, (list, tuple)):
            return all(isinstance(x, int) and not isinstance(x, bool) for x in value) and (
                pattern is self.weight_pattern or all(x >= 0 for x in value)
            )
        return bool(pattern.match(str(value).replace(" ", "")))

    def _is_quiver_reference(self, value: str) -> bool:
        return bool(self.quiver_name_pattern.match(value) or self.json_path_pattern.match(value))
