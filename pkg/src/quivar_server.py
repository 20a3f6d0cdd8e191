#!/usr/bin/env python3
"""Quivar MCP Server - read-only quiver variety computations exposed as tools"""

from _version import __version__

import asyncio
import functools
import logging
import time
from contextlib import asynccontextmanager
from typing import Any

import numpy as np
from fastmcp import FastMCP

from coproduct import ComponentPoset, invert, splitting_check, validate
from errors import InvalidInputError, QuivarError
from log_setup import configure_logging
from quiver_core import add, dynkin_quiver, load_quiver
from representation import FramingSplit, Rep, is_stable, membership, moment_map, moment_residual
from request_validator import RequestValidator
from root_system import classify_type, enumerate_roots
from selftest import run_selftest
from serialization import (
    class_from_dict,
    class_to_dict,
    matrix_to_json,
    poset_from_dict,
    poset_to_dict,
    read_json,
    rep_from_dict,
)
from settings import ConfigManager, QuivarConfig
from strata import (
    attracting_rank,
    component_dim,
    fixed_components,
    hasse_edges,
    linear_extension,
    sigma_fiber_count,
    strata_of_fixed_locus,
    strata_of_M0,
    stratum_dimension,
)
from tensor_ade import dimension, multiplicity_n, tensor_decompose

# Module-level start time for uptime metrics
_START_TIME = time.time()

try:
    config: QuivarConfig = ConfigManager().load()
except QuivarError as e:
    config = QuivarConfig()
    logging.getLogger(__name__).warning(f"Falling back to default configuration: {e}")

configure_logging(config.logging.level, config.logging.format)
logger = logging.getLogger(__name__)

request_validator = RequestValidator()


# Lifespan context manager for clean startup/shutdown
@asynccontextmanager
async def app_lifespan(server: FastMCP):
    logger.info(
        f"Quivar MCP server v{__version__} starting. "
        f"transport={config.server.transport} host={config.server.host} port={config.server.port}"
    )
    yield {}
    logger.info(f"Quivar MCP server v{__version__} shutting down.")


# Initialize the MCP server
mcp = FastMCP("quivar", lifespan=app_lifespan)


def _pre_validate(command: str, kwargs: dict[str, Any]) -> tuple[bool, dict[str, Any] | None]:
    arguments = {k: v for k, v in kwargs.items() if v is not None}
    is_valid, error_msg = request_validator.validate_request({"command": command, "arguments": arguments})
    if not is_valid:
        logger.warning(f"Rejected {command} request: {error_msg}")
        return False, {"error": f"Validation failed: {error_msg}"}
    return True, None


def _failure(tool_name: str, e: Exception) -> dict[str, object]:
    if isinstance(e, QuivarError):
        logger.warning(f"Tool {tool_name} rejected input: {e}")
        return {"error": str(e), "exit_code": e.exit_code}
    logger.error(f"Tool {tool_name} execution failed: {e}", exc_info=True)
    return {"error": f"Tool '{tool_name}' execution failed. Check server logs for details."}


def validate_request(tool_name: str, command: str):
    """Decorator to validate MCP requests before tool execution"""
    def decorator(func):
        if asyncio.iscoroutinefunction(func):
            @functools.wraps(func)
            async def async_wrapper(**kwargs):
                ok, error = _pre_validate(command, kwargs)
                if not ok:
                    return error
                try:
                    result = await func(**kwargs)
                    logger.info(f"Tool {tool_name} completed successfully")
                    return result
                except Exception as e:
                    return _failure(tool_name, e)
            return async_wrapper

        @functools.wraps(func)
        def wrapper(**kwargs):
            ok, error = _pre_validate(command, kwargs)
            if not ok:
                return error
            try:
                result = func(**kwargs)
                logger.info(f"Tool {tool_name} completed successfully")
                return result
            except Exception as e:
                return _failure(tool_name, e)
        return wrapper
    return decorator


# ============================================================================
# COMBINATORICS TOOLS
# ============================================================================


@mcp.tool()
@validate_request("quivar_type", "type")
def quivar_type(quiver: str) -> dict[str, object]:
    """
    Classify a quiver as finite, affine or indefinite.

    Args:
        quiver: Bundled quiver name (A2, jordan, affine_A1, ...), Dynkin label or JSON path

    Returns:
        Type and, for affine quivers, the primitive imaginary root delta
    """
    return classify_type(load_quiver(quiver)).to_dict()


@mcp.tool()
@validate_request("quivar_roots", "roots")
def quivar_roots(quiver: str, bound: str) -> dict[str, object]:
    """
    Positive roots with entries bounded by `bound` (comma-separated, one entry per vertex).
    """
    q = load_quiver(quiver)
    return enumerate_roots(q, q.dim_vector(bound)).to_dict()


@mcp.tool()
@validate_request("quivar_strata", "strata")
def quivar_strata(quiver: str, v: str, w: str) -> dict[str, object]:
    """
    Strata of the affine quotient M0(v, w) with their dimensions.

    Args:
        quiver: Quiver reference
        v: Dimension vector, e.g. "2" or "1,1"
        w: Framing vector
    """
    q = load_quiver(quiver)
    v_, w_ = q.dim_vector(v), q.dim_vector(w)
    strata = strata_of_M0(q, v_, w_)
    return {
        "count": len(strata),
        "strata": [{**s.to_dict(), "dimension": stratum_dimension(q, s, w_)} for s in strata],
    }


@mcp.tool()
@validate_request("quivar_fixed", "fixed")
def quivar_fixed(quiver: str, v: str, w1: str, w2: str) -> dict[str, object]:
    """
    Torus-fixed components for the framing split w = w1 + w2, in a linear extension of the
    component order, with dimensions, attracting ranks, the Hasse diagram and the component
    poset grouped by fixed-locus stratum.
    """
    q = load_quiver(quiver)
    data = (q.dim_vector(v), q.dim_vector(w1), q.dim_vector(w2))
    components = linear_extension(fixed_components(*data))
    return {
        "components": [
            {
                **c.to_dict(),
                "label": c.label(),
                "dimension": component_dim(q, c),
                "attracting_rank": attracting_rank(q, c),
            }
            for c in components
        ],
        "hasse": [[lower.label(), upper.label()] for lower, upper in hasse_edges(components)],
        "poset": poset_to_dict(ComponentPoset.from_strata(q, *data)),
    }


@mcp.tool()
@validate_request("quivar_sigma_fibers", "sigma-fibers")
def quivar_sigma_fibers(quiver: str, v: str, w1: str, w2: str) -> dict[str, object]:
    """
    Strata of the fixed locus of M0 with the number of points over each stratum.
    """
    q = load_quiver(quiver)
    strata = strata_of_fixed_locus(q, q.dim_vector(v), q.dim_vector(w1), q.dim_vector(w2))
    return {"strata": [{**t.to_dict(), "fiber_count": sigma_fiber_count(q, t)} for t in strata]}


# ============================================================================
# REPRESENTATION AND CLASS TOOLS
# ============================================================================


def _load_rep(rep: str, w1: str | None) -> tuple[Rep, FramingSplit | None]:
    r, split = rep_from_dict(read_json(rep))
    if w1 is not None:
        w1_ = r.quiver.dim_vector(w1)
        if any(x > y for x, y in zip(w1_, r.w)):
            raise InvalidInputError(f"w1 {w1_} exceeds w = {r.w}")
        split = FramingSplit.from_dims(w1_, tuple(y - x for x, y in zip(w1_, r.w)))
    return r, split


@mcp.tool()
@validate_request("quivar_mu", "mu")
def quivar_mu(rep: str) -> dict[str, object]:
    """
    Moment map of a representation file, one matrix per vertex, and its Frobenius residual.
    """
    r, _ = _load_rep(rep, None)
    return {
        "mu": {label: matrix_to_json(m) for label, m in zip(r.quiver.vertices, moment_map(r))},
        "residual": moment_residual(r),
    }


@mcp.tool()
@validate_request("quivar_stable", "stable")
def quivar_stable(rep: str) -> dict[str, object]:
    """
    Stability of a representation file for zeta = (1, ..., 1).
    """
    r, _ = _load_rep(rep, None)
    return {"stable": is_stable(r, config.numerics.tol)}


@mcp.tool()
@validate_request("quivar_member", "member")
def quivar_member(rep: str, w1: str | None = None) -> dict[str, object]:
    """
    Membership in T0, T0~ and T0- for the framing split stored in the file or given by w1.

    Args:
        rep: Path to a representation JSON file
        w1: First framing summand; overrides the file's split
    """
    r, split = _load_rep(rep, w1)
    if split is None:
        raise InvalidInputError("Membership needs a framing split: add 'split' to the rep or pass w1")
    return membership(r, split, config.numerics.tol).to_dict()


@mcp.tool()
@validate_request("quivar_class_check", "coproduct")
def quivar_class_check(poset: str, class_: str, action: str = "check") -> dict[str, object]:
    """
    Validate a correspondence class against its component poset.

    Args:
        poset: Path to a poset JSON file
        class_: Path to a class JSON file
        action: "check" (validity and splitting) or "invert"
    """
    c = class_from_dict(read_json(class_), poset_from_dict(read_json(poset)))
    if action == "invert":
        return {"inverse": class_to_dict(invert(c))}
    if action != "check":
        raise InvalidInputError(f"quivar_class_check supports check and invert, not {action}")
    return {"valid": validate(c), "splitting": splitting_check(c)}


# ============================================================================
# TENSOR PRODUCT TOOLS
# ============================================================================


@mcp.tool()
@validate_request("quivar_tensor", "tensor")
def quivar_tensor(type: str, lhs: str, rhs: str) -> dict[str, object]:
    """
    Decompose V(lhs) x V(rhs) into irreducibles.

    Args:
        type: ADE label, e.g. "A2" or "D4"
        lhs: Dominant weight in fundamental-weight coordinates, e.g. "1,0"
        rhs: Dominant weight
    """
    q = dynkin_quiver(type)
    lam = tuple(int(x) for x in lhs.split(","))
    mu = tuple(int(x) for x in rhs.split(","))
    return {
        "type": type,
        "summands": [
            {"weight": list(nu), "multiplicity": m, "dimension": dimension(q, nu)}
            for nu, m in tensor_decompose(q, lam, mu).items()
        ],
    }


@mcp.tool()
@validate_request("quivar_tensor_n", "tensor-n")
def quivar_tensor_n(quiver: str, v1: str, w1: str, v2: str, w2: str, v0: str) -> dict[str, object]:
    """
    Multiplicity of V(w - C v0) in V(w1 - C v1) x V(w2 - C v2) with w = w1 + w2.
    """
    q = load_quiver(quiver)
    w1_, w2_ = q.dim_vector(w1), q.dim_vector(w2)
    n = multiplicity_n(q, q.dim_vector(v1), w1_, q.dim_vector(v2), w2_, q.dim_vector(v0), add(w1_, w2_))
    return {"n": n}


# ============================================================================
# SELFTEST AND HEALTH
# ============================================================================


@mcp.tool()
@validate_request("quivar_selftest", "selftest")
async def quivar_selftest(quick: bool = True, seed: int | None = None) -> dict[str, object]:
    """
    Run the oracle-equivalence suite off the event loop. `quick` shrinks sample sizes.
    """
    seed = config.run.seed if seed is None else seed
    return await asyncio.to_thread(run_selftest, quick, seed, config.numerics.tol)


@mcp.tool()
def health_live() -> dict[str, object]:
    """
    Liveness probe. Always returns ok when the server process is running.
    """
    return {"status": "ok", "version": __version__, "uptime_seconds": round(time.time() - _START_TIME, 3)}


@mcp.tool()
def health_ready() -> dict[str, object]:
    """
    Readiness probe: loads a bundled quiver and runs one small linear-algebra call.
    """
    try:
        q = load_quiver("A2")
        np.linalg.matrix_rank(np.eye(q.n))
        return {"status": "ok"}
    except Exception as e:
        logger.error(f"health_ready check failed: {e}", exc_info=True)
        return {"status": "not_ready", "reason": str(e)}


# ============================================================================
# SERVER STARTUP
# ============================================================================

if __name__ == "__main__":
    transport = config.server.transport
    transport_kwargs = {}
    if transport in ("sse", "streamable-http"):
        transport_kwargs["host"] = config.server.host
        transport_kwargs["port"] = config.server.port
        logger.info(
            f"Quivar MCP v{__version__} starting with {transport} transport on "
            f"{transport_kwargs['host']}:{transport_kwargs['port']}"
        )
    else:
        logger.info(f"Quivar MCP v{__version__} starting with {transport} transport")
    mcp.run(transport=transport, **transport_kwargs)
