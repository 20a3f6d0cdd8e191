#!/usr/bin/env python3
"""
Quivar command-line interface.

One subcommand per computation. Results go to stdout as canonical JSON (or a table / DOT
rendering); diagnostics go to stderr as structured log records.

Exit codes: 0 success, 2 invalid input, 3 unsupported quiver type, 1 computation failure.
"""

import argparse
import logging
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any

import numpy as np

import oracles
from _version import __version__
from coproduct import (
    TRIPLE_PATTERNS,
    ComponentPoset,
    TriplePoset,
    coassoc_check,
    invert,
    random_triple_class,
    shared_family,
    splitting_check,
    validate,
)
from errors import InvalidInputError, QuivarError
from log_setup import configure_logging
from quiver_core import add, dynkin_quiver, load_quiver
from rendering import render_poset_dot, render_table
from representation import (
    FramingSplit,
    find_stable_point,
    is_stable,
    limit_invariants,
    membership,
    moment_map,
    moment_residual,
    newton_solve_moment,
    tangent_dimension,
)
from request_validator import RequestValidator
from root_system import classify_type, enumerate_roots
from selftest import run_selftest
from serialization import (
    class_from_dict,
    class_to_dict,
    dumps,
    matrix_to_json,
    poset_from_dict,
    poset_to_dict,
    read_json,
    rep_from_dict,
    rep_to_dict,
    triple_from_dict,
)
from settings import ConfigManager, QuivarConfig
from strata import (
    attracting_rank,
    component_dim,
    fixed_components,
    hasse_edges,
    lagrangian_check,
    linear_extension,
    quiver_variety_dim,
    sigma_fiber_count,
    strata_of_fixed_locus,
    strata_of_M0,
    stratum_dimension,
    triple_components,
)
from tensor_ade import dimension, multiplicity_n, tensor_decompose

logger = logging.getLogger(__name__)

_TANGENT_TOL = 1e-7


class Context:
    """Parsed arguments plus the resolved configuration for one command."""

    def __init__(self, args: argparse.Namespace, config: QuivarConfig):
        self.args = args
        self.config = config
        self.rng = np.random.default_rng(config.run.seed)

    @property
    def tol(self) -> float:
        return self.config.numerics.tol

    @property
    def cap(self) -> int | None:
        return self.config.numerics.length_cap

    def quiver(self):
        if not self.args.quiver:
            raise InvalidInputError("This command needs --quiver")
        return load_quiver(self.args.quiver)

    def vector(self, q, name: str, required: bool = True):
        value = getattr(self.args, name, None)
        if value is None:
            if required:
                raise InvalidInputError(f"This command needs --{name}")
            return None
        return q.dim_vector(value)

    def rep(self):
        if not self.args.rep:
            raise InvalidInputError("This command needs --rep")
        quiver = load_quiver(self.args.quiver) if self.args.quiver else None
        r, split = rep_from_dict(read_json(self.args.rep), quiver)
        if self.args.w1 is not None:
            w1 = r.quiver.dim_vector(self.args.w1)
            if any(x > y for x, y in zip(w1, r.w)):
                raise InvalidInputError(f"--w1 {w1} exceeds w = {r.w}")
            split = FramingSplit.from_dims(w1, tuple(y - x for x, y in zip(w1, r.w)))
        return r, split


def _parse_weight(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise InvalidInputError(f"Invalid weight {text!r}")


def _require_split(split: FramingSplit | None) -> FramingSplit:
    if split is None:
        raise InvalidInputError("This command needs a framing split: add 'split' to the rep or pass --w1")
    return split


# ---------------------------------------------------------------------------
# Combinatorics
# ---------------------------------------------------------------------------


def cmd_type(ctx: Context) -> dict:
    return classify_type(ctx.quiver()).to_dict()


def cmd_roots(ctx: Context) -> dict:
    q = ctx.quiver()
    return enumerate_roots(q, ctx.vector(q, "bound")).to_dict()


def cmd_strata(ctx: Context) -> dict:
    q = ctx.quiver()
    v, w = ctx.vector(q, "v"), ctx.vector(q, "w")
    strata = strata_of_M0(q, v, w)
    return {
        "count": len(strata),
        "strata": [{**s.to_dict(), "dimension": stratum_dimension(q, s, w)} for s in strata],
    }


def _components(ctx: Context):
    q = ctx.quiver()
    v, w1, w2 = ctx.vector(q, "v"), ctx.vector(q, "w1"), ctx.vector(q, "w2")
    return q, linear_extension(fixed_components(v, w1, w2))


def cmd_fixed(ctx: Context) -> dict:
    q, components = _components(ctx)
    return {
        "components": [
            {
                **c.to_dict(),
                "label": c.label(),
                "dimension": component_dim(q, c),
                "attracting_rank": attracting_rank(q, c),
                "lagrangian": lagrangian_check(q, c),
            }
            for c in components
        ]
    }


def cmd_poset(ctx: Context) -> dict | str:
    q = ctx.quiver()
    v, w1, w2 = ctx.vector(q, "v"), ctx.vector(q, "w1"), ctx.vector(q, "w2")
    components = linear_extension(fixed_components(v, w1, w2))
    poset = ComponentPoset.from_strata(q, v, w1, w2)
    if ctx.config.run.output_format == "dot":
        return render_poset_dot(components, dims=dict(zip(poset.labels, poset.dims)), name=q.name or "poset")
    return {
        "poset": poset_to_dict(poset),
        "hasse": [[lower.label(), upper.label()] for lower, upper in hasse_edges(components)],
    }


def cmd_sigma_fibers(ctx: Context) -> dict:
    q = ctx.quiver()
    v, w1, w2 = ctx.vector(q, "v"), ctx.vector(q, "w1"), ctx.vector(q, "w2")
    strata = strata_of_fixed_locus(q, v, w1, w2)
    return {"strata": [{**t.to_dict(), "fiber_count": sigma_fiber_count(q, t)} for t in strata]}


# ---------------------------------------------------------------------------
# Representations
# ---------------------------------------------------------------------------


def cmd_mu(ctx: Context) -> dict:
    r, _ = ctx.rep()
    mu = moment_map(r)
    return {
        "mu": {label: matrix_to_json(m) for label, m in zip(r.quiver.vertices, mu)},
        "residual": moment_residual(r),
    }


def cmd_stable(ctx: Context) -> dict:
    r, _ = ctx.rep()
    return {"stable": is_stable(r, ctx.tol)}


def cmd_member(ctx: Context) -> dict:
    r, split = ctx.rep()
    return membership(r, _require_split(split), ctx.tol).to_dict()


def cmd_limit(ctx: Context) -> dict:
    r, split = ctx.rep()
    split = _require_split(split)
    cap = ctx.cap if ctx.cap is not None else sum(r.v) ** 2
    result: dict[str, Any] = {"record": limit_invariants(r, split, cap, ctx.tol).to_dict()}
    if ctx.args.t is not None:
        result["t"] = ctx.args.t
        result["max_error"] = oracles.limit_error(r, split, ctx.args.t, cap)
    return result


def cmd_solve(ctx: Context) -> dict:
    numerics = ctx.config.numerics
    if ctx.args.rep:
        start, split = ctx.rep()
        r = newton_solve_moment(start, tol=numerics.solver_tol, max_iter=numerics.max_iter, damping=numerics.damping)
    else:
        q = ctx.quiver()
        split = None
        r = find_stable_point(
            q,
            ctx.vector(q, "v"),
            ctx.vector(q, "w"),
            ctx.rng,
            attempts=numerics.attempts,
            tol=numerics.solver_tol,
            max_iter=numerics.max_iter,
        )
    stable = is_stable(r, _TANGENT_TOL)
    result = {
        "rep": rep_to_dict(r, split),
        "residual": moment_residual(r),
        "stable": stable,
        "expected_dimension": quiver_variety_dim(r.quiver, r.v, r.w),
    }
    if stable:
        result["tangent_dimension"] = tangent_dimension(r, _TANGENT_TOL)
    return result


# ---------------------------------------------------------------------------
# Coproduct
# ---------------------------------------------------------------------------


def cmd_coproduct(ctx: Context) -> dict:
    action = ctx.args.action
    if action == "coassoc":
        if not ctx.args.triple:
            raise InvalidInputError("coproduct coassoc needs --triple")
        return {"coassociative": coassoc_check(*triple_from_dict(read_json(ctx.args.triple)))}
    class_path = getattr(ctx.args, "class")
    if not ctx.args.poset or not class_path:
        raise InvalidInputError(f"coproduct {action} needs --poset and --class")
    c = class_from_dict(read_json(class_path), poset_from_dict(read_json(ctx.args.poset)))
    if action == "check":
        return {"valid": validate(c), "splitting": splitting_check(c)}
    return {"inverse": class_to_dict(invert(c))}


def cmd_coassoc(ctx: Context) -> dict:
    v = tuple(int(x) for x in (ctx.args.v or "1").split(","))
    if any(x < 0 for x in v):
        raise InvalidInputError(f"Invalid dimension vector {v}")
    zero = (0,) * len(v)
    poset = TriplePoset(tuple(triple_components(v, zero, zero, zero)))
    trials = ctx.args.trials
    family_failures = sum(not coassoc_check(*shared_family(poset, ctx.rng)) for _ in range(trials))
    random_failures = sum(
        not coassoc_check(*(random_triple_class(poset, p, ctx.rng, density=1.0) for p in TRIPLE_PATTERNS))
        for _ in range(trials)
    )
    return {
        "components": len(poset.components),
        "trials": trials,
        "family_failures": family_failures,
        "random_failure_rate": random_failures / trials if trials else 0.0,
    }


# ---------------------------------------------------------------------------
# Tensor products
# ---------------------------------------------------------------------------


def cmd_tensor(ctx: Context) -> dict:
    if not ctx.args.type:
        raise InvalidInputError("tensor needs --type")
    q = dynkin_quiver(ctx.args.type)
    lam, mu = _parse_weight(ctx.args.lhs or ""), _parse_weight(ctx.args.rhs or "")
    decomposition = tensor_decompose(q, lam, mu)
    summands = [
        {"weight": list(nu), "multiplicity": m, "dimension": dimension(q, nu)} for nu, m in decomposition.items()
    ]
    total = sum(s["multiplicity"] * s["dimension"] for s in summands)
    return {
        "type": ctx.args.type,
        "lhs": list(lam),
        "rhs": list(mu),
        "summands": summands,
        "dimension_check": total == dimension(q, lam) * dimension(q, mu),
    }


def cmd_tensor_n(ctx: Context) -> dict:
    q = ctx.quiver()
    v1, w1 = ctx.vector(q, "v1"), ctx.vector(q, "w1")
    v2, w2 = ctx.vector(q, "v2"), ctx.vector(q, "w2")
    v0 = ctx.vector(q, "v0")
    w = ctx.vector(q, "w", required=False) or add(w1, w2)
    return {"n": multiplicity_n(q, v1, w1, v2, w2, v0, w)}


def cmd_selftest(ctx: Context) -> dict:
    return run_selftest(quick=ctx.args.quick, seed=ctx.config.run.seed, tol=ctx.tol)


COMMANDS: dict[str, Callable[[Context], Any]] = {
    "type": cmd_type,
    "roots": cmd_roots,
    "strata": cmd_strata,
    "fixed": cmd_fixed,
    "poset": cmd_poset,
    "sigma-fibers": cmd_sigma_fibers,
    "mu": cmd_mu,
    "stable": cmd_stable,
    "member": cmd_member,
    "limit": cmd_limit,
    "solve": cmd_solve,
    "coproduct": cmd_coproduct,
    "coassoc": cmd_coassoc,
    "tensor": cmd_tensor,
    "tensor-n": cmd_tensor_n,
    "selftest": cmd_selftest,
}


# ---------------------------------------------------------------------------
# Argument parsing and dispatch
# ---------------------------------------------------------------------------


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON config file")
    common.add_argument("--log-level", dest="log_level")
    common.add_argument("--log-format", dest="log_format", choices=["json", "text"])
    common.add_argument("--format", choices=["json", "table", "dot"])
    common.add_argument("--tol", type=float, help="rank tolerance")
    common.add_argument("--cap", type=int, help="path length cap for invariant records")
    common.add_argument("--max-iter", dest="max_iter", type=int)
    common.add_argument("--seed", type=int)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="quivar", description="Quiver variety computations.")
    parser.add_argument("--version", action="version", version=f"quivar {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str, *options: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        for option in options:
            p.add_argument(f"--{option}", dest=option.replace("-", "_"))
        return p

    add("type", "finite / affine / indefinite classification", "quiver")
    add("roots", "positive roots up to a bound", "quiver", "bound")
    add("strata", "strata of the affine quotient M0(v, w)", "quiver", "v", "w")
    add("fixed", "fixed-point components for w = w1 + w2", "quiver", "v", "w1", "w2")
    add("poset", "component poset (JSON or --format dot)", "quiver", "v", "w1", "w2")
    add("sigma-fibers", "fixed-locus strata with direct-sum fiber counts", "quiver", "v", "w1", "w2")
    add("mu", "moment map of a representation", "rep", "quiver", "w1")
    add("stable", "stability for zeta = (1, ..., 1)", "rep", "quiver", "w1")
    add("member", "membership in T0, T0~ and T0-", "rep", "quiver", "w1")
    limit = add("limit", "invariant record of the t -> 0 limit", "rep", "quiver", "w1")
    limit.add_argument("--t", type=float, help="also report the gap to lambda(t) r")
    add("solve", "Gauss-Newton solve of mu = 0", "rep", "quiver", "v", "w", "w1")

    coproduct = sub.add_parser("coproduct", parents=[common], help="correspondence class operations")
    coproduct.add_argument("action", choices=["invert", "check", "coassoc"])
    coproduct.add_argument("--poset")
    coproduct.add_argument("--class", dest="class")
    coproduct.add_argument("--triple")

    coassoc = add("coassoc", "coassociativity criterion on generated quadruples", "v")
    coassoc.add_argument("--trials", type=int, default=50)

    add("tensor", "tensor product decomposition for an ADE type", "type", "lhs", "rhs")
    add("tensor-n", "tensor product multiplicity from quiver data", "quiver", "v1", "w1", "v2", "w2", "v0", "w")

    selftest = sub.add_parser("selftest", parents=[common], help="oracle-equivalence suite")
    selftest.add_argument("--quick", action="store_true")
    return parser


def _request(args: argparse.Namespace) -> dict[str, Any]:
    skip = {"command", "config", "log_level", "log_format", "max_iter", "quick", "trials", "t"}
    arguments = {k: v for k, v in vars(args).items() if v is not None and k not in skip}
    return {"command": args.command, "arguments": arguments}


def _load_config(args: argparse.Namespace) -> QuivarConfig:
    overrides = {
        "numerics.tol": args.tol,
        "numerics.length_cap": args.cap,
        "numerics.max_iter": args.max_iter,
        "run.seed": args.seed,
        "run.output_format": args.format,
        "logging.level": args.log_level,
        "logging.format": args.log_format,
    }
    return ConfigManager(args.config).load(overrides)


def _render(result: Any, fmt: str) -> str:
    if isinstance(result, str):
        return result
    if fmt == "dot":
        raise InvalidInputError("--format dot is only available for the poset command")
    if fmt == "table":
        return render_table(result)
    return dumps(result) + "\n"


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    configure_logging()
    try:
        config = _load_config(args)
        configure_logging(config.logging.level, config.logging.format)

        is_valid, error_msg = RequestValidator().validate_request(_request(args))
        if not is_valid:
            raise InvalidInputError(f"Validation failed: {error_msg}")

        logger.info(
            f"Running {args.command}",
            extra={"extra": {"command": args.command, "seed": config.run.seed, "tol": config.numerics.tol}},
        )
        result = COMMANDS[args.command](Context(args, config))
        sys.stdout.write(_render(result, config.run.output_format))
        sys.stdout.flush()
        if args.command == "selftest" and not result["ok"]:
            return 1
        return 0
    except QuivarError as e:
        logger.error(f"{args.command} failed: {e}")
        return e.exit_code
    except Exception as e:
        logger.error(f"{args.command} failed unexpectedly: {e}", exc_info=True)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
