#!/usr/bin/env python3
"""
Tests for the quivar MCP server tool layer.

fastmcp is stubbed at import time so the tools can be called as plain functions;
conftest.py restores sys.modules after this module is collected.
"""

import asyncio
import json
import sys
import types

import pytest


class _StubFastMCP:
    def __init__(self, *args, **kwargs):
        self.lifespan = kwargs.get("lifespan")
        self._tools: dict = {}

    def tool(self, *args, **kwargs):
        def decorator(fn):
            self._tools[fn.__name__] = fn
            return fn
        return decorator

    def run(self, *args, **kwargs):
        raise AssertionError("the server must not start under test")


_fake_fastmcp = types.ModuleType("fastmcp")
_fake_fastmcp.FastMCP = _StubFastMCP  # type: ignore[attr-defined]
sys.modules["fastmcp"] = _fake_fastmcp
sys.modules.pop("quivar_server", None)

import quivar_server as server  # noqa: E402

# ---------------------------------------------------------------------------
# 1. Registration and lifespan
# ---------------------------------------------------------------------------


class TestRegistration:
    def test_tools_are_registered(self):
        assert set(server.mcp._tools) == {
            "quivar_type",
            "quivar_roots",
            "quivar_strata",
            "quivar_fixed",
            "quivar_sigma_fibers",
            "quivar_mu",
            "quivar_stable",
            "quivar_member",
            "quivar_class_check",
            "quivar_tensor",
            "quivar_tensor_n",
            "quivar_selftest",
            "health_live",
            "health_ready",
        }

    def test_lifespan_yields_empty_state(self):
        async def enter():
            async with server.app_lifespan(server.mcp) as state:
                return state

        assert asyncio.run(enter()) == {}

    def test_health(self):
        live = server.health_live()
        assert live["status"] == "ok"
        assert live["version"] == server.__version__
        assert server.health_ready() == {"status": "ok"}


# ---------------------------------------------------------------------------
# 2. Tool results
# ---------------------------------------------------------------------------


class TestTools:
    def test_type(self):
        assert server.quivar_type(quiver="affine_A1") == {"type": "affine", "delta": [1, 1]}

    def test_roots(self):
        result = server.quivar_roots(quiver="A2", bound="1,1")
        assert len(result["roots"]) == 3

    def test_strata(self):
        result = server.quivar_strata(quiver="jordan", v="3", w="1")
        assert result["count"] == 7

    def test_fixed(self):
        result = server.quivar_fixed(quiver="jordan", v="2", w1="1", w2="1")
        assert [c["label"] for c in result["components"]] == ["(0|2)", "(1|1)", "(2|0)"]
        assert len(result["hasse"]) == 2
        assert {c["label"]: c["dim"] for c in result["poset"]["components"]} == {"(0|2)": 1, "(1|1)": 2, "(2|0)": 1}

    def test_sigma_fibers(self):
        assert len(server.quivar_sigma_fibers(quiver="jordan", v="2", w1="1", w2="1")["strata"]) == 7

    def test_tensor(self):
        result = server.quivar_tensor(type="A1", lhs="2", rhs="1")
        assert result["summands"] == [
            {"weight": [1], "multiplicity": 1, "dimension": 2},
            {"weight": [3], "multiplicity": 1, "dimension": 4},
        ]

    def test_tensor_n(self):
        assert server.quivar_tensor_n(quiver="A1", v1="0", w1="2", v2="0", w2="1", v0="1") == {"n": 1}

    def test_results_are_json_serializable(self):
        json.dumps(server.quivar_fixed(quiver="A2", v="1,1", w1="1,0", w2="0,1"))


class TestRepresentationTools:
    def test_mu(self, fixtures_dir):
        result = server.quivar_mu(rep=str(fixtures_dir / "a2_complex.json"))
        assert set(result["mu"]) == {"0", "1"}
        assert result["residual"] > 0

    def test_stable(self, fixtures_dir):
        assert server.quivar_stable(rep=str(fixtures_dir / "jordan_t0.json")) == {"stable": True}

    def test_member(self, fixtures_dir):
        result = server.quivar_member(rep=str(fixtures_dir / "jordan_t0.json"))
        assert result == {"in_T0": True, "in_T0_tilde": True, "in_T0_minus": False}

    def test_member_without_split(self, fixtures_dir):
        result = server.quivar_member(rep=str(fixtures_dir / "a2_complex.json"))
        assert result["exit_code"] == 2
        assert "framing split" in result["error"]

    def test_member_with_w1(self, fixtures_dir):
        result = server.quivar_member(rep=str(fixtures_dir / "a2_complex.json"), w1="1,0")
        assert set(result) == {"in_T0", "in_T0_tilde", "in_T0_minus"}

    def test_class_check(self, fixtures_dir):
        result = server.quivar_class_check(
            poset=str(fixtures_dir / "poset.json"), class_=str(fixtures_dir / "class_upper.json")
        )
        assert result == {"valid": True, "splitting": True}

    def test_class_invert(self, fixtures_dir):
        result = server.quivar_class_check(
            poset=str(fixtures_dir / "poset.json"), class_=str(fixtures_dir / "class_upper.json"), action="invert"
        )
        blocks = {(b["beta"], b["alpha"]): b["entries"] for b in result["inverse"]["blocks"]}
        assert blocks[("x", "y")] == [[-2, 1], [1, 3]]

    def test_invalid_class_is_reported(self, fixtures_dir):
        result = server.quivar_class_check(
            poset=str(fixtures_dir / "poset.json"), class_=str(fixtures_dir / "class_bad.json"), action="invert"
        )
        assert result["exit_code"] == 2

    def test_rep_path_must_be_json(self):
        result = server.quivar_mu(rep="/etc/passwd")
        assert result["error"].startswith("Validation failed")


# ---------------------------------------------------------------------------
# 3. Validation and error payloads
# ---------------------------------------------------------------------------


class TestErrors:
    def test_rejects_shell_metacharacters(self):
        result = server.quivar_type(quiver="A2; rm -rf /")
        assert result["error"].startswith("Validation failed")

    def test_rejects_bad_weight(self):
        result = server.quivar_tensor(type="A2", lhs="1,x", rhs="0,1")
        assert "Invalid weight" in result["error"]

    def test_unsupported_type_carries_exit_code(self, tmp_path):
        path = tmp_path / "kronecker3.json"
        path.write_text(json.dumps({"vertices": ["0", "1"], "edges": [["0", "1"]] * 3}))
        result = server.quivar_strata(quiver=str(path), v="1,1", w="1,0")
        assert result["exit_code"] == 3

    def test_invalid_input_carries_exit_code(self):
        result = server.quivar_strata(quiver="A2", v="1,1,1", w="1,0")
        assert result["exit_code"] == 2
        assert "expected 2" in result["error"]

    def test_unexpected_failures_are_generic(self, monkeypatch):
        def boom(q):
            raise RuntimeError("secret detail")

        monkeypatch.setattr(server, "classify_type", boom)
        result = server.quivar_type(quiver="A2")
        assert result == {"error": "Tool 'quivar_type' execution failed. Check server logs for details."}


# ---------------------------------------------------------------------------
# 4. Async selftest tool
# ---------------------------------------------------------------------------


class TestSelftestTool:
    @pytest.mark.asyncio
    async def test_runs_off_the_event_loop(self, monkeypatch):
        calls = []

        def fake_selftest(quick, seed, tol):
            calls.append((quick, seed, tol))
            return {"ok": True, "quick": quick, "seed": seed, "checks": {}}

        monkeypatch.setattr(server, "run_selftest", fake_selftest)
        result = await server.quivar_selftest(quick=True, seed=5)
        assert result["ok"] is True
        assert calls == [(True, 5, server.config.numerics.tol)]

    @pytest.mark.asyncio
    async def test_seed_defaults_to_config(self, monkeypatch):
        monkeypatch.setattr(server, "run_selftest", lambda quick, seed, tol: {"seed": seed})
        assert (await server.quivar_selftest(quick=True))["seed"] == server.config.run.seed

    @pytest.mark.asyncio
    async def test_seed_is_validated(self):
        result = await server.quivar_selftest(quick=True, seed=2**40)
        assert "Seed" in result["error"]
