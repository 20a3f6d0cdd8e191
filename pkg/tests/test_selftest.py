#!/usr/bin/env python3
"""
Tests for selftest and the oracles it compares against.
"""

import numpy as np
import pytest

import oracles
from quiver_core import load_quiver
from representation import FramingSplit, membership
from selftest import CHECKS, random_membership_case, run_selftest

# ---------------------------------------------------------------------------
# 1. Oracles on their own
# ---------------------------------------------------------------------------


class TestOracles:
    def test_clebsch_gordan(self):
        assert oracles.clebsch_gordan(2, 1) == {(1,): 1, (3,): 1}
        assert oracles.clebsch_gordan(0, 0) == {(0,): 1}

    def test_sl3_character_dimensions(self):
        assert sum(oracles.sl3_character(1, 0).values()) == 3
        assert sum(oracles.sl3_character(1, 1).values()) == 8
        assert sum(oracles.sl3_character(2, 0).values()) == 6

    def test_sl3_decompose(self):
        assert oracles.sl3_decompose((1, 0), (1, 0)) == {(0, 1): 1, (2, 0): 1}

    def test_partition_count(self):
        assert [oracles.partition_count(n) for n in range(6)] == [1, 1, 2, 3, 5, 7]

    def test_random_t0_rep_is_in_t0(self, rng):
        q = load_quiver("jordan")
        r, s = oracles.random_t0_rep(q, (1,), (1,), (1,), (1,), rng)
        assert isinstance(s, FramingSplit)
        assert membership(r, s).in_T0

    def test_numeric_variety_dim_of_a_point(self, rng):
        assert oracles.numeric_variety_dim(load_quiver("A1"), (0,), (1,), rng) == 0


# ---------------------------------------------------------------------------
# 2. Self-test runs
# ---------------------------------------------------------------------------


class TestSelftest:
    def test_check_names(self):
        assert set(CHECKS) == {
            "roots",
            "membership",
            "limits",
            "coproduct",
            "coassociativity",
            "tensor",
            "strata_counts",
            "swapped_summands",
            "attracting",
        }

    def test_membership_cases_stay_small(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            r, s = random_membership_case(load_quiver("A2"), rng)
            assert 1 <= sum(r.v) <= 4
            assert s.k == 2

    def test_swapped_summands_collide(self, rng):
        result = CHECKS["swapped_summands"](True, rng, 1e-9)
        assert result["collisions"] == result["trials"]
        assert result["fiber_counts"] == {"1,1": 4, "2": 2}
        assert result["ok"] is True

    @pytest.mark.timeout(300)
    def test_attracting_ranks_on_small_cases(self, rng):
        result = CHECKS["attracting"](True, rng, 1e-9)
        assert result["mismatched"] == []

    @pytest.mark.timeout(600)
    def test_quick_run_passes(self):
        result = run_selftest(quick=True, seed=3)
        assert result["quick"] is True
        assert result["seed"] == 3
        failing = [name for name, check in result["checks"].items() if not check["ok"]]
        assert failing == []
        assert result["ok"] is True

    @pytest.mark.acceptance
    @pytest.mark.timeout(3600)
    def test_full_run_passes(self):
        assert run_selftest(quick=False, seed=0)["ok"] is True
