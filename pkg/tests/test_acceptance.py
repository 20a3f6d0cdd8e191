#!/usr/bin/env python3
"""
End-to-end acceptance runs: each check compares the library with an independent
recomputation at full sample size.

Run with `pytest -m acceptance`; the default suite covers the same paths through the
quick selftest.
"""

import numpy as np
import pytest

import selftest

pytestmark = pytest.mark.acceptance


# ---------------------------------------------------------------------------
# 1. Jordan quiver: swapped pure summands
# ---------------------------------------------------------------------------


@pytest.mark.timeout(30)
def test_swapped_pure_summands_and_fiber_counts():
    result = selftest.check_swapped_summands(False, np.random.default_rng(0), 1e-9)
    assert result["collisions"] == result["trials"] >= 20
    assert result["fiber_counts"]["2"] == 2


# ---------------------------------------------------------------------------
# 2-7, 9. Oracle equivalence at full size
# ---------------------------------------------------------------------------


@pytest.mark.timeout(60)
def test_roots_match_descent():
    assert selftest.check_roots(False, np.random.default_rng(0), 1e-9)["ok"]


@pytest.mark.timeout(600)
def test_membership_matches_path_enumeration():
    result = selftest.check_membership(False, np.random.default_rng(0), 1e-9)
    assert result["trials"] >= 1000
    assert result["disagreements"] == 0


@pytest.mark.timeout(300)
def test_limits_converge():
    result = selftest.check_limits(False, np.random.default_rng(0), 1e-9)
    assert result["trials"] >= 100
    assert result["max_error"] < 1e-6


@pytest.mark.timeout(300)
def test_coproduct_algebra_is_exact():
    result = selftest.check_coproduct(False, np.random.default_rng(0), 1e-9)
    assert result["trials"] >= 500
    assert result["failures"] == 0


@pytest.mark.timeout(120)
def test_coassociativity_criterion():
    result = selftest.check_coassociativity(False, np.random.default_rng(0), 1e-9)
    assert result["family_failures"] == 0
    assert result["random_failure_rate"] >= 0.95


@pytest.mark.timeout(300)
def test_tensor_multiplicities():
    assert selftest.check_tensor(False, np.random.default_rng(0), 1e-9)["mismatched"] == []


@pytest.mark.timeout(30)
def test_jordan_strata_counts():
    assert selftest.check_strata_counts(False, np.random.default_rng(0), 1e-9)["ok"]


# ---------------------------------------------------------------------------
# 8. Attracting ranks against numeric tangent dimensions
# ---------------------------------------------------------------------------


@pytest.mark.timeout(600)
def test_attracting_rank_is_half_the_numeric_codimension():
    result = selftest.check_attracting(False, np.random.default_rng(2024), 1e-9)
    assert result["cases"] == 4
    assert result["mismatched"] == []
