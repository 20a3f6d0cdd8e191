"""
Oracle-equivalence checks run by `quivar selftest`.

Every check compares a library computation with an independent recomputation from
oracles.py and reports counts; `quick` shrinks the sample sizes.
"""

import itertools
import logging
import time
from collections.abc import Callable
from typing import Any

import numpy as np

import oracles
from coproduct import (
    ComponentPoset,
    TriplePoset,
    coassoc_check,
    delta_c,
    invert,
    random_algebra_element,
    random_class,
    random_triple_class,
    shared_family,
)
from quiver_core import add, dynkin_quiver, load_quiver
from representation import FramingSplit, Rep, direct_sum, invariant_record, membership, records_equal
from root_system import enumerate_roots
from strata import (
    attracting_rank,
    fixed_components,
    sigma_fiber_count,
    strata_of_fixed_locus,
    strata_of_M0,
    triple_components,
)
from subspaces import DEFAULT_TOL, fraction_array, fraction_identity
from tensor_ade import multiplicity_n, tensor_decompose

logger = logging.getLogger(__name__)


def _random_split_dims(n: int, total: int, rng: np.random.Generator) -> tuple[int, ...]:
    dims = [0] * n
    for _ in range(total):
        dims[int(rng.integers(n))] += 1
    return tuple(dims)


def random_membership_case(q, rng: np.random.Generator, max_total: int = 4) -> tuple[Rep, FramingSplit]:
    """Half generic reps, half points of T0, with sum(v) <= max_total and w^1, w^2 in {0, 1}."""
    total = int(rng.integers(1, max_total + 1))
    v = _random_split_dims(q.n, total, rng)
    w1 = tuple(int(x) for x in rng.integers(0, 2, size=q.n))
    w2 = tuple(int(x) for x in rng.integers(0, 2, size=q.n))
    if rng.random() < 0.5:
        v1 = tuple(int(rng.integers(0, x + 1)) for x in v)
        v2 = tuple(x - y for x, y in zip(v, v1))
        return oracles.random_t0_rep(q, v1, v2, w1, w2, rng)
    w = tuple(x + y for x, y in zip(w1, w2))
    return Rep.random(q, v, w, rng), FramingSplit.from_dims(w1, w2)


def check_roots(quick: bool, rng: np.random.Generator, tol: float) -> dict[str, Any]:
    names = ("A2", "affine_A1") if quick else ("A2", "A3", "D4", "affine_A1")
    mismatched = []
    for name in names:
        q = load_quiver(name)
        bound = (3,) * q.n
        found = enumerate_roots(q, bound)
        roots, imaginary = oracles.roots_by_descent(q, bound)
        if set(found.roots) != roots or set(found.imaginary) != imaginary:
            mismatched.append(name)
    return {"ok": not mismatched, "quivers": list(names), "mismatched": mismatched}


def check_membership(quick: bool, rng: np.random.Generator, tol: float) -> dict[str, Any]:
    trials = 60 if quick else 1000
    quivers = [load_quiver(name) for name in ("jordan", "A2", "affine_A1")]
    disagreements = 0
    for k in range(trials):
        r, s = random_membership_case(quivers[k % len(quivers)], rng)
        if membership(r, s, tol) != oracles.path_membership(r, s, tol=tol):
            disagreements += 1
    return {"ok": disagreements == 0, "trials": trials, "disagreements": disagreements}


def check_limits(quick: bool, rng: np.random.Generator, tol: float) -> dict[str, Any]:
    trials = 10 if quick else 100
    t = 1e-6
    quivers = [load_quiver(name) for name in ("jordan", "A2")]
    worst = 0.0
    for k in range(trials):
        q = quivers[k % len(quivers)]
        v1 = _random_split_dims(q.n, int(rng.integers(0, 2)), rng)
        v2 = _random_split_dims(q.n, int(rng.integers(1, 3)), rng)
        w1 = tuple(int(x) for x in rng.integers(0, 2, size=q.n))
        w2 = tuple(int(x) for x in rng.integers(0, 2, size=q.n))
        r, s = oracles.random_t0_rep(q, v1, v2, w1, w2, rng)
        worst = max(worst, oracles.limit_error(r, s, t, sum(r.v) ** 2))
    return {"ok": worst < 1e-6, "trials": trials, "t": t, "max_error": worst}


def check_coproduct(quick: bool, rng: np.random.Generator, tol: float) -> dict[str, Any]:
    trials = 50 if quick else 500
    failures = 0
    for _ in range(trials):
        size = int(rng.integers(1, 7))
        dims = tuple(int(x) for x in rng.integers(1, 4, size=size))
        order = frozenset(
            (i, j) for i, j in itertools.combinations(range(size), 2) if rng.random() < 0.6
        )
        poset = ComponentPoset(tuple(f"c{i}" for i in range(size)), dims, order)
        c = random_class(poset, rng)
        c_inv = invert(c)
        identity = fraction_identity(poset.total_dim)
        x, y = random_algebra_element(poset, rng), random_algebra_element(poset, rng)
        ok = (
            np.array_equal(c_inv.matrix @ c.matrix, identity)
            and np.array_equal(c.matrix @ c_inv.matrix, identity)
            and np.array_equal(delta_c(c, identity), identity)
            and np.array_equal(delta_c(c, x.matrix @ y.matrix), delta_c(c, x) @ delta_c(c, y))
        )
        failures += not ok
    return {"ok": failures == 0, "trials": trials, "failures": failures}


def check_coassociativity(quick: bool, rng: np.random.Generator, tol: float) -> dict[str, Any]:
    trials = 20 if quick else 200
    poset = TriplePoset(tuple(triple_components((2,), (1,), (1,), (1,))))
    family_failures = sum(not coassoc_check(*shared_family(poset, rng)) for _ in range(trials))
    random_failures = 0
    for _ in range(trials):
        quadruple = [
            random_triple_class(poset, pattern, rng, density=1.0)
            for pattern in ("12,3", "1,23", "(1,2),3", "1,(2,3)")
        ]
        random_failures += not coassoc_check(*quadruple)
    rate = random_failures / trials
    return {
        "ok": family_failures == 0 and rate >= 0.95,
        "trials": trials,
        "family_failures": family_failures,
        "random_failure_rate": rate,
    }


def check_tensor(quick: bool, rng: np.random.Generator, tol: float) -> dict[str, Any]:
    top = 1 if quick else 2
    a1, a2 = dynkin_quiver("A1"), dynkin_quiver("A2")
    mismatched = []
    for a, b in itertools.product(range(7), repeat=2):
        for c in range(a + b + 1):
            if (a + b - c) % 2:
                continue
            # V(c) is the weight of v0 = (a + b - c) / 2 at w = a + b
            n = multiplicity_n(a1, (0,), (a,), (0,), (b,), ((a + b - c) // 2,), (a + b,))
            if n != oracles.clebsch_gordan(a, b).get((c,), 0):
                mismatched.append([[a], [b], [c]])
    for lam in itertools.product(range(top + 1), repeat=2):
        for mu in itertools.product(range(top + 1), repeat=2):
            if tensor_decompose(a2, lam, mu) != oracles.sl3_decompose(lam, mu):
                mismatched.append([list(lam), list(mu)])
    return {"ok": not mismatched, "mismatched": mismatched}


def check_strata_counts(quick: bool, rng: np.random.Generator, tol: float) -> dict[str, Any]:
    q = load_quiver("jordan")
    mismatched = []
    for v in range(5):
        expected = sum(oracles.partition_count(j) for j in range(v + 1))
        if len(strata_of_M0(q, (v,), (1,))) != expected:
            mismatched.append(v)
    return {"ok": not mismatched, "mismatched": mismatched}


def _pure_point(q, x: int, y: int) -> Rep:
    """Unframed Jordan rep at the point (x, y) of C^2."""
    return Rep(
        q,
        (1,),
        (0,),
        (fraction_array([[x]]), fraction_array([[y]])),
        (fraction_array([], (1, 0)),),
        (fraction_array([], (0, 1)),),
    )


def check_swapped_summands(quick: bool, rng: np.random.Generator, tol: float) -> dict[str, Any]:
    """Framed Jordan points that differ by swapping their W = 0 summands have equal records."""
    trials = 5 if quick else 20
    q = load_quiver("jordan")
    framed = Rep.zero(q, (0,), (1,), exact=True)
    collisions = 0
    for _ in range(trials):
        p1, p2 = (_pure_point(q, *(int(x) for x in rng.integers(-5, 6, size=2))) for _ in range(2))
        r1 = direct_sum(direct_sum(framed, p1), direct_sum(framed, p2))
        r2 = direct_sum(direct_sum(framed, p2), direct_sum(framed, p1))
        collisions += records_equal(invariant_record(r1), invariant_record(r2), tol)
    counts = {
        t.lam: sigma_fiber_count(q, t)
        for t in strata_of_fixed_locus(q, (2,), (1,), (1,))
        if t.v1 == t.v2 == (0,)
    }
    return {
        "ok": collisions == trials and counts[((2,),)] == 2 and counts[((1, 1),)] == 4,
        "trials": trials,
        "collisions": collisions,
        "fiber_counts": {",".join(map(str, lam[0])): n for lam, n in counts.items()},
    }


def check_attracting(quick: bool, rng: np.random.Generator, tol: float) -> dict[str, Any]:
    """attracting_rank against half the numeric codimension from the rank of d mu."""
    cases = [("A1", (1,), (1,), (1,)), ("jordan", (1,), (1,), (1,))]
    if not quick:
        cases += [("A2", (1, 0), (1, 0), (1, 0)), ("jordan", (2,), (1,), (1,))]
    mismatched = []
    for name, v, w1, w2 in cases:
        q = load_quiver(name)
        total = oracles.numeric_variety_dim(q, v, add(w1, w2), rng)
        for c in fixed_components(v, w1, w2):
            component = oracles.numeric_variety_dim(q, c.v1, c.w1, rng) + oracles.numeric_variety_dim(
                q, c.v2, c.w2, rng
            )
            if total - component != 2 * attracting_rank(q, c):
                mismatched.append([name, c.label()])
    return {"ok": not mismatched, "cases": len(cases), "mismatched": mismatched}


CHECKS: dict[str, Callable[[bool, np.random.Generator, float], dict[str, Any]]] = {
    "roots": check_roots,
    "membership": check_membership,
    "limits": check_limits,
    "coproduct": check_coproduct,
    "coassociativity": check_coassociativity,
    "tensor": check_tensor,
    "strata_counts": check_strata_counts,
    "swapped_summands": check_swapped_summands,
    "attracting": check_attracting,
}


def run_selftest(quick: bool = False, seed: int = 0, tol: float = DEFAULT_TOL) -> dict[str, Any]:
    rng = np.random.default_rng(seed)
    results: dict[str, Any] = {}
    for name, check in CHECKS.items():
        started = time.perf_counter()
        results[name] = check(quick, rng, tol)
        logger.info(f"selftest {name}: ok={results[name]['ok']} in {time.perf_counter() - started:.2f}s")
    return {"ok": all(r["ok"] for r in results.values()), "quick": quick, "seed": seed, "checks": results}
