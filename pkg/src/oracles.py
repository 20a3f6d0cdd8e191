"""
Independent reference computations used by the test-suite and the selftest command.

Each oracle recomputes a library result by a different route:
- roots_by_descent: height-decreasing reflections down to a simple root or the fundamental region
- path_membership: explicit enumeration of every path word up to a length cap
- sl3 characters from semistandard tableaux, Clebsch-Gordan for sl2
- partition counts, numeric tangent dimensions at solver-found stable points
"""

import itertools
import logging
from collections import defaultdict

import numpy as np
import sympy

from quiver_core import DimVector, Quiver, cartan_matrix
from representation import (
    FramingSplit,
    Membership,
    Rep,
    find_stable_point,
    invariant_record,
    lambda_act,
    limit_invariants,
    tangent_dimension,
)
from subspaces import DEFAULT_TOL

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Roots
# ---------------------------------------------------------------------------


def _is_root_by_descent(q: Quiver, v: DimVector) -> tuple[bool, bool]:
    """(is_root, is_imaginary) for a nonzero nonnegative vector."""
    c = cartan_matrix(q)
    current = np.asarray(v, dtype=np.int64)
    while True:
        support = [i for i in range(q.n) if current[i] > 0]
        if len(support) == 1 and current[support[0]] == 1 and q.is_loop_free(support[0]):
            return True, False
        pairing = c @ current
        movable = [i for i in range(q.n) if q.is_loop_free(i) and pairing[i] > 0]
        if not movable:
            break
        i = movable[0]
        current = current.copy()
        current[i] -= pairing[i]
        if (current < 0).any():
            return False, False
    # terminal: fundamental region needs a connected support and nonpositive pairings
    support = {i for i in range(q.n) if current[i] > 0}
    seen, frontier = set(), [next(iter(support))]
    while frontier:
        i = frontier.pop()
        if i in seen:
            continue
        seen.add(i)
        for tail, head in q.orientation:
            t, h = q.vertices.index(tail), q.vertices.index(head)
            for x, y in ((t, h), (h, t)):
                if x == i and y in support and y not in seen:
                    frontier.append(y)
    in_region = seen == support and bool((c @ current <= 0).all())
    return in_region, in_region


def roots_by_descent(q: Quiver, bound: DimVector) -> tuple[set[DimVector], set[DimVector]]:
    """(roots, imaginary roots) with entries <= bound."""
    roots, imaginary = set(), set()
    for v in itertools.product(*(range(b + 1) for b in bound)):
        if not any(v):
            continue
        is_root, is_imaginary = _is_root_by_descent(q, v)
        if is_root:
            roots.add(tuple(v))
            if is_imaginary:
                imaginary.add(tuple(v))
    return roots, imaginary


# ---------------------------------------------------------------------------
# Membership
# ---------------------------------------------------------------------------


def path_membership(r: Rep, s: FramingSplit, cap: int | None = None, tol: float = DEFAULT_TOL) -> Membership:
    """Check the W^1 / W^2 blocks of every hub b B...B a with at most `cap` arrows."""
    s.check(r)
    r = r.to_complex()
    q = r.quiver
    if cap is None:
        cap = sum(r.v) ** 2
    t0 = t0_tilde = t0_minus = True

    def vanishes(block: np.ndarray, hub: np.ndarray) -> bool:
        if block.size == 0:
            return True
        scale = np.maximum(np.abs(hub).reshape(hub.shape[0], -1).max(axis=1), 1.0)
        return bool((np.abs(block).reshape(block.shape[0], -1).max(axis=1) <= tol * scale).all())

    for start in range(q.n):
        w1_cols, w2_cols = s.indices(start, [0]), s.indices(start, [1])
        # products B...B a_start for every word, batched along axis 0, grouped by end vertex
        layer = {start: r.a[start][np.newaxis, :, :]}
        for length in range(cap + 1):
            for end, products in layer.items():
                if products.shape[0] == 0:
                    continue
                hubs = np.matmul(r.b[end][np.newaxis, :, :], products)
                w1_rows, w2_rows = s.indices(end, [0]), s.indices(end, [1])
                t0 = t0 and vanishes(hubs[:, w1_rows, :][:, :, w2_cols], hubs)
                t0_minus = t0_minus and vanishes(hubs[:, w2_rows, :][:, :, w1_cols], hubs)
                t0_tilde = (
                    t0_tilde
                    and vanishes(hubs[:, :, w2_cols], hubs)
                    and vanishes(hubs[:, w1_rows, :], hubs)
                )
            if length == cap or not (t0 or t0_tilde or t0_minus):
                break
            extended: dict[int, list[np.ndarray]] = defaultdict(list)
            for end, products in layer.items():
                for arrow in q.arrows_out_of(end):
                    extended[arrow.head].append(np.matmul(r.B[arrow.id][np.newaxis, :, :], products))
            layer = {end: np.concatenate(chunks, axis=0) for end, chunks in extended.items()}
    return Membership(t0, t0_tilde, t0_minus)


def random_t0_rep(q: Quiver, v1: DimVector, v2: DimVector, w1: DimVector, w2: DimVector,
                  rng: np.random.Generator) -> tuple[Rep, FramingSplit]:
    """Random point of T0: V = V^1 + V^2 with V^2 B-stable, a(W^2) in V^2, b(V^2) in W^2."""
    v = tuple(x + y for x, y in zip(v1, v2))
    w = tuple(x + y for x, y in zip(w1, w2))
    r = Rep.random(q, v, w, rng)
    B = []
    for arrow in q.arrows:
        m = r.B[arrow.id].copy()
        m[: v1[arrow.head], v1[arrow.tail]:] = 0
        B.append(m)
    a, b = [], []
    for i in range(q.n):
        ai, bi = r.a[i].copy(), r.b[i].copy()
        ai[: v1[i], w1[i]:] = 0
        bi[: w1[i], v1[i]:] = 0
        a.append(ai)
        b.append(bi)
    return r.replace(B=B, a=a, b=b), FramingSplit.from_dims(w1, w2)


def limit_error(r: Rep, s: FramingSplit, t: float, cap: int) -> float:
    """Largest gap between the records of lambda(t) r and of the limit, relative to 1 + |entry of r|."""
    original = invariant_record(r, cap)
    moved = invariant_record(lambda_act(t, r, s), cap)
    limit = limit_invariants(r, s, cap)
    worst = 0.0
    for key, value in limit.traces.items():
        gap = abs(complex(moved.traces[key]) - complex(value))
        worst = max(worst, gap / (1.0 + abs(complex(original.traces[key]))))
    for key, hub in limit.hubs.items():
        if hub.size:
            gap = np.abs(moved.hubs[key].astype(complex) - hub.astype(complex))
            scale = 1.0 + np.abs(original.hubs[key].astype(complex))
            worst = max(worst, float((gap / scale).max()))
    return worst


# ---------------------------------------------------------------------------
# Characters
# ---------------------------------------------------------------------------


def clebsch_gordan(a: int, b: int) -> dict[tuple[int], int]:
    return {(c,): 1 for c in range(abs(a - b), a + b + 1, 2)}


def sl3_character(a: int, b: int) -> dict[tuple[int, int], int]:
    """Weights of V(a, b) from semistandard tableaux of shape (a + b, b) in 1, 2, 3."""
    length1, length2 = a + b, b
    weights: dict[tuple[int, int], int] = defaultdict(int)
    for c1 in range(length1 + 1):
        for c2 in range(length1 - c1 + 1):
            row1 = [1] * c1 + [2] * c2 + [3] * (length1 - c1 - c2)
            for d2 in range(length2 + 1):
                row2 = [2] * d2 + [3] * (length2 - d2)
                if any(row2[j] <= row1[j] for j in range(length2)):
                    continue
                counts = [row1.count(k) + row2.count(k) for k in (1, 2, 3)]
                weights[(counts[0] - counts[1], counts[1] - counts[2])] += 1
    return dict(weights)


def sl3_decompose(lam: tuple[int, int], mu: tuple[int, int]) -> dict[tuple[int, int], int]:
    left, right = sl3_character(*lam), sl3_character(*mu)
    product: dict[tuple[int, int], int] = defaultdict(int)
    for x, m in left.items():
        for y, n in right.items():
            product[(x[0] + y[0], x[1] + y[1])] += m * n
    result = {}
    while any(product.values()):
        top = max((nu for nu, m in product.items() if m), key=lambda nu: (nu[0] + nu[1], nu))
        count = product[top]
        result[top] = count
        for nu, m in sl3_character(*top).items():
            product[nu] -= count * m
    return dict(sorted(result.items()))


def partition_count(n: int) -> int:
    return int(sympy.npartitions(n))


# ---------------------------------------------------------------------------
# Dimensions
# ---------------------------------------------------------------------------


def numeric_variety_dim(q: Quiver, v: DimVector, w: DimVector, rng: np.random.Generator) -> int:
    """Tangent dimension at a solver-found stable point; 0 when v = 0."""
    if not any(v):
        return 0
    return tangent_dimension(find_stable_point(q, v, w, rng), tol=1e-7)
