"""
Weight multiplicities and tensor product decompositions for ADE quivers.

Weights are integer tuples in the fundamental-weight basis; roots are in the simple-root
basis and enter weights through the Cartan matrix. Characters come from Freudenthal's
recursion and products are decomposed by repeatedly removing the highest dominant term.
"""

import logging
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache

import numpy as np
import sympy

from errors import InvalidInputError, NonDominantWeightError, UnsupportedTypeError
from quiver_core import DimVector, Quiver, add, cartan_matrix
from root_system import QuiverType, classify_type, positive_roots

logger = logging.getLogger(__name__)

Weight = tuple[int, ...]


def _require_ade(q: Quiver) -> None:
    if classify_type(q).kind is not QuiverType.FINITE:
        raise UnsupportedTypeError(f"Quiver {q.name or q.vertices} is not of ADE type")


def _require_dominant(weight: Weight) -> None:
    if any(x < 0 for x in weight):
        raise NonDominantWeightError(f"Weight {weight} is not dominant")


def _as_weight(q: Quiver, weight) -> Weight:
    weight = tuple(int(x) for x in weight)
    if len(weight) != q.n:
        raise InvalidInputError(f"Weight {weight} does not have {q.n} coordinates")
    return weight


def weight_of(q: Quiver, v: DimVector, w: DimVector) -> Weight:
    _require_ade(q)
    v, w = q.dim_vector(v), q.dim_vector(w)
    return tuple(int(x) for x in np.asarray(w) - cartan_matrix(q) @ np.asarray(v))


def _pair(x: Weight, root: DimVector) -> int:
    return sum(a * b for a, b in zip(x, root))


def dimension(q: Quiver, weight: Weight) -> int:
    """Weyl dimension formula."""
    _require_ade(q)
    weight = _as_weight(q, weight)
    _require_dominant(weight)
    result = Fraction(1)
    for root in positive_roots(q):
        result *= Fraction(sum((x + 1) * a for x, a in zip(weight, root)), sum(root))
    return int(result)


@lru_cache(maxsize=256)
def _character(q: Quiver, highest: Weight) -> dict[Weight, int]:
    c = cartan_matrix(q)
    roots = positive_roots(q)
    root_weights = [tuple(int(x) for x in c @ np.asarray(r)) for r in roots]
    depth: dict[Weight, DimVector] = {highest: q.zero()}
    mult: dict[Weight, int] = {highest: 1}
    level = [highest]
    while level:
        candidates: dict[Weight, DimVector] = {}
        for mu in level:
            for i in range(q.n):
                nu = tuple(int(x) for x in np.asarray(mu) - c[:, i])
                if nu not in depth:
                    candidates[nu] = tuple(x + (1 if j == i else 0) for j, x in enumerate(depth[mu]))
        next_level = []
        for nu, n in sorted(candidates.items()):
            denominator = 2 * sum(k * (x + 1) for k, x in zip(n, highest)) - int(np.asarray(n) @ c @ np.asarray(n))
            total = 0
            for root, root_w in zip(roots, root_weights):
                k = 1
                while all(nj - k * rj >= 0 for nj, rj in zip(n, root)):
                    shifted = tuple(x + k * y for x, y in zip(nu, root_w))
                    total += mult.get(shifted, 0) * _pair(shifted, root)
                    k += 1
            value = 0
            if denominator > 0 and total:
                value, remainder = divmod(2 * total, denominator)
                if remainder:
                    raise ArithmeticError(f"Freudenthal recursion gave a fractional multiplicity at {nu}")
            depth[nu] = n
            if value > 0:
                mult[nu] = value
                next_level.append(nu)
        level = next_level
    return mult


def weight_multiplicities(q: Quiver, weight: Weight) -> dict[Weight, int]:
    _require_ade(q)
    weight = _as_weight(q, weight)
    _require_dominant(weight)
    return dict(_character(q, weight))


def dominant_character(q: Quiver, weight: Weight) -> dict[Weight, int]:
    return {mu: m for mu, m in weight_multiplicities(q, weight).items() if all(x >= 0 for x in mu)}


@lru_cache(maxsize=32)
def _inverse_cartan(q: Quiver) -> sympy.Matrix:
    return sympy.Matrix(cartan_matrix(q).tolist()).inv()


def _height(q: Quiver, weight: Weight) -> sympy.Rational:
    return sum(_inverse_cartan(q) * sympy.Matrix(list(weight)))


def tensor_decompose(q: Quiver, lam: Weight, mu: Weight) -> dict[Weight, int]:
    _require_ade(q)
    lam, mu = _as_weight(q, lam), _as_weight(q, mu)
    _require_dominant(lam)
    _require_dominant(mu)
    product: dict[Weight, int] = defaultdict(int)
    right = weight_multiplicities(q, mu)
    for nu1, m1 in weight_multiplicities(q, lam).items():
        for nu2, m2 in right.items():
            total = add(nu1, nu2)
            if all(x >= 0 for x in total):
                product[total] += m1 * m2
    result: dict[Weight, int] = {}
    while any(product.values()):
        top = max((nu for nu, m in product.items() if m), key=lambda nu: (_height(q, nu), nu))
        count = product[top]
        if count < 0:
            raise ArithmeticError(f"Negative coefficient {count} while peeling {top}")
        result[top] = count
        for nu, m in dominant_character(q, top).items():
            product[nu] -= count * m
    logger.debug(f"tensor_decompose {lam} x {mu}: {len(result)} summands")
    return dict(sorted(result.items()))


def multiplicity_n(
    q: Quiver,
    v1: DimVector,
    w1: DimVector,
    v2: DimVector,
    w2: DimVector,
    v0: DimVector,
    w: DimVector,
) -> int:
    """Copies of V(w - C v0) in V(w1 - C v1) x V(w2 - C v2)."""
    _require_ade(q)
    if q.dim_vector(w) != add(q.dim_vector(w1), q.dim_vector(w2)):
        raise InvalidInputError(f"w = {w} is not w1 + w2 = {add(w1, w2)}")
    target = weight_of(q, v0, w)
    left, right = weight_of(q, v1, w1), weight_of(q, v2, w2)
    for weight in (target, left, right):
        _require_dominant(weight)
    return tensor_decompose(q, left, right).get(target, 0)
