"""
Root combinatorics of the symmetric Kac-Moody algebra attached to a quiver.

- reflect / fundamental_region_test: the two generators of the root set
- enumerate_roots: positive roots below a coordinate bound, tagged real or imaginary
- classify_type: finite / affine / indefinite from the Cartan matrix, with primitive delta
- simple_module_dims: the delta_k list used by the stratification (finite and affine only)
"""

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from math import gcd

import sympy

from errors import InvalidInputError, UnsupportedTypeError
from quiver_core import DimVector, Quiver, cartan_matrix, is_connected, leq

logger = logging.getLogger(__name__)


class QuiverType(str, Enum):
    FINITE = "finite"
    AFFINE = "affine"
    INDEFINITE = "indefinite"


@dataclass(frozen=True)
class TypeClass:
    kind: QuiverType
    delta: DimVector | None = None

    def to_dict(self) -> dict:
        data: dict = {"type": self.kind.value}
        if self.delta is not None:
            data["delta"] = list(self.delta)
        return data


@dataclass(frozen=True)
class RootList:
    """Positive roots up to a bound; `imaginary` is the subset with (v, v) <= 0."""

    bound: DimVector
    roots: frozenset[DimVector]
    imaginary: frozenset[DimVector]

    @property
    def real(self) -> frozenset[DimVector]:
        return self.roots - self.imaginary

    def sorted(self) -> list[DimVector]:
        return sorted(self.roots, key=lambda r: (sum(r), r))

    def to_dict(self) -> dict:
        return {
            "bound": list(self.bound),
            "roots": [
                {"root": list(r), "kind": "imaginary" if r in self.imaginary else "real"}
                for r in self.sorted()
            ],
        }


def _pairing(c, v: DimVector, i: int) -> int:
    return int(sum(int(c[i, j]) * v[j] for j in range(len(v))))


def reflect(q: Quiver, v: DimVector, i: int) -> DimVector:
    if not q.is_loop_free(i):
        raise InvalidInputError(f"Cannot reflect at vertex {q.vertices[i]}: it carries a loop")
    c = cartan_matrix(q)
    coefficient = _pairing(c, v, i)
    return tuple(x - coefficient if j == i else x for j, x in enumerate(v))


def fundamental_region_test(q: Quiver, v: DimVector) -> bool:
    if any(x < 0 for x in v):
        raise InvalidInputError(f"Fundamental region test needs a nonnegative vector, got {v}")
    if not any(v):
        raise InvalidInputError("Fundamental region test is undefined for the zero vector")
    support = [i for i, x in enumerate(v) if x > 0]
    if not is_connected(q, support):
        return False
    c = cartan_matrix(q)
    return all(_pairing(c, v, i) <= 0 for i in range(q.n))


def _saturate(q: Quiver, seeds: set[DimVector], box: DimVector | None) -> set[DimVector]:
    """Close `seeds` under reflections at loop-free vertices, staying positive and in `box`."""
    c = cartan_matrix(q)
    loop_free = [i for i in range(q.n) if q.is_loop_free(i)]
    found = set(seeds)
    frontier = list(seeds)
    while frontier:
        v = frontier.pop()
        for i in loop_free:
            coefficient = _pairing(c, v, i)
            if coefficient == 0:
                continue
            w = tuple(x - coefficient if j == i else x for j, x in enumerate(v))
            if any(x < 0 for x in w) or not any(w):
                continue
            if box is not None and not leq(w, box):
                continue
            if w not in found:
                found.add(w)
                frontier.append(w)
    return found


def _is_positive_definite(q: Quiver) -> bool:
    return bool(sympy.Matrix(cartan_matrix(q).tolist()).is_positive_definite) if q.n else True


def enumerate_roots(q: Quiver, bound: DimVector) -> RootList:
    bound = q.dim_vector(bound)
    internal = tuple(b + sum(bound) for b in bound)
    seeds = {q.coordinate(i) for i in range(q.n) if q.is_loop_free(i) and bound[i] >= 1}
    # a positive definite form leaves the fundamental region empty
    if not _is_positive_definite(q):
        for v in itertools.product(*(range(b + 1) for b in bound)):
            if any(v) and fundamental_region_test(q, v):
                seeds.add(tuple(v))
    closure = _saturate(q, seeds, internal)
    c = cartan_matrix(q)
    roots = frozenset(v for v in closure if leq(v, bound))
    imaginary = frozenset(v for v in roots if sum(v[i] * _pairing(c, v, i) for i in range(q.n)) <= 0)
    logger.debug(f"enumerate_roots bound={bound}: {len(roots)} roots, {len(imaginary)} imaginary")
    return RootList(bound=bound, roots=roots, imaginary=imaginary)


def positive_roots(q: Quiver) -> list[DimVector]:
    """All positive roots of a finite-type quiver, sorted by height."""
    if classify_type(q).kind is not QuiverType.FINITE:
        raise UnsupportedTypeError(f"Quiver {q.name or q.vertices} is not of finite type")
    closure = _saturate(q, {q.coordinate(i) for i in range(q.n)}, None)
    return sorted(closure, key=lambda r: (sum(r), r))


def _primitive(vector: list[sympy.Rational]) -> DimVector:
    denominators = [sympy.fraction(x)[1] for x in vector]
    scale = sympy.ilcm(1, *denominators) if denominators else 1
    ints = [int(x * scale) for x in vector]
    divisor = 0
    for x in ints:
        divisor = gcd(divisor, abs(x))
    ints = [x // divisor for x in ints]
    if sum(ints) < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def classify_type(q: Quiver) -> TypeClass:
    if not is_connected(q):
        raise InvalidInputError(f"Quiver {q.name or q.vertices} is not connected")
    matrix = sympy.Matrix(cartan_matrix(q).tolist())
    if matrix.is_positive_definite:
        return TypeClass(QuiverType.FINITE)
    if matrix.is_positive_semidefinite:
        kernel = matrix.nullspace()
        if len(kernel) == 1:
            delta = _primitive(list(kernel[0]))
            if all(x > 0 for x in delta):
                return TypeClass(QuiverType.AFFINE, delta)
    return TypeClass(QuiverType.INDEFINITE)


def simple_module_dims(q: Quiver, bound: DimVector) -> list[DimVector]:
    bound = q.dim_vector(bound)
    kind = classify_type(q)
    if kind.kind is QuiverType.INDEFINITE:
        raise UnsupportedTypeError(
            "Simple-module dimension vectors are only available for finite and affine quivers"
        )
    loop_free = [i for i in range(q.n) if q.is_loop_free(i)]
    result = [q.coordinate(i) for i in loop_free if bound[i] >= 1]
    if kind.kind is QuiverType.AFFINE and leq(kind.delta, bound):
        result.append(kind.delta)
    return result
