"""
Fixed-point components, their poset, and the stratifications of the affine quotients.

- fixed_components / compare / linear_extension: components (v1, v2) of the C*-fixed locus
- attracting_rank and the related dimension bookkeeping
- strata_of_M0 / strata_of_fixed_locus: (v0, partitions) indices over the delta_k list
- sigma_fiber_count: preimage count of a fixed-locus stratum under the direct-sum map

No emptiness filtering is done: strata whose regular part may be empty are still listed.
"""

import itertools
import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np
from sympy.utilities.iterables import partitions as _sympy_partitions

from errors import InvalidInputError, UnsupportedTypeError
from quiver_core import DimVector, Quiver, add, cartan_matrix, leq, sub
from root_system import QuiverType, classify_type, simple_module_dims

logger = logging.getLogger(__name__)

Partition = tuple[int, ...]


class Order(str, Enum):
    LT = "LT"
    GT = "GT"
    EQ = "EQ"
    INCOMPARABLE = "INCOMPARABLE"


@dataclass(frozen=True)
class FixedComponent:
    v1: DimVector
    v2: DimVector
    w1: DimVector
    w2: DimVector

    @property
    def v(self) -> DimVector:
        return add(self.v1, self.v2)

    def swapped(self) -> "FixedComponent":
        return FixedComponent(self.v2, self.v1, self.w2, self.w1)

    def label(self) -> str:
        return f"({','.join(map(str, self.v1))}|{','.join(map(str, self.v2))})"

    def to_dict(self) -> dict:
        return {"v1": list(self.v1), "v2": list(self.v2), "w1": list(self.w1), "w2": list(self.w2)}


@dataclass(frozen=True)
class StratumIndex:
    """v0 plus one partition per delta_k; real-root factors carry the collapsed partition (n,)."""

    v0: DimVector
    lam: tuple[Partition, ...]
    deltas: tuple[DimVector, ...]

    def to_dict(self) -> dict:
        return {"v0": list(self.v0), "lambda": [list(p) for p in self.lam], "deltas": [list(d) for d in self.deltas]}

    def label(self) -> str:
        """v0, then delta:partition for every nonempty partition, e.g. "0;1:1,1"."""
        parts = [
            f"{','.join(map(str, d))}:{','.join(map(str, p))}" for p, d in zip(self.lam, self.deltas) if p
        ]
        return ";".join([",".join(map(str, self.v0))] + parts)


@dataclass(frozen=True)
class FixedStratumIndex:
    v1: DimVector
    v2: DimVector
    lam: tuple[Partition, ...]
    deltas: tuple[DimVector, ...]

    def to_dict(self) -> dict:
        return {
            "v1": list(self.v1),
            "v2": list(self.v2),
            "lambda": [list(p) for p in self.lam],
            "deltas": [list(d) for d in self.deltas],
        }


@dataclass(frozen=True)
class TripleComponent:
    v1: DimVector
    v2: DimVector
    v3: DimVector

    def label(self) -> str:
        return "|".join(",".join(map(str, x)) for x in (self.v1, self.v2, self.v3))


# ---------------------------------------------------------------------------
# Components and their order
# ---------------------------------------------------------------------------


def _splits(v: DimVector) -> Iterator[DimVector]:
    return itertools.product(*(range(x + 1) for x in v))


def fixed_components(v: DimVector, w1: DimVector, w2: DimVector) -> list[FixedComponent]:
    """All v = v1 + v2, starting from v1 = v and descending lexicographically in v1."""
    v, w1, w2 = tuple(v), tuple(w1), tuple(w2)
    if not (len(v) == len(w1) == len(w2)):
        raise InvalidInputError("v, w1 and w2 must have the same length")
    v1s = sorted((tuple(x) for x in _splits(v)), reverse=True)
    return [FixedComponent(v1, sub(v, v1), w1, w2) for v1 in v1s]


def triple_components(v: DimVector, w1: DimVector, w2: DimVector, w3: DimVector) -> list[TripleComponent]:
    v = tuple(v)
    result = []
    for v1 in _splits(v):
        rest = sub(v, v1)
        for v2 in _splits(rest):
            result.append(TripleComponent(tuple(v1), tuple(v2), sub(rest, v2)))
    return sorted(result, key=lambda t: (t.v1, t.v2))


def compare(alpha: FixedComponent, beta: FixedComponent) -> Order:
    if alpha.v != beta.v or alpha.w1 != beta.w1 or alpha.w2 != beta.w2:
        raise InvalidInputError(f"Components {alpha.label()} and {beta.label()} have different ambient data")
    if alpha.v1 == beta.v1:
        return Order.EQ
    if leq(alpha.v1, beta.v1):
        return Order.LT
    if leq(beta.v1, alpha.v1):
        return Order.GT
    return Order.INCOMPARABLE


def linear_extension(components: Sequence[FixedComponent]) -> list[FixedComponent]:
    """Lexicographic order on v1 extends the componentwise order."""
    return sorted(components, key=lambda c: c.v1)


def down_set(alpha: FixedComponent, components: Sequence[FixedComponent]) -> list[FixedComponent]:
    return [c for c in components if compare(c, alpha) in (Order.LT, Order.EQ)]


def strict_down_set(alpha: FixedComponent, components: Sequence[FixedComponent]) -> list[FixedComponent]:
    return [c for c in components if compare(c, alpha) is Order.LT]


def hasse_edges(components: Sequence[FixedComponent]) -> list[tuple[FixedComponent, FixedComponent]]:
    """Covering pairs (lower, upper) of the component poset."""
    edges = []
    for lower, upper in itertools.permutations(components, 2):
        if compare(lower, upper) is not Order.LT:
            continue
        between = any(
            compare(lower, mid) is Order.LT and compare(mid, upper) is Order.LT for mid in components
        )
        if not between:
            edges.append((lower, upper))
    return sorted(edges, key=lambda e: (e[0].v1, e[1].v1))


# ---------------------------------------------------------------------------
# Dimensions
# ---------------------------------------------------------------------------


def quiver_variety_dim(q: Quiver, v: DimVector, w: DimVector) -> int:
    """2 v.w - v^T C v."""
    va, wa = np.asarray(v, dtype=np.int64), np.asarray(w, dtype=np.int64)
    return int(2 * va @ wa - va @ cartan_matrix(q) @ va)


def _require_tame(q: Quiver) -> QuiverType:
    kind = classify_type(q).kind
    if kind is QuiverType.INDEFINITE:
        raise UnsupportedTypeError("Stratification data is only available for finite and affine quivers")
    return kind


def component_dim(q: Quiver, alpha: FixedComponent) -> int:
    return quiver_variety_dim(q, alpha.v1, alpha.w1) + quiver_variety_dim(q, alpha.v2, alpha.w2)


def attracting_rank(q: Quiver, alpha: FixedComponent) -> int:
    """Half the codimension of the component in M(v, w1 + w2)."""
    _require_tame(q)
    codim = quiver_variety_dim(q, alpha.v, add(alpha.w1, alpha.w2)) - component_dim(q, alpha)
    if codim < 0 or codim % 2:
        raise InvalidInputError(f"Component {alpha.label()} has invalid codimension {codim}")
    return codim // 2


def attracting_cell_dim(q: Quiver, alpha: FixedComponent) -> int:
    return component_dim(q, alpha) + attracting_rank(q, alpha)


def lagrangian_check(q: Quiver, alpha: FixedComponent) -> bool:
    """The attracting cell is half-dimensional in M x M_alpha."""
    total = quiver_variety_dim(q, alpha.v, add(alpha.w1, alpha.w2)) + component_dim(q, alpha)
    return 2 * attracting_cell_dim(q, alpha) == total


# ---------------------------------------------------------------------------
# Stratifications
# ---------------------------------------------------------------------------


def partitions_of(n: int) -> list[Partition]:
    """Partitions of n as non-increasing tuples, in reverse lexicographic order."""
    if n == 0:
        return [()]
    result = []
    for p in _sympy_partitions(n):
        parts: list[int] = []
        for size, count in sorted(p.items(), reverse=True):
            parts.extend([size] * count)
        result.append(tuple(parts))
    return sorted(result, reverse=True)


def _is_imaginary(q: Quiver, delta: DimVector) -> bool:
    d = np.asarray(delta, dtype=np.int64)
    return int(d @ cartan_matrix(q) @ d) <= 0


def _factor_fillings(q: Quiver, residual: DimVector, deltas: Sequence[DimVector]) -> list[tuple[Partition, ...]]:
    """All ways to write residual as sum |lambda_k| delta_k, partitions on imaginary factors only."""
    real = [k for k, d in enumerate(deltas) if not _is_imaginary(q, d)]
    imaginary = [k for k, d in enumerate(deltas) if _is_imaginary(q, d)]
    results = []

    def fill(k_pos: int, remaining: DimVector, chosen: dict[int, Partition]):
        if k_pos == len(imaginary):
            counts = dict(chosen)
            left = remaining
            for k in real:
                idx = deltas[k].index(1)
                n = left[idx]
                counts[k] = (n,) if n else ()
                left = sub(left, tuple(n * x for x in deltas[k]))
            if any(left):
                return
            results.append(tuple(counts[k] for k in range(len(deltas))))
            return
        k = imaginary[k_pos]
        m = 0
        while True:
            used = tuple(m * x for x in deltas[k])
            if not leq(used, remaining):
                break
            for lam in partitions_of(m):
                fill(k_pos + 1, sub(remaining, used), {**chosen, k: lam})
            m += 1

    if all(x >= 0 for x in residual):
        fill(0, residual, {})
    return results


def strata_of_M0(q: Quiver, v: DimVector, w: DimVector) -> list[StratumIndex]:
    v = q.dim_vector(v)
    q.dim_vector(w)
    kind = _require_tame(q)
    if kind is QuiverType.FINITE:
        return [StratumIndex(tuple(v0), (), ()) for v0 in _splits(v)]
    deltas = tuple(simple_module_dims(q, v))
    result = []
    for v0 in _splits(v):
        for lam in _factor_fillings(q, sub(v, v0), deltas):
            result.append(StratumIndex(tuple(v0), lam, deltas))
    return sorted(result, key=lambda s: (s.v0, s.lam))


def strata_of_fixed_locus(q: Quiver, v: DimVector, w1: DimVector, w2: DimVector) -> list[FixedStratumIndex]:
    v = q.dim_vector(v)
    q.dim_vector(w1)
    q.dim_vector(w2)
    kind = _require_tame(q)
    result = []
    if kind is QuiverType.FINITE:
        for v1 in _splits(v):
            for v2 in _splits(sub(v, v1)):
                result.append(FixedStratumIndex(tuple(v1), tuple(v2), (), ()))
        return sorted(result, key=lambda s: (s.v1, s.v2))
    deltas = tuple(simple_module_dims(q, v))
    for v1 in _splits(v):
        for v2 in _splits(sub(v, v1)):
            for lam in _factor_fillings(q, sub(sub(v, v1), v2), deltas):
                result.append(FixedStratumIndex(tuple(v1), tuple(v2), lam, deltas))
    return sorted(result, key=lambda s: (s.v1, s.v2, s.lam))


def sigma_fiber_count(q: Quiver, t: FixedStratumIndex) -> int:
    """Each part of each imaginary-factor partition goes to the left or right factor."""
    count = 1
    for lam, delta in zip(t.lam, t.deltas):
        if _is_imaginary(q, delta):
            count *= 2 ** len(lam)
    return count


def generic_fixed_stratum(q: Quiver, alpha: FixedComponent) -> FixedStratumIndex:
    """Fixed-locus stratum of a generic point of the component.

    Each factor keeps the part of v^i not covered by imaginary roots as its regular part;
    the rest becomes distinct points, so every imaginary partition is (1, ..., 1).
    """
    if _require_tame(q) is QuiverType.FINITE:
        return FixedStratumIndex(alpha.v1, alpha.v2, (), ())
    deltas = tuple(simple_module_dims(q, alpha.v))
    regular = [alpha.v1, alpha.v2]
    lam: list[Partition] = []
    for delta in deltas:
        points = 0
        if _is_imaginary(q, delta):
            for side in range(2):
                while leq(delta, regular[side]):
                    regular[side] = sub(regular[side], delta)
                    points += 1
        lam.append((1,) * points)
    return FixedStratumIndex(regular[0], regular[1], tuple(lam), deltas)


def sigma_image(t: FixedStratumIndex) -> StratumIndex:
    """Stratum of M0(v, w1 + w2) containing the direct sum of a point of t."""
    return StratumIndex(add(t.v1, t.v2), t.lam, t.deltas)


def split_multiplicity(q: Quiver, t: FixedStratumIndex, alpha: FixedComponent) -> int:
    """Left/right assignments of the parts of t whose left factor has dimension alpha.v1.

    Summed over the components with generic stratum t this is sigma_fiber_count(q, t).
    """
    choices = []
    for lam, delta in zip(t.lam, t.deltas):
        if _is_imaginary(q, delta):
            choices.extend([(delta, part) for part in lam])
    count = 0
    for sides in itertools.product((0, 1), repeat=len(choices)):
        left = t.v1
        for side, (delta, part) in zip(sides, choices):
            if side == 0:
                left = add(left, tuple(part * x for x in delta))
        count += left == alpha.v1
    return count


def stratum_dimension(q: Quiver, s: StratumIndex, w: DimVector) -> int:
    """dim of the regular part for v0 plus, per imaginary factor, one delta-slice per distinct point."""
    dim = quiver_variety_dim(q, s.v0, w)
    for lam, delta in zip(s.lam, s.deltas):
        if _is_imaginary(q, delta):
            dim += len(lam) * (2 + quiver_variety_dim(q, delta, q.zero()))
    return dim
