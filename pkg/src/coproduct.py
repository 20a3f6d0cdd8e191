"""
Block-matrix model of correspondence classes and the coproduct they induce.

- ComponentPoset: ordered fixed-point components with multiplicity dimensions and a
  grouping of components that share a fixed-locus stratum point
- CorrClass: unitriangular block matrix over the poset (zero below the order, identity
  on the diagonal); invert, delta_c, splitting_check, inverse_via_opposite
- TriplePoset / TripleClass: the four classes of the coassociativity criterion on one
  common triple-component index set
- extract_multiplicities: multiplicity table from isotypic projector ranks

All arithmetic is exact: matrices are numpy object arrays of Fraction.
"""

import itertools
import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from errors import InvalidClassError, InvalidInputError, QuivarError
from quiver_core import DimVector, Quiver, add, leq
from strata import (
    FixedComponent,
    FixedStratumIndex,
    TripleComponent,
    fixed_components,
    generic_fixed_stratum,
    linear_extension,
    sigma_fiber_count,
    sigma_image,
    split_multiplicity,
    strata_of_fixed_locus,
)
from subspaces import ExactBackend, fraction_identity, fraction_zeros

logger = logging.getLogger(__name__)

TRIPLE_PATTERNS = ("12,3", "1,23", "(1,2),3", "1,(2,3)")


def _all_zero(m: np.ndarray) -> bool:
    return all(x == 0 for x in m.flatten())


def _exact_equal(m1: np.ndarray, m2: np.ndarray) -> bool:
    return m1.shape == m2.shape and all(x == y for x, y in zip(m1.flatten(), m2.flatten()))


# ---------------------------------------------------------------------------
# Layouts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComponentPoset:
    """Components in a linear extension of `order`; order holds (beta, alpha) with beta <= alpha."""

    labels: tuple[str, ...]
    dims: tuple[int, ...]
    order: frozenset[tuple[int, int]]
    groups: tuple[str, ...] = ()

    def __post_init__(self):
        n = len(self.labels)
        if len(self.dims) != n or any(d < 0 for d in self.dims):
            raise InvalidInputError("Poset needs one nonnegative dimension per component")
        if len(set(self.labels)) != n:
            raise InvalidInputError("Component labels must be unique")
        if not self.groups:
            object.__setattr__(self, "groups", tuple("0" for _ in range(n)))
        if len(self.groups) != n:
            raise InvalidInputError("Poset needs one group label per component")
        full = set(self.order) | {(i, i) for i in range(n)}
        for beta, alpha in full:
            if not (0 <= beta < n and 0 <= alpha < n):
                raise InvalidInputError(f"Order pair {(beta, alpha)} is out of range")
            if beta > alpha:
                raise InvalidInputError(
                    f"Component order is not a linear extension: {self.labels[beta]} <= {self.labels[alpha]}"
                )
        object.__setattr__(self, "order", frozenset(full))

    @classmethod
    def from_fixed_components(
        cls,
        components: Sequence[FixedComponent],
        dims: Mapping[FixedComponent, int] | Sequence[int] | None = None,
        groups: Mapping[FixedComponent, str] | None = None,
    ) -> "ComponentPoset":
        if dims is None:
            dims_map = {c: 1 for c in components}
        elif isinstance(dims, Mapping):
            dims_map = dict(dims)
        else:
            dims_map = dict(zip(components, dims, strict=True))
        ordered = linear_extension(components)
        order = {
            (i, j)
            for i, j in itertools.product(range(len(ordered)), repeat=2)
            if leq(ordered[i].v1, ordered[j].v1)
        }
        return cls(
            labels=tuple(c.label() for c in ordered),
            dims=tuple(dims_map[c] for c in ordered),
            order=frozenset(order),
            groups=tuple(groups[c] for c in ordered) if groups else (),
        )

    @classmethod
    def from_strata(cls, q: Quiver, v: DimVector, w1: DimVector, w2: DimVector) -> "ComponentPoset":
        """Components of M(v, w1 + w2)^C* grouped by the sigma-image of their generic stratum.

        d_alpha counts the left/right splittings of that stratum's points that land on
        alpha; over each fixed-locus stratum they add up to sigma_fiber_count.
        """
        components = fixed_components(q.dim_vector(v), q.dim_vector(w1), q.dim_vector(w2))
        known = set(strata_of_fixed_locus(q, v, w1, w2))
        generic = {c: generic_fixed_stratum(q, c) for c in components}
        totals: dict[FixedStratumIndex, int] = {}
        dims: dict[FixedComponent, int] = {}
        for c, t in generic.items():
            if t not in known:
                raise QuivarError(f"Component {c.label()} has no generic fixed-locus stratum")
            dims[c] = split_multiplicity(q, t, c)
            totals[t] = totals.get(t, 0) + dims[c]
        for t, total in totals.items():
            if total != sigma_fiber_count(q, t):
                raise QuivarError(
                    f"Split multiplicities over {sigma_image(t).label()} add up to {total}, not the fiber count"
                )
        groups = {c: sigma_image(t).label() for c, t in generic.items()}
        logger.debug(f"poset over {len(components)} components in {len(set(groups.values()))} groups")
        return cls.from_fixed_components(components, dims=dims, groups=groups)

    @property
    def size(self) -> int:
        return len(self.labels)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        return tuple(int(x) for x in np.concatenate([[0], np.cumsum(self.dims, dtype=np.int64)]))

    @property
    def total_dim(self) -> int:
        return self.offsets[-1]

    def block(self, k: int) -> slice:
        return slice(self.offsets[k], self.offsets[k + 1])

    def leq(self, beta: int, alpha: int) -> bool:
        return (beta, alpha) in self.order

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InvalidInputError(f"Unknown component {label!r}")

    def group_indices(self, group: str) -> list[int]:
        """Matrix coordinates belonging to the components of one group."""
        coords: list[int] = []
        for k, g in enumerate(self.groups):
            if g == group:
                coords.extend(range(self.offsets[k], self.offsets[k + 1]))
        return coords

    def group_names(self) -> list[str]:
        return list(dict.fromkeys(self.groups))


@dataclass(frozen=True, eq=False)
class CorrClass:
    poset: ComponentPoset
    matrix: np.ndarray

    def __post_init__(self):
        d = self.poset.total_dim
        if self.matrix.shape != (d, d):
            raise InvalidInputError(f"Class matrix has shape {self.matrix.shape}, poset needs {(d, d)}")

    def block(self, beta: int, alpha: int) -> np.ndarray:
        return self.matrix[self.poset.block(beta), self.poset.block(alpha)]

    @classmethod
    def identity(cls, poset: ComponentPoset) -> "CorrClass":
        return cls(poset, fraction_identity(poset.total_dim))

    def __matmul__(self, other: "CorrClass") -> "CorrClass":
        if other.poset != self.poset:
            raise InvalidInputError("Classes live on different posets")
        return CorrClass(self.poset, self.matrix @ other.matrix)


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """Block-diagonal with respect to the poset's grouping."""

    poset: ComponentPoset
    matrix: np.ndarray

    def __post_init__(self):
        d = self.poset.total_dim
        if self.matrix.shape != (d, d):
            raise InvalidInputError(f"Algebra element has shape {self.matrix.shape}, poset needs {(d, d)}")
        for g, h in itertools.permutations(self.poset.group_names(), 2):
            rows, cols = self.poset.group_indices(g), self.poset.group_indices(h)
            if rows and cols and not _all_zero(self.matrix[np.ix_(rows, cols)]):
                raise InvalidInputError(f"Algebra element mixes groups {g} and {h}")


# ---------------------------------------------------------------------------
# Two-factor classes
# ---------------------------------------------------------------------------


def validate(c: CorrClass) -> bool:
    poset = c.poset
    for beta, alpha in itertools.product(range(poset.size), repeat=2):
        block = c.block(beta, alpha)
        if beta == alpha:
            if not _exact_equal(block, fraction_identity(poset.dims[beta])):
                return False
        elif not poset.leq(beta, alpha) and not _all_zero(block):
            return False
    return True


def splitting_check(c: CorrClass) -> bool:
    """Column block alpha lives over the down-set of alpha and restricts to the identity on alpha."""
    poset = c.poset
    for alpha in range(poset.size):
        column = c.matrix[:, poset.block(alpha)]
        outside = [
            coord
            for beta in range(poset.size)
            if not poset.leq(beta, alpha)
            for coord in range(poset.offsets[beta], poset.offsets[beta + 1])
        ]
        if outside and not _all_zero(column[outside, :]):
            return False
        if not _exact_equal(column[poset.block(alpha), :], fraction_identity(poset.dims[alpha])):
            return False
    return True


def _require_valid(c: CorrClass, name: str = "class") -> None:
    if not validate(c):
        raise InvalidClassError(f"The {name} is not unitriangular over its component poset")


def invert(c: CorrClass) -> CorrClass:
    """Finite Neumann series for I + N with N nilpotent along the order."""
    _require_valid(c)
    d = c.poset.total_dim
    identity = fraction_identity(d)
    minus_n = identity - c.matrix
    result = identity.copy()
    term = identity
    for _ in range(c.poset.size):
        term = term @ minus_n
        if _all_zero(term):
            break
        result = result + term
    return CorrClass(c.poset, result)


def inverse_via_opposite(c: CorrClass, c_minus: CorrClass) -> CorrClass:
    """c^-1 = (c_minus c)^-1 c_minus for any unitriangular c_minus on the same poset."""
    _require_valid(c)
    _require_valid(c_minus, "opposite class")
    return invert(c_minus @ c) @ c_minus


def delta_c(c: CorrClass, a: AlgebraElement | np.ndarray) -> np.ndarray:
    matrix = a.matrix if isinstance(a, AlgebraElement) else a
    if matrix.shape != c.matrix.shape:
        raise InvalidInputError(f"Algebra element has shape {matrix.shape}, class has {c.matrix.shape}")
    return invert(c).matrix @ matrix @ c.matrix


def preserves_filtration(c: CorrClass, matrix: np.ndarray) -> bool:
    """The span of the blocks below each alpha is mapped into itself."""
    poset = c.poset
    for beta, alpha in itertools.product(range(poset.size), repeat=2):
        if beta != alpha and not poset.leq(beta, alpha):
            if not _all_zero(matrix[poset.block(beta), poset.block(alpha)]):
                return False
    return True


def random_class(
    poset: ComponentPoset,
    rng: np.random.Generator,
    density: float = 0.7,
    max_entry: int = 3,
    respect_groups: bool = True,
) -> CorrClass:
    matrix = fraction_identity(poset.total_dim)
    for beta, alpha in itertools.product(range(poset.size), repeat=2):
        if beta == alpha or not poset.leq(beta, alpha):
            continue
        if respect_groups and poset.groups[beta] != poset.groups[alpha]:
            continue
        if rng.random() > density:
            continue
        rows, cols = poset.block(beta), poset.block(alpha)
        for r in range(rows.start, rows.stop):
            for col in range(cols.start, cols.stop):
                num = int(rng.integers(-max_entry, max_entry + 1))
                den = int(rng.integers(1, max_entry + 1))
                matrix[r, col] = Fraction(num, den)
    return CorrClass(poset, matrix)


def random_algebra_element(poset: ComponentPoset, rng: np.random.Generator, max_entry: int = 3) -> AlgebraElement:
    matrix = fraction_zeros(poset.total_dim, poset.total_dim)
    for g in poset.group_names():
        coords = poset.group_indices(g)
        for r, col in itertools.product(coords, repeat=2):
            matrix[r, col] = Fraction(int(rng.integers(-max_entry, max_entry + 1)))
    return AlgebraElement(poset, matrix)


# ---------------------------------------------------------------------------
# Multiplicities
# ---------------------------------------------------------------------------


def isotypic_projectors(c: CorrClass, projectors: Mapping[str, np.ndarray]) -> dict[str, np.ndarray]:
    """Transport central idempotents through delta_c."""
    return {name: delta_c(c, p) for name, p in projectors.items()}


def extract_multiplicities(
    poset: ComponentPoset,
    source_dims: Mapping[str, int],
    projectors: Mapping[str, np.ndarray],
) -> dict[str, dict[str, int]]:
    """n[group][source] = rank of the source projector on the group / dim of the source simple."""
    d = poset.total_dim
    if set(projectors) != set(source_dims):
        raise InvalidInputError("Need exactly one projector per source stratum")
    backend = ExactBackend()
    total = fraction_zeros(d, d)
    for name, p in projectors.items():
        if p.shape != (d, d):
            raise InvalidInputError(f"Projector {name} has shape {p.shape}, expected {(d, d)}")
        if not _exact_equal(p @ p, p):
            raise InvalidInputError(f"Projector {name} is not idempotent")
        AlgebraElement(poset, p)
        total = total + p
    if not _exact_equal(total, fraction_identity(d)):
        raise InvalidInputError("Projectors do not sum to the identity")

    table: dict[str, dict[str, int]] = {}
    for group in poset.group_names():
        coords = poset.group_indices(group)
        row: dict[str, int] = {}
        accounted = 0
        for name in sorted(source_dims):
            dim_source = source_dims[name]
            rank = backend.rank(projectors[name][np.ix_(coords, coords)]) if coords else 0
            if dim_source == 0:
                if rank:
                    raise InvalidInputError(f"Source {name} has dimension 0 but a nonzero projector")
                row[name] = 0
                continue
            if rank % dim_source:
                raise InvalidInputError(f"Rank {rank} of source {name} is not a multiple of {dim_source}")
            row[name] = rank // dim_source
            accounted += row[name] * dim_source
        if accounted != len(coords):
            raise InvalidInputError(f"Group {group}: dimension {len(coords)} != sum of n * d_source = {accounted}")
        table[group] = row
    return table


# ---------------------------------------------------------------------------
# Triple components and coassociativity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TriplePoset:
    components: tuple[TripleComponent, ...]
    dims: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not self.dims:
            object.__setattr__(self, "dims", tuple(1 for _ in self.components))
        if len(self.dims) != len(self.components):
            raise InvalidInputError("Triple poset needs one dimension per component")

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        return tuple(int(x) for x in np.concatenate([[0], np.cumsum(self.dims, dtype=np.int64)]))

    @property
    def total_dim(self) -> int:
        return self.offsets[-1]

    def block(self, k: int) -> slice:
        return slice(self.offsets[k], self.offsets[k + 1])

    def allowed(self, pattern: str, row: int, col: int) -> bool:
        """Whether block (row, col) may be nonzero off the diagonal for the given class."""
        s, t = self.components[row], self.components[col]
        if row == col:
            return True
        if pattern == "12,3":
            u, u2 = add(s.v1, s.v2), add(t.v1, t.v2)
            return leq(u, u2) and u != u2
        if pattern == "1,23":
            return leq(s.v1, t.v1) and s.v1 != t.v1
        if pattern == "(1,2),3":
            return s.v3 == t.v3 and leq(s.v1, t.v1) and s.v1 != t.v1
        if pattern == "1,(2,3)":
            return s.v1 == t.v1 and leq(s.v2, t.v2) and s.v2 != t.v2
        raise InvalidInputError(f"Unknown triple pattern {pattern!r}")


@dataclass(frozen=True, eq=False)
class TripleClass:
    poset: TriplePoset
    pattern: str
    matrix: np.ndarray

    def __post_init__(self):
        if self.pattern not in TRIPLE_PATTERNS:
            raise InvalidInputError(f"Unknown triple pattern {self.pattern!r}")
        d = self.poset.total_dim
        if self.matrix.shape != (d, d):
            raise InvalidInputError(f"Triple class has shape {self.matrix.shape}, expected {(d, d)}")


def validate_triple(c: TripleClass) -> bool:
    poset = c.poset
    n = len(poset.components)
    for row, col in itertools.product(range(n), repeat=2):
        block = c.matrix[poset.block(row), poset.block(col)]
        if row == col:
            if not _exact_equal(block, fraction_identity(poset.dims[row])):
                return False
        elif not poset.allowed(c.pattern, row, col) and not _all_zero(block):
            return False
    return True


def coassoc_check(c12_3: TripleClass, c1_23: TripleClass, c_12_3: TripleClass, c1_23b: TripleClass) -> bool:
    """c^{12,3} c^{(1,2),3} == c^{1,(2,3)} c^{1,23}."""
    expected = {"12,3": c12_3, "1,23": c1_23, "(1,2),3": c_12_3, "1,(2,3)": c1_23b}
    for pattern, c in expected.items():
        if c.pattern != pattern or c.poset != c12_3.poset:
            raise InvalidClassError(f"Expected a {pattern} class on the common triple poset")
        if not validate_triple(c):
            raise InvalidClassError(f"The {pattern} class violates its support pattern")
    return _exact_equal(c12_3.matrix @ c_12_3.matrix, c1_23b.matrix @ c1_23.matrix)


def random_triple_class(
    poset: TriplePoset, pattern: str, rng: np.random.Generator, density: float = 0.7, max_entry: int = 3
) -> TripleClass:
    matrix = fraction_identity(poset.total_dim)
    n = len(poset.components)
    for row, col in itertools.product(range(n), repeat=2):
        if row == col or not poset.allowed(pattern, row, col) or rng.random() > density:
            continue
        for r in range(poset.block(row).start, poset.block(row).stop):
            for k in range(poset.block(col).start, poset.block(col).stop):
                num = int(rng.integers(1, max_entry + 1)) * (1 if rng.random() < 0.5 else -1)
                matrix[r, k] = Fraction(num, int(rng.integers(1, max_entry + 1)))
    return TripleClass(poset, pattern, matrix)


def _exp_nilpotent(n: np.ndarray) -> np.ndarray:
    """exp(N) as the finite series sum N^k / k!."""
    result = fraction_identity(n.shape[0])
    term = result
    for k in range(1, n.shape[0] + 1):
        term = term @ n * Fraction(1, k)
        if _all_zero(term):
            break
        result = result + term
    return result


def _height(t: TripleComponent) -> int:
    return 2 * sum(t.v1) + sum(t.v2)


def shared_family(poset: TriplePoset, rng: np.random.Generator, max_entry: int = 3) -> tuple[TripleClass, ...]:
    """A quadruple satisfying the criterion, built from one commuting nilpotent family.

    A couples triples allowed by both 12,3 and 1,23, B those of (1,2),3 and C those of
    1,(2,3). Every such block raises 2|v1| + |v2|; keeping only blocks that cross one
    height threshold makes all products inside the family vanish, so A, B and C commute
    and exp(A + C) exp(B) = exp(C) exp(A + B).
    """
    d = poset.total_dim
    n = len(poset.components)
    heights = [_height(t) for t in poset.components]
    cut = int(rng.integers(min(heights) + 1, max(heights) + 1)) if max(heights) > min(heights) else 0
    family = {name: fraction_zeros(d, d) for name in ("A", "B", "C")}
    for row, col in itertools.product(range(n), repeat=2):
        if row == col or not heights[row] < cut <= heights[col]:
            continue
        if poset.allowed("12,3", row, col) and poset.allowed("1,23", row, col):
            target = family["A"]
        elif poset.allowed("(1,2),3", row, col):
            target = family["B"]
        elif poset.allowed("1,(2,3)", row, col):
            target = family["C"]
        else:
            continue
        for r in range(poset.block(row).start, poset.block(row).stop):
            for k in range(poset.block(col).start, poset.block(col).stop):
                num = int(rng.integers(1, max_entry + 1)) * (1 if rng.random() < 0.5 else -1)
                target[r, k] = Fraction(num, int(rng.integers(1, max_entry + 1)))
    a, b, c = family["A"], family["B"], family["C"]
    return (
        TripleClass(poset, "12,3", _exp_nilpotent(a + c)),
        TripleClass(poset, "1,23", _exp_nilpotent(a + b)),
        TripleClass(poset, "(1,2),3", _exp_nilpotent(b)),
        TripleClass(poset, "1,(2,3)", _exp_nilpotent(c)),
    )


def conjugate_triple(c: TripleClass, change: np.ndarray) -> TripleClass:
    """Simultaneous change of basis by a block-diagonal invertible matrix."""
    inverse = ExactBackend().inverse(change)
    return TripleClass(c.poset, c.pattern, inverse @ c.matrix @ change)
