#!/usr/bin/env python3
"""
Tests for coproduct: unitriangular correspondence classes, exact inversion, the induced
coproduct, multiplicity extraction and the coassociativity criterion.
"""

import itertools
from fractions import Fraction

import numpy as np
import pytest

import oracles
from coproduct import (
    TRIPLE_PATTERNS,
    AlgebraElement,
    ComponentPoset,
    CorrClass,
    TriplePoset,
    coassoc_check,
    conjugate_triple,
    delta_c,
    extract_multiplicities,
    invert,
    inverse_via_opposite,
    isotypic_projectors,
    preserves_filtration,
    random_algebra_element,
    random_class,
    random_triple_class,
    shared_family,
    splitting_check,
    validate,
    validate_triple,
)
from errors import InvalidClassError, InvalidInputError
from quiver_core import load_quiver
from strata import fixed_components, sigma_fiber_count, strata_of_fixed_locus, triple_components
from subspaces import fraction_array, fraction_identity, fraction_zeros
from tensor_ade import multiplicity_n


def _chain_poset(dims=(1, 2, 1)) -> ComponentPoset:
    n = len(dims)
    order = frozenset((i, j) for i, j in itertools.product(range(n), repeat=2) if i <= j)
    return ComponentPoset(tuple(f"c{i}" for i in range(n)), tuple(dims), order)


def _triple_poset() -> TriplePoset:
    return TriplePoset(tuple(triple_components((2,), (1,), (1,), (1,))))


# ---------------------------------------------------------------------------
# 1. Posets
# ---------------------------------------------------------------------------


class TestComponentPoset:
    def test_from_fixed_components(self):
        poset = ComponentPoset.from_fixed_components(fixed_components((1, 1), (1, 0), (0, 1)))
        assert poset.labels == ("(0,0|1,1)", "(0,1|1,0)", "(1,0|0,1)", "(1,1|0,0)")
        assert poset.leq(0, 3)
        assert not poset.leq(1, 2)
        assert poset.total_dim == 4

    def test_dims_by_component(self):
        components = fixed_components((2,), (1,), (1,))
        poset = ComponentPoset.from_fixed_components(components, dims=[3, 2, 1])
        # components come in descending v1, the poset in ascending v1
        assert poset.dims == (1, 2, 3)
        assert poset.offsets == (0, 1, 3, 6)

    def test_order_must_follow_the_linear_extension(self):
        with pytest.raises(InvalidInputError, match="linear extension"):
            ComponentPoset(("x", "y"), (1, 1), frozenset({(1, 0)}))

    def test_duplicate_labels(self):
        with pytest.raises(InvalidInputError):
            ComponentPoset(("x", "x"), (1, 1), frozenset())

    def test_from_strata_on_jordan(self):
        q = load_quiver("jordan")
        poset = ComponentPoset.from_strata(q, (2,), (1,), (1,))
        assert poset.labels == ("(0|2)", "(1|1)", "(2|0)")
        assert poset.groups == ("0;1:1,1",) * 3
        assert poset.dims == (1, 2, 1)
        t = next(t for t in strata_of_fixed_locus(q, (2,), (1,), (1,)) if t.lam == ((1, 1),))
        assert poset.total_dim == sigma_fiber_count(q, t)

    def test_from_strata_on_affine_a1(self):
        poset = ComponentPoset.from_strata(load_quiver("affine_A1"), (1, 1), (1, 0), (0, 1))
        groups = dict(zip(poset.labels, poset.groups))
        assert groups == {
            "(0,0|1,1)": "0,0;1,1:1",
            "(0,1|1,0)": "1,1",
            "(1,0|0,1)": "1,1",
            "(1,1|0,0)": "0,0;1,1:1",
        }
        assert poset.dims == (1, 1, 1, 1)
        assert sorted(len(poset.group_indices(g)) for g in poset.group_names()) == [2, 2]

    def test_from_strata_on_finite_type(self):
        poset = ComponentPoset.from_strata(load_quiver("A2"), (1, 1), (1, 0), (0, 1))
        assert poset.group_names() == ["1,1"]
        assert poset.dims == (1, 1, 1, 1)

    def test_groups_default_to_one(self):
        poset = _chain_poset()
        assert poset.group_names() == ["0"]
        assert poset.group_indices("0") == [0, 1, 2, 3]


# ---------------------------------------------------------------------------
# 2. Two-factor classes
# ---------------------------------------------------------------------------


class TestCorrClass:
    def test_identity_is_valid(self):
        c = CorrClass.identity(_chain_poset())
        assert validate(c)
        assert splitting_check(c)

    def test_non_identity_diagonal(self):
        matrix = fraction_identity(4)
        matrix[0, 0] = Fraction(2)
        c = CorrClass(_chain_poset(), matrix)
        assert not validate(c)
        with pytest.raises(InvalidClassError):
            invert(c)

    def test_entry_below_the_order(self):
        matrix = fraction_identity(4)
        matrix[3, 0] = Fraction(1)
        c = CorrClass(_chain_poset(), matrix)
        assert not validate(c)
        assert not splitting_check(c)

    def test_shape_mismatch(self):
        with pytest.raises(InvalidInputError):
            CorrClass(_chain_poset(), fraction_identity(3))

    def test_invert_is_two_sided(self, rng):
        poset = _chain_poset((2, 1, 3))
        for _ in range(20):
            c = random_class(poset, rng)
            inverse = invert(c)
            assert np.array_equal(c.matrix @ inverse.matrix, fraction_identity(6))
            assert np.array_equal(inverse.matrix @ c.matrix, fraction_identity(6))
            assert validate(inverse)

    def test_invert_known_class(self):
        poset = _chain_poset((1, 1))
        c = CorrClass(poset, fraction_array([[1, 3], [0, 1]]))
        assert invert(c).matrix.tolist() == [[1, -3], [0, 1]]

    def test_inverse_via_opposite(self, rng):
        poset = _chain_poset()
        c, c_minus = random_class(poset, rng), random_class(poset, rng)
        assert np.array_equal(inverse_via_opposite(c, c_minus).matrix, invert(c).matrix)

    def test_delta_is_unital_and_multiplicative(self, rng):
        poset = _chain_poset()
        c = random_class(poset, rng)
        x, y = random_algebra_element(poset, rng), random_algebra_element(poset, rng)
        identity = fraction_identity(poset.total_dim)
        assert np.array_equal(delta_c(c, identity), identity)
        assert np.array_equal(delta_c(c, x.matrix @ y.matrix), delta_c(c, x) @ delta_c(c, y))

    def test_delta_shape_mismatch(self):
        with pytest.raises(InvalidInputError):
            delta_c(CorrClass.identity(_chain_poset()), fraction_identity(2))

    def test_filtration(self):
        c = CorrClass.identity(_chain_poset())
        upper = fraction_identity(4)
        upper[0, 3] = Fraction(5)
        lower = fraction_identity(4)
        lower[3, 0] = Fraction(5)
        assert preserves_filtration(c, upper)
        assert not preserves_filtration(c, lower)

    def test_invert_is_an_involution(self, rng):
        poset = ComponentPoset.from_fixed_components(fixed_components((1, 1), (1, 0), (0, 1)), dims=[2, 1, 1, 3])
        for _ in range(20):
            c = random_class(poset, rng, density=1.0)
            assert np.array_equal(invert(invert(c)).matrix, c.matrix)

    def test_delta_of_block_diagonal_preserves_the_filtration(self, rng):
        poset = ComponentPoset.from_fixed_components(fixed_components((1, 1), (1, 0), (0, 1)), dims=[2, 1, 1, 3])
        for _ in range(20):
            c = random_class(poset, rng, density=1.0)
            a = fraction_zeros(poset.total_dim, poset.total_dim)
            for k in range(poset.size):
                block = poset.block(k)
                for r, col in itertools.product(range(block.start, block.stop), repeat=2):
                    a[r, col] = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4)))
            assert preserves_filtration(c, delta_c(c, a))

    def test_validate_agrees_with_splitting_check(self, rng):
        poset = ComponentPoset.from_fixed_components(fixed_components((1, 1), (1, 0), (0, 1)), dims=[2, 1, 1, 3])
        for _ in range(30):
            c = random_class(poset, rng)
            assert validate(c) and splitting_check(c)
            matrix = c.matrix.copy()
            r, col = (int(x) for x in rng.integers(0, poset.total_dim, size=2))
            matrix[r, col] = matrix[r, col] + Fraction(int(rng.integers(1, 4)))
            perturbed = CorrClass(poset, matrix)
            assert validate(perturbed) == splitting_check(perturbed)

    def test_random_class_respects_groups(self, rng):
        order = frozenset({(0, 1), (0, 2), (1, 2)})
        poset = ComponentPoset(("a", "b", "c"), (1, 1, 1), order, groups=("g", "h", "g"))
        for _ in range(10):
            c = random_class(poset, rng, density=1.0)
            assert c.matrix[0, 1] == 0
            assert validate(c)

    def test_algebra_element_cannot_mix_groups(self):
        poset = ComponentPoset(("a", "b"), (1, 1), frozenset(), groups=("g", "h"))
        matrix = fraction_identity(2)
        matrix[0, 1] = Fraction(1)
        with pytest.raises(InvalidInputError):
            AlgebraElement(poset, matrix)


# ---------------------------------------------------------------------------
# 3. Multiplicities
# ---------------------------------------------------------------------------


class TestMultiplicities:
    @staticmethod
    def _projectors():
        p_s = fraction_zeros(3, 3)
        p_s[0, 0] = Fraction(1)
        p_t = fraction_identity(3) - p_s
        return {"s": p_s, "t": p_t}

    def test_one_copy_each(self):
        poset = ComponentPoset(("x", "y"), (1, 2), frozenset({(0, 1)}))
        table = extract_multiplicities(poset, {"s": 1, "t": 2}, self._projectors())
        assert table == {"0": {"s": 1, "t": 1}}

    def test_two_groups(self):
        poset = ComponentPoset(("x", "y"), (1, 2), frozenset(), groups=("g", "h"))
        table = extract_multiplicities(poset, {"s": 1, "t": 1}, self._projectors())
        assert table == {"g": {"s": 1, "t": 0}, "h": {"s": 0, "t": 2}}

    def test_projectors_survive_the_coproduct(self, rng):
        poset = ComponentPoset(("x", "y"), (1, 2), frozenset({(0, 1)}))
        c = random_class(poset, rng, density=1.0)
        moved = isotypic_projectors(c, self._projectors())
        assert extract_multiplicities(poset, {"s": 1, "t": 2}, moved) == {"0": {"s": 1, "t": 1}}

    @pytest.mark.parametrize("a,b,v", [(1, 1, 1), (2, 1, 1), (2, 2, 2), (3, 2, 1)])
    def test_a1_table_matches_multiplicity_n(self, rng, a, b, v):
        q = load_quiver("A1")
        poset = ComponentPoset.from_strata(q, (v,), (a,), (b,))
        # V(c) meets the weight a + b - 2v once for each c >= a + b - 2v in the Clebsch-Gordan range
        sources = {
            f"v0={(a + b - c) // 2}": (a + b - c) // 2
            for (c,), n in oracles.clebsch_gordan(a, b).items()
            if n and c >= a + b - 2 * v
        }
        assert len(sources) == poset.total_dim
        projectors = {}
        for k, name in enumerate(sorted(sources)):
            p = fraction_zeros(poset.total_dim, poset.total_dim)
            p[k, k] = Fraction(1)
            projectors[name] = p
        moved = isotypic_projectors(random_class(poset, rng, density=1.0), projectors)
        table = extract_multiplicities(poset, {name: 1 for name in sources}, moved)
        assert table == {
            poset.group_names()[0]: {
                name: multiplicity_n(q, (0,), (a,), (0,), (b,), (v0,), (a + b,)) for name, v0 in sources.items()
            }
        }

    def test_rank_must_be_a_multiple(self):
        poset = ComponentPoset(("x", "y"), (1, 2), frozenset())
        with pytest.raises(InvalidInputError):
            extract_multiplicities(poset, {"s": 2, "t": 2}, self._projectors())

    def test_not_idempotent(self):
        poset = ComponentPoset(("x", "y"), (1, 2), frozenset())
        projectors = self._projectors()
        projectors["s"] = 2 * projectors["s"]
        with pytest.raises(InvalidInputError, match="idempotent"):
            extract_multiplicities(poset, {"s": 1, "t": 2}, projectors)

    def test_must_sum_to_identity(self):
        poset = ComponentPoset(("x", "y"), (1, 2), frozenset())
        projectors = {"s": self._projectors()["s"]}
        with pytest.raises(InvalidInputError):
            extract_multiplicities(poset, {"s": 1}, projectors)


# ---------------------------------------------------------------------------
# 4. Coassociativity
# ---------------------------------------------------------------------------


class TestCoassociativity:
    def test_allowed_patterns(self):
        poset = _triple_poset()
        index = {(t.v1, t.v2, t.v3): k for k, t in enumerate(poset.components)}
        low, high = index[((0,), (0,), (2,))], index[((1,), (0,), (1,))]
        assert poset.allowed("12,3", low, high)
        assert poset.allowed("1,23", low, high)
        assert not poset.allowed("(1,2),3", low, high)
        assert not poset.allowed("1,(2,3)", low, high)
        with pytest.raises(InvalidInputError):
            poset.allowed("2,13", low, high)

    def test_shared_family_passes(self, rng):
        poset = _triple_poset()
        for _ in range(10):
            quadruple = shared_family(poset, rng)
            assert [c.pattern for c in quadruple] == list(TRIPLE_PATTERNS)
            assert all(validate_triple(c) for c in quadruple)
            assert coassoc_check(*quadruple)

    def test_shared_family_depends_on_every_class(self, rng):
        poset = _triple_poset()
        identity = fraction_identity(poset.total_dim)
        nontrivial = 0
        for _ in range(20):
            c12_3, c1_23, c_12_3, c1_23b = shared_family(poset, rng)
            if np.array_equal(c1_23b.matrix, identity):
                continue
            nontrivial += 1
            assert not np.array_equal(c12_3.matrix, identity)
            dropped = type(c1_23b)(poset, "1,(2,3)", identity)
            assert not coassoc_check(c12_3, c1_23, c_12_3, dropped)
        assert nontrivial > 0

    def test_random_quadruples_fail(self, rng):
        poset = _triple_poset()
        failures = sum(
            not coassoc_check(*(random_triple_class(poset, p, rng, density=1.0) for p in TRIPLE_PATTERNS))
            for _ in range(40)
        )
        assert failures >= 38

    def test_diagonal_change_of_basis_keeps_the_criterion(self, rng):
        poset = _triple_poset()
        change = fraction_zeros(poset.total_dim, poset.total_dim)
        for k in range(poset.total_dim):
            change[k, k] = Fraction(k + 2, 3)
        quadruple = tuple(conjugate_triple(c, change) for c in shared_family(poset, rng))
        assert coassoc_check(*quadruple)

    def test_wrong_pattern_order(self, rng):
        quadruple = shared_family(_triple_poset(), rng)
        with pytest.raises(InvalidClassError):
            coassoc_check(quadruple[1], quadruple[0], quadruple[2], quadruple[3])

    def test_support_violation(self, rng):
        c12_3, c1_23, c_12_3, c1_23b = shared_family(_triple_poset(), rng)
        bad = fraction_identity(c12_3.poset.total_dim)
        bad[-1, 0] = Fraction(1)
        with pytest.raises(InvalidClassError):
            coassoc_check(c12_3, c1_23, c_12_3, type(c1_23b)(c1_23b.poset, "1,(2,3)", bad))
