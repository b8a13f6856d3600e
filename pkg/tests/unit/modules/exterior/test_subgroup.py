"""Unit tests for discrete subgroups and their norms"""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from modules.exterior.subgroup import (
    DiscreteSubgroup,
    gram_norm,
    ht_image_basis,
    ht_subgroup_norm,
    projection_norm,
    subgroup_norm,
    wedge_norm,
)
from modules.maps.polynomial import PolynomialMap
from shared.errors import DimensionMismatch, RankDeficient

small_int = st.integers(-5, 5)


def int_matrix(rows, cols):
    return st.lists(st.lists(small_int, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


class TestDiscreteSubgroup:
    """Test subgroup construction"""

    def test_rank_one_norm(self):
        """Test ||Z (3, 4)|| = 5"""
        assert subgroup_norm(DiscreteSubgroup(np.array([[3.0, 4.0]]))) == 5.0

    def test_dependent_rows_rejected(self):
        """Test that dependent rows are rank deficient"""
        with pytest.raises(RankDeficient):
            DiscreteSubgroup(np.array([[1.0, 2.0], [2.0, 4.0]]))

    def test_too_many_rows_rejected(self):
        """Test that rank cannot exceed the dimension"""
        with pytest.raises(RankDeficient):
            DiscreteSubgroup(np.eye(3)[:, :2])

    def test_rational_rows_kept_exact(self):
        """Test that from_rational_rows keeps the exact basis"""
        gamma = DiscreteSubgroup.from_rational_rows([[Fraction(1), Fraction(1, 3)]])
        assert gamma.rational_basis() == ((Fraction(1), Fraction(1, 3)),)
        assert gamma.rank == 1 and gamma.dimension == 2

    def test_basis_is_read_only(self):
        """Test that the stored basis cannot be mutated"""
        gamma = DiscreteSubgroup(np.eye(2))
        with pytest.raises(ValueError):
            gamma.basis[0, 0] = 5.0


class TestSubgroupNorm:
    """Test ||Gamma|| and its invariances"""

    @settings(max_examples=60)
    @given(int_matrix(2, 3))
    def test_wedge_matches_gram(self, rows):
        """Test that wedge expansion and Gram determinant agree"""
        basis = np.array(rows, dtype=float)
        assume(np.linalg.matrix_rank(basis) == 2)
        gamma = DiscreteSubgroup(basis)
        assert math.isclose(wedge_norm(gamma), gram_norm(gamma), rel_tol=1e-9)

    @settings(max_examples=60)
    @given(int_matrix(2, 3), st.integers(-4, 4))
    def test_unimodular_invariance(self, rows, shear):
        """Test that a shear of the basis keeps the norm"""
        basis = np.array(rows, dtype=float)
        assume(np.linalg.matrix_rank(basis) == 2)
        gamma = DiscreteSubgroup(basis)
        sheared = gamma.transformed(np.array([[1, shear], [0, 1]]))
        assert math.isclose(subgroup_norm(sheared), subgroup_norm(gamma), rel_tol=1e-9)

    def test_full_lattice_norm_is_covolume(self):
        """Test that a full-rank lattice has norm |det|"""
        gamma = DiscreteSubgroup(np.array([[2.0, 1.0], [0.0, 3.0]]))
        assert math.isclose(subgroup_norm(gamma), 6.0)

    def test_projection_norm(self):
        """Test projection of (3, 4) onto the first axis"""
        gamma = DiscreteSubgroup(np.array([[2.0, 0.0]]))
        assert math.isclose(projection_norm(gamma, [3.0, 4.0]), 3.0)

    def test_projection_dimension_mismatch(self):
        """Test that projected vectors must live in the ambient space"""
        with pytest.raises(DimensionMismatch):
            projection_norm(DiscreteSubgroup(np.eye(2)), [1.0, 2.0, 3.0])


class TestFlowedImageNorm:
    """Test ||h_t(x) Gamma|| against the explicit image basis"""

    @pytest.mark.parametrize("rows", [
        [[1.0, 0.0]],
        [[0.0, 1.0]],
        [[1.0, 2.0]],
        [[1.0, 0.0], [0.0, 1.0]],
        [[2.0, 1.0], [1.0, 3.0]],
    ])
    @pytest.mark.parametrize("t", [-1.0, 0.0, 0.5, 2.0])
    @pytest.mark.parametrize("x", [0.0, 0.3, -0.7])
    def test_closed_form_matches_image_basis(self, rows, t, x):
        """Test the closed form on the map (1 + x, 3/2 + x^2)"""
        f = PolynomialMap.from_expressions(["1 + x1", "3/2 + x1**2"], 1, l=2)
        gamma = DiscreteSubgroup(np.array(rows))
        expected = subgroup_norm(ht_image_basis(f, [x], t, gamma))
        assert math.isclose(ht_subgroup_norm(f, [x], t, gamma), expected, rel_tol=1e-9)

    def test_wrong_codomain_rejected(self):
        """Test that f(x) must live where Gamma lives"""
        f = PolynomialMap.from_expressions(["x1", "x1**2", "x1**3"], 1)
        with pytest.raises(DimensionMismatch):
            ht_subgroup_norm(f, [0.1], 0.0, DiscreteSubgroup(np.eye(2)))
