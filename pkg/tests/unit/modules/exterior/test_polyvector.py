"""Unit tests for exterior polyvectors"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modules.exterior.polyvector import (
    PolyVector,
    canonical_class,
    hodge_star,
    inner,
    shuffle_sign,
    wedge,
    wedge_all,
)
from shared.errors import DegreeOverflow, DimensionMismatch

coordinate = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
vector3 = st.lists(coordinate, min_size=3, max_size=3)


class TestConstruction:
    """Test polyvector construction"""

    def test_zero_coefficients_dropped(self):
        """Test that explicit zeros do not affect equality"""
        assert PolyVector(1, 2, {(1,): 0.0, (2,): 1.0}) == PolyVector.basis([2], 2)

    def test_non_increasing_key_rejected(self):
        """Test that (2, 1) is not a valid index tuple"""
        with pytest.raises(DimensionMismatch):
            PolyVector(2, 3, {(2, 1): 1.0})

    def test_degree_above_dimension_rejected(self):
        """Test that a 3-vector of R^2 cannot exist"""
        with pytest.raises(DegreeOverflow):
            PolyVector(3, 2, {})

    def test_as_array_order(self):
        """Test lexicographic coefficient layout"""
        u = PolyVector(2, 3, {(1, 3): 2.0, (2, 3): -1.0})
        assert u.as_array().tolist() == [0.0, 2.0, -1.0]


class TestWedge:
    """Test the exterior product"""

    def test_basis_product(self):
        """Test e1 ^ e2 and e2 ^ e1"""
        e1, e2 = PolyVector.basis([1], 2), PolyVector.basis([2], 2)
        assert wedge(e1, e2).coefficients == {(1, 2): 1.0}
        assert wedge(e2, e1).coefficients == {(1, 2): -1.0}

    def test_shuffle_sign(self):
        """Test the sign of merging (2,) with (1,)"""
        assert shuffle_sign((2,), (1,)) == -1
        assert shuffle_sign((1, 3), (2,)) == -1
        assert shuffle_sign((1,), (2, 3)) == 1

    @given(vector3)
    def test_square_vanishes(self, u):
        """Test that u ^ u = 0"""
        v = PolyVector.from_vector(u)
        assert wedge(v, v).is_zero

    @given(vector3, vector3)
    def test_anticommutative(self, u, v):
        """Test u ^ v = -(v ^ u) for 1-vectors"""
        a, b = PolyVector.from_vector(u), PolyVector.from_vector(v)
        assert np.allclose(wedge(a, b).as_array(), -wedge(b, a).as_array())

    @settings(max_examples=50)
    @given(vector3, vector3)
    def test_gram_identity(self, u, v):
        """Test ||u ^ v||^2 = det Gram(u, v)"""
        a, b = PolyVector.from_vector(u), PolyVector.from_vector(v)
        gram = np.array([[np.dot(u, u), np.dot(u, v)], [np.dot(v, u), np.dot(v, v)]])
        scale = max(1.0, np.dot(u, u) * np.dot(v, v))
        assert math.isclose(wedge(a, b).norm() ** 2, np.linalg.det(gram), abs_tol=1e-9 * scale)

    def test_degree_overflow(self):
        """Test that e1 ^ e2 ^ e1 overflows R^2"""
        with pytest.raises(DegreeOverflow):
            wedge(PolyVector.basis([1, 2], 2), PolyVector.basis([1], 2))

    def test_dimension_mismatch(self):
        """Test that vectors of different spaces do not multiply"""
        with pytest.raises(DimensionMismatch):
            wedge(PolyVector.basis([1], 2), PolyVector.basis([1], 3))

    def test_wedge_all_empty_is_one(self):
        """Test that the empty product is the scalar 1"""
        assert wedge_all([], 3) == PolyVector.scalar(1.0, 3)


class TestHodgeAndInner:
    """Test the Hodge star and scalar product"""

    def test_hodge_in_plane(self):
        """Test *e1 = -e2 in R^2"""
        assert hodge_star(PolyVector.basis([1], 2)).coefficients == {(2,): -1.0}

    @pytest.mark.parametrize("key", [(1,), (2,), (3,), (1, 2), (1, 3), (2, 3)])
    def test_star_wedge_is_volume(self, key):
        """Test (*e_S) ^ e_S = e_1 ^ e_2 ^ e_3"""
        e = PolyVector.basis(key, 3)
        assert wedge(hodge_star(e), e).coefficients == {(1, 2, 3): 1.0}

    def test_basis_orthonormal(self):
        """Test that distinct basis tuples are orthogonal"""
        assert inner(PolyVector.basis([1, 2], 3), PolyVector.basis([1, 3], 3)) == 0.0
        assert PolyVector.basis([1, 2], 3).norm() == 1.0

    def test_inner_degree_mismatch(self):
        """Test that inner() needs equal degrees"""
        with pytest.raises(DimensionMismatch):
            inner(PolyVector.basis([1], 3), PolyVector.basis([1, 2], 3))

    def test_canonical_class(self):
        """Test that u and -u share a representative"""
        u = PolyVector(1, 2, {(1,): -2.0, (2,): 1.0})
        assert canonical_class(u) == canonical_class(-u)
        assert canonical_class(u).coefficient((1,)) == 2.0
