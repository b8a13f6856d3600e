"""Unit tests for shared.interval_utils"""

from fractions import Fraction

import numpy as np
from hypothesis import given, settings, strategies as st
from mpmath import iv

from shared.interval_utils import (
    batch_poly_enclosure,
    batch_power,
    interval_abs_max,
    interval_abs_min,
    interval_bounds,
    poly_enclosure,
    to_interval,
)


class TestScalarIntervals:
    """Test mpmath interval helpers"""

    def test_fraction_enclosed(self):
        """Test that 1/3 lies inside its interval"""
        lo, hi = interval_bounds(to_interval(Fraction(1, 3)))
        assert lo <= 1 / 3 <= hi

    def test_pair_interval(self):
        """Test (lo, hi) pairs"""
        lo, hi = interval_bounds(to_interval((Fraction(1, 2), 2)))
        assert lo <= 0.5 and hi >= 2.0

    def test_abs_min_straddling_zero(self):
        """Test that an interval containing zero has abs-min 0"""
        assert interval_abs_min(iv.mpf([-1, 2])) == 0.0
        assert interval_abs_max(iv.mpf([-1, 2])) >= 2.0

    def test_abs_min_positive(self):
        """Test that a positive interval has positive abs-min"""
        assert 0.0 < interval_abs_min(iv.mpf([1, 2])) <= 1.0

    def test_poly_enclosure_square(self):
        """Test x^2 over [-1, 1]"""
        x = poly_enclosure([((2,), Fraction(1))], [iv.mpf([-1, 1])])
        assert float(x.a) <= 0.0 and float(x.b) >= 1.0


class TestBatchEnclosures:
    """Test numpy batch enclosures"""

    def test_even_power_straddling_zero(self):
        """Test that t^2 over [-1, 2] is [0, 4]"""
        low, high = batch_power(np.array([-1.0]), np.array([2.0]), 2)
        assert low[0] == 0.0 and high[0] == 4.0

    def test_odd_power_monotone(self):
        """Test that t^3 keeps the endpoints"""
        low, high = batch_power(np.array([-2.0]), np.array([1.0]), 3)
        assert low[0] == -8.0 and high[0] == 1.0

    @settings(max_examples=50, deadline=None)
    @given(
        st.floats(-2, 2, allow_nan=False),
        st.floats(0, 1, allow_nan=False),
        st.floats(0, 1, allow_nan=False),
    )
    def test_enclosure_contains_values(self, a, width, u):
        """Test that 1 - 3x + x^3 stays inside the enclosure on every box"""
        terms = [((0,), 1.0), ((1,), -3.0), ((3,), 1.0)]
        lo = np.array([[a]])
        hi = np.array([[a + width]])
        low, high = batch_poly_enclosure(terms, lo, hi)
        x = a + u * width
        value = 1 - 3 * x + x ** 3
        assert low[0] <= value <= high[0]
