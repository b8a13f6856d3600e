"""Unit tests for polynomial maps"""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modules.maps.polynomial import PolynomialMap, ScalarPolynomial, moment_curve, shifted_map
from shared.errors import ConfigError, DimensionMismatch, PreconditionFailed

QUARTIC_MONOMIALS = [(a, b) for a in range(5) for b in range(5) if a + b <= 4]
quartic = st.lists(st.integers(-5, 5), min_size=len(QUARTIC_MONOMIALS), max_size=len(QUARTIC_MONOMIALS)).map(
    lambda coefficients: ScalarPolynomial.from_terms(2, list(zip(QUARTIC_MONOMIALS, coefficients)))
)
plane_point = st.tuples(*[st.fractions(min_value=-1, max_value=1, max_denominator=20)] * 2)


class TestScalarPolynomial:
    """Test scalar polynomials"""

    def test_repeated_monomials_add(self):
        """Test that equal monomials are merged"""
        g = ScalarPolynomial.from_terms(1, [((2,), 1), ((2,), Fraction(1, 2))])
        assert g.terms == [((2,), Fraction(3, 2))]

    def test_exact_and_float_evaluation(self):
        """Test rational points stay exact, floats go through numpy"""
        g = ScalarPolynomial.from_expression("x1*x2 + 1/3", 2)
        assert g.evaluate((Fraction(1, 2), 2)) == Fraction(4, 3)
        assert g.evaluate((0.5, 2.0)) == pytest.approx(4 / 3)

    def test_derivative(self):
        """Test d/dx1 d/dx2 of x1 x2^2"""
        g = ScalarPolynomial.from_expression("x1*x2**2", 2)
        assert g.derivative((1, 1)).terms == [((0, 1), Fraction(2))]
        assert g.derivative((0, 0)) is g
        assert g.derivative((0, 3)).is_zero

    def test_bad_expression(self):
        """Test that unparsable input is a config error"""
        with pytest.raises(ConfigError):
            ScalarPolynomial.from_expression("x1 +", 1)

    def test_point_dimension(self):
        """Test point length validation"""
        g = ScalarPolynomial.from_expression("x1", 1)
        with pytest.raises(DimensionMismatch):
            g.evaluate((1, 2))
        with pytest.raises(DimensionMismatch):
            g.evaluate_points(np.zeros((3, 2)))

    def test_monomial_dimension(self):
        """Test that monomials must fit the variables"""
        with pytest.raises(DimensionMismatch):
            ScalarPolynomial.from_terms(1, [((1, 1), 1)])

    @settings(max_examples=40)
    @given(st.fractions(min_value=-3, max_value=3, max_denominator=50))
    def test_exact_matches_float(self, x):
        """Test exact evaluation against vectorised floats"""
        g = ScalarPolynomial.from_expression("3*x1**3 - x1/7 + 2", 1)
        exact = g.evaluate((x,))
        assert float(exact) == pytest.approx(g.evaluate_points(np.array([[float(x)]]))[0], abs=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(quartic, plane_point, st.integers(0, 1))
    def test_derivative_matches_central_difference(self, g, x, axis):
        """Test d/dx_axis against central differences with h = 1e-5, within C h^2"""
        h = Fraction(1, 10 ** 5)
        unit = tuple(int(a == axis) for a in range(2))
        plus = tuple(v + h * u for v, u in zip(x, unit))
        minus = tuple(v - h * u for v, u in zip(x, unit))
        difference = (g.evaluate(plus) - g.evaluate(minus)) / (2 * h)
        exact = g.derivative(unit).evaluate(x)

        # C = sup |d^3 g| / 6 over the stencil
        low, high = g.derivative(tuple(3 * u for u in unit)).enclose(
            np.array([[float(v) for v in minus]]), np.array([[float(v) for v in plus]])
        )
        C = max(abs(low[0]), abs(high[0])) / 6
        assert abs(float(difference - exact)) <= C * float(h) ** 2 * (1 + 1e-9)


class TestPolynomialMap:
    """Test maps f: R^d -> R^n"""

    def test_worked_map(self, worked_map, golden_vector):
        """Test f(0) = (1, phi) for the worked example"""
        assert (worked_map.d, worked_map.n, worked_map.l) == (1, 2, 2)
        assert worked_map.value_at_origin() == golden_vector.coordinates
        assert worked_map.evaluate((Fraction(1, 2),))[0] == Fraction(3, 2)

    def test_config_declared_n(self, worked_map_spec):
        """Test that n must match the components"""
        worked_map_spec["n"] = 3
        with pytest.raises(ConfigError):
            PolynomialMap.from_config(worked_map_spec)

    @pytest.mark.parametrize("term", [["1"], ["1", "x"], ["1", 1, 1]])
    def test_config_bad_terms(self, worked_map_spec, term):
        """Test term shape and exponent validation"""
        worked_map_spec["components"][0] = [term]
        with pytest.raises(ConfigError):
            PolynomialMap.from_config(worked_map_spec)

    def test_config_not_object(self):
        """Test that a map spec must be a dict"""
        with pytest.raises(ConfigError):
            PolynomialMap.from_config([1, 2])

    def test_l_must_be_positive(self):
        """Test l >= 1"""
        with pytest.raises(PreconditionFailed):
            PolynomialMap.from_expressions(["x1"], 1, l=0)

    def test_to_dict(self, worked_map):
        """Test the serialised shape"""
        doc = worked_map.to_dict()
        assert (doc["d"], doc["n"], doc["l"]) == (1, 2, 2)
        assert sorted(doc["components"][0]) == [["1/1", 0], ["1/1", 1]]

    def test_jacobian(self, worked_map):
        """Test Df = (1, 2x)"""
        assert worked_map.jacobian_at([0.5]).tolist() == [[1.0], [1.0]]
        assert worked_map.jacobian()[1][0].terms == [((1,), Fraction(2))]

    def test_linear_form(self, worked_map, golden_vector):
        """Test (f(x), i) as a polynomial"""
        form = worked_map.linear_form((1, -1))
        assert form.evaluate((Fraction(0),)) == golden_vector.dot((1, -1))
        with pytest.raises(DimensionMismatch):
            worked_map.linear_form((1, 2, 3))

    def test_compose_linear(self):
        """Test x -> f(2x + 1) on the moment curve"""
        g = moment_curve(2).compose_linear([[2]], [1])
        assert g.evaluate((Fraction(0),)) == (Fraction(1), Fraction(1))
        assert g.evaluate((Fraction(1),)) == (Fraction(3), Fraction(9))
        with pytest.raises(DimensionMismatch):
            moment_curve(2).compose_linear([[1, 0]])

    def test_taylor_truncation(self):
        """Test that terms above the order are dropped"""
        g = moment_curve(3).taylor_truncation(2)
        assert g.evaluate((Fraction(2),)) == (Fraction(2), Fraction(4), Fraction(0))

    def test_shift(self):
        """Test alpha + f(x) and its length check"""
        g = shifted_map([1, Fraction(1, 2)], moment_curve(2))
        assert g.value_at_origin() == (Fraction(1), Fraction(1, 2))
        with pytest.raises(DimensionMismatch):
            shifted_map([1], moment_curve(2))

    def test_evaluate_points_shape(self, worked_map):
        """Test (N, d) -> (N, n)"""
        values = worked_map.evaluate_points(np.array([[0.0], [1.0], [2.0]]))
        assert values.shape == (3, 2)
        assert values[2, 0] == pytest.approx(3.0)
