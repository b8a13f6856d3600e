"""Unit tests for decreasing sequences and the derived sequences a', rho"""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from modules.classes.sequences import (
    DecreasingSequence,
    DyadicValue,
    derived_exponents,
    derived_sequence,
    rho_sequence,
)
from shared.errors import ConfigError, SequenceDomainError


class TestDyadicValue:
    """Test exact values coef * 2^exponent"""

    def test_integral_exponent_folded(self):
        """Test that 3 * 2^2 is stored as 12"""
        value = DyadicValue(3, 2)
        assert value.is_rational
        assert value.as_fraction() == 12
        assert DyadicValue(3, -2) == Fraction(3, 4)

    def test_irrational_ordering(self):
        """Test 7/5 < sqrt(2) < 3/2 exactly"""
        root2 = DyadicValue(1, Fraction(1, 2))
        assert Fraction(7, 5) < float(root2) < Fraction(3, 2)
        assert root2 > Fraction(7, 5)
        assert root2 < Fraction(3, 2)
        assert root2 ** 2 == 2

    def test_arithmetic(self):
        """Test products and quotients keep exponents exact"""
        a = DyadicValue(Fraction(1, 5), Fraction(-1, 3))
        b = DyadicValue(5, Fraction(1, 3))
        assert a * b == 1
        assert (a / a) == 1
        assert (a * 2).coef == Fraction(2, 5)

    def test_bracket(self):
        """Test rational brackets of sqrt(2)"""
        lo, hi = DyadicValue(1, Fraction(1, 2)).bracket(bits=10)
        assert lo * lo <= 2 <= hi * hi
        assert hi - lo == Fraction(1, 1024)
        assert DyadicValue(Fraction(1, 3)).bracket() == (Fraction(1, 3), Fraction(1, 3))

    def test_positive_only(self):
        """Test that terms must be positive"""
        with pytest.raises(SequenceDomainError):
            DyadicValue(0)
        assert DyadicValue(1) > 0
        assert DyadicValue(1) > -3

    def test_irrational_not_fraction(self):
        """Test as_fraction refuses 2^(1/2)"""
        with pytest.raises(SequenceDomainError):
            DyadicValue(1, Fraction(1, 2)).as_fraction()


class TestDecreasingSequence:
    """Test geometric and table sequences"""

    def test_geometric_terms(self, worked_sequence):
        """Test a_k = (1/5) 2^-k"""
        assert worked_sequence.term(0) == Fraction(1, 5)
        assert worked_sequence(3) == Fraction(1, 40)
        assert worked_sequence.float_value(1) == pytest.approx(0.1)

    def test_fractional_tau(self):
        """Test a_k = 2^(-k/2) stays exact"""
        a = DecreasingSequence.geometric(1, Fraction(1, 2))
        assert a.term(2) == Fraction(1, 2)
        assert not a.term(1).is_rational

    def test_geometric_normalized(self):
        """Test that C > 1 is brought down to a_0 = 1"""
        assert DecreasingSequence.geometric(3, 1).C == 1
        assert DecreasingSequence.geometric(3, 1, normalize=False).C == 3

    def test_table(self):
        """Test tables, their domain and normalization"""
        a = DecreasingSequence.table([2, 1, 1, "1/2"])
        assert a.values == (Fraction(1), Fraction(1, 2), Fraction(1, 2), Fraction(1, 4))
        assert a.k_max == 3
        with pytest.raises(SequenceDomainError):
            a.term(4)

    def test_table_must_not_increase(self):
        """Test the nonincreasing check"""
        with pytest.raises(SequenceDomainError):
            DecreasingSequence.table(["1/2", "1"])

    def test_negative_index(self, unit_sequence):
        """Test k >= 0"""
        with pytest.raises(SequenceDomainError):
            unit_sequence.term(-1)

    @pytest.mark.parametrize("spec", [
        {"type": "geometric", "C": "1/5"},
        {"type": "spiral"},
        {"type": "geometric", "C": "0", "tau": "1"},
        {"type": "table", "values": ["1", "2"], "normalize": False},
        "geometric",
    ])
    def test_from_config_errors(self, spec):
        """Test malformed sequence specs"""
        with pytest.raises(ConfigError):
            DecreasingSequence.from_config(spec)

    def test_to_dict(self, worked_sequence):
        """Test the config form is reproduced"""
        assert worked_sequence.to_dict() == {"type": "geometric", "C": "1/5", "tau": "1/1"}
        assert DecreasingSequence.from_config(worked_sequence.to_dict()) == worked_sequence


class TestDerivedSequences:
    """Test a' and rho"""

    def test_exponents(self):
        """Test E and P for n = 2, d = 1, l = 2"""
        assert derived_exponents(2, 1, 2) == (26, 6)
        with pytest.raises(SequenceDomainError):
            derived_exponents(0, 1, 1)

    def test_derived_geometric(self):
        """Test a' of 2^-k for n = 2, d = 1, l = 2"""
        assert derived_sequence(DecreasingSequence.geometric(1, 1), 2, 1, 2).tau == 32

    def test_rho_threshold_index(self, worked_sequence):
        """Test N = 0 when rho_0 is already below 1/2"""
        rho = rho_sequence(worked_sequence, 2, 1, 2)
        assert rho.N == 0
        assert rho.rho.term(0) == Fraction(1, 5) ** 5

    def test_rho_constant_sequence(self):
        """Test N = 1 for a_k = 1"""
        rho = rho_sequence(DecreasingSequence.geometric(1, 0), 1, 1, 1)
        assert rho.N == 1

    def test_rho_table_never_small(self):
        """Test that a table whose rho stays large reports its length"""
        rho = rho_sequence(DecreasingSequence.table([1]), 1, 1, 1)
        assert rho.N == 1

    @settings(max_examples=40)
    @given(
        st.fractions(min_value=Fraction(1, 64), max_value=1, max_denominator=64),
        st.fractions(min_value=0, max_value=3, max_denominator=4),
        st.integers(1, 3), st.integers(1, 2), st.integers(1, 3),
        st.integers(0, 6),
    )
    def test_derived_is_rho_times_a(self, C, tau, n, d, l, k):
        """Test a'_k = rho_k a_k exactly"""
        a = DecreasingSequence.geometric(C, tau)
        rho = rho_sequence(a, n, d, l, search_limit=10)
        assert derived_sequence(a, n, d, l).term(k) == rho.rho.term(k) * a.term(k)

    @settings(max_examples=30)
    @given(
        st.lists(st.fractions(min_value=Fraction(1, 100), max_value=1, max_denominator=100),
                 min_size=1, max_size=6),
        st.integers(1, 2),
    )
    def test_table_rho_below_half_after_N(self, values, n):
        """Test rho_k < 1/2 for every k >= N in a table"""
        a = DecreasingSequence.table(sorted(values, reverse=True))
        rho = rho_sequence(a, n, 1, 1)
        for k in range(rho.N, len(values)):
            assert rho.rho.term(k) < Fraction(1, 2)
