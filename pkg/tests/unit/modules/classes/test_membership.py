"""Unit tests for arithmetic class membership"""

from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from modules.classes.membership import IN_CLASS, VIOLATED, exp_index, membership
from modules.classes.sequences import DecreasingSequence
from modules.lattice.target import TargetVector
from shared.errors import PreconditionFailed, SequenceDomainError


class TestExpIndex:
    """Test floor(log2 ||i||) + 1"""

    @pytest.mark.parametrize("i,expected", [
        ((1,), 1),
        ((1, 1), 1),
        ((2, 0), 2),
        ((1, -2), 2),
        ((3, 4), 3),
        ((0, 4), 3),
        ((7, 7, 7), 4),
    ])
    def test_values(self, i, expected):
        """Test hand-computed indices, powers of two included"""
        assert exp_index(i) == expected

    def test_zero(self):
        """Test that the zero vector has no index"""
        with pytest.raises(PreconditionFailed):
            exp_index((0, 0))


class TestMembership:
    """Test C(a) up to a cutoff"""

    def test_golden_in_class(self, golden_vector, worked_sequence):
        """Test (1, phi) in C((1/5) 2^-k) up to K = 6"""
        verdict = membership(golden_vector, worked_sequence, 6)
        assert verdict.in_class
        assert verdict.to_dict() == {"status": IN_CLASS, "cutoff": 6}
        assert not verdict.certify(golden_vector, worked_sequence)

    def test_exact_hit_violates(self, half_vector):
        """Test that (1, -2) kills (1, 1/2) at k = 2"""
        a = DecreasingSequence.geometric(Fraction(1, 4), 3)
        verdict = membership(half_vector, a, 2)
        assert verdict.status == VIOLATED
        assert (verdict.k, verdict.witness, verdict.block) == (2, (1, -2), 2)
        assert verdict.value == 0
        assert verdict.certify(half_vector, a)
        assert verdict.to_dict()["value"] == "0/1"

    def test_violation_at_first_term(self, half_vector, unit_sequence):
        """Test sigma_0 = 1/2 < a_0 = 1 with the witness in block 1"""
        verdict = membership(half_vector, unit_sequence, 3)
        assert (verdict.k, verdict.witness, verdict.block) == (0, (0, 1), 1)
        assert verdict.certify(half_vector, unit_sequence)

    def test_tampered_verdict_not_certified(self, half_vector, unit_sequence):
        """Test that a wrong value fails re-evaluation"""
        verdict = membership(half_vector, unit_sequence, 3)
        assert not replace(verdict, value=Fraction(1, 3)).certify(half_vector, unit_sequence)

    def test_threads_agree(self, half_vector):
        """Test that concurrent evaluation keeps the first failing k"""
        a = DecreasingSequence.geometric(Fraction(1, 4), 3)
        assert membership(half_vector, a, 4, workers=3) == membership(half_vector, a, 4)

    def test_negative_cutoff(self, half_vector, unit_sequence):
        """Test K >= 0"""
        with pytest.raises(PreconditionFailed):
            membership(half_vector, unit_sequence, -1)

    def test_cutoff_beyond_table(self, half_vector):
        """Test that K must lie in the sequence domain"""
        with pytest.raises(SequenceDomainError):
            membership(half_vector, DecreasingSequence.table(["1/8", "1/16"]), 2)

    @settings(max_examples=40, deadline=None)
    @given(
        st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=10), min_size=2, max_size=2),
        st.fractions(min_value=Fraction(1, 100), max_value=1, max_denominator=100),
        st.fractions(min_value=1, max_value=4, max_denominator=4),
        st.sampled_from([Fraction(0), Fraction(1, 2), Fraction(1)]),
    )
    def test_classes_nest(self, coords, C, factor, tau):
        """Test a <= b termwise implies C(b) inside C(a)"""
        alpha = TargetVector(tuple(coords))
        small = DecreasingSequence.geometric(C / factor, tau)
        large = DecreasingSequence.geometric(C, tau)
        if membership(alpha, large, 3).in_class:
            assert membership(alpha, small, 3).in_class
