"""Unit tests for the density curve of f^{-1}(C(a'))"""

from fractions import Fraction

import numpy as np
import pytest

from modules.classes.bands import BandSet, candidate_band_set
from modules.classes.membership import membership
from modules.classes.sequences import DecreasingSequence
from modules.lattice.target import TargetVector
from modules.maps.polynomial import PolynomialMap
from modules.measure.density import (
    MONTECARLO,
    NO_BANDS,
    UNION,
    DensityCurve,
    DensityPoint,
    band_picture,
    band_reach,
    check_density_preconditions,
    density_curve,
    excluded_union_bound,
    read_density_csv,
)
from modules.measure.estimators import clopper_pearson, sample_chunk
from shared.errors import ConfigError, PreconditionFailed
from shared.geometry import Ball


class TestPreconditions:
    """Test the class and curvature requirements"""

    def test_worked_map_passes(self, worked_map, worked_sequence):
        """Test that (1, phi) + (x, x^2) satisfies both"""
        check_density_preconditions(worked_map, worked_sequence, 6)

    def test_center_outside_class(self, worked_map_spec, worked_sequence):
        """Test f(0) = (1, 1/2), hit exactly by (1, -2)"""
        worked_map_spec["shift"] = ["1", "1/2"]
        f = PolynomialMap.from_config(worked_map_spec)
        with pytest.raises(PreconditionFailed):
            check_density_preconditions(f, worked_sequence, 3)

    def test_flat_map(self, worked_sequence):
        """Test that a line is not 2-curved"""
        f = PolynomialMap.from_expressions(["1 + x1", "3/2 + x1"], 1, l=2)
        with pytest.raises(PreconditionFailed, match="curved"):
            check_density_preconditions(f, DecreasingSequence.geometric(Fraction(1, 100), 1), 1)


class TestDensityCurve:
    """Test density lower bounds"""

    def test_worked_example(self, worked_map, worked_sequence):
        """Test that tiny derived bands leave almost the whole ball"""
        curve = density_curve(worked_map, worked_sequence, 2, 1, 2, [0.1, 0.01], 6, samples=4000, seed=1)
        assert curve.radii == [0.1, 0.01]
        for point in curve.points:
            assert 0.99 < point.density_lb <= 1.0
            assert point.source in (UNION, MONTECARLO, NO_BANDS)
            assert point.err >= 0.0
            assert point.truncation_tail == pytest.approx(0.125)

    def test_no_bands_near_center(self, worked_map, worked_sequence):
        """Test that a small radius and K = 1 meet no band"""
        curve = density_curve(worked_map, worked_sequence, 2, 1, 2, [0.001], 1, samples=1000)
        point = curve.points[0]
        assert (point.source, point.density_lb, point.bands_considered) == (NO_BANDS, 1.0, 0)

    def test_explicit_derived_sequence(self, worked_map, worked_sequence):
        """Test that an explicit a' replaces the derived one"""
        derived = DecreasingSequence.geometric(Fraction(1, 20), 1)
        curve = density_curve(worked_map, worked_sequence, 2, 1, 2, [0.05], 3,
                              samples=2000, derived=derived)
        assert curve.meta["derived"] == derived.to_dict()
        assert 0.0 <= curve.points[0].density_lb <= 1.0

    def test_csv(self, tmp_path, worked_map, worked_sequence):
        """Test the stamped density file"""
        curve = density_curve(worked_map, worked_sequence, 2, 1, 2, [0.001], 1, samples=1000)
        rows = read_density_csv(curve.write_csv(tmp_path / "density_curve.csv"))
        assert rows == [{
            "r": 0.001, "density_lb": 1.0, "err": 0.0, "bands_considered": 0,
            "truncation_tail": pytest.approx(4.0), "source": NO_BANDS, "certified": True,
        }]

    def test_montecarlo_rows_are_uncertified(self, tmp_path):
        """Test that rows resting on the 95% upper limit are flagged in the file"""
        sampled = DensityPoint(0.1, 0.97, 0.01, 5, 0.1, 3.0, 0.02, 0.03, MONTECARLO, 1000)
        bounded = DensityPoint(0.01, 0.999, 0.0, 2, 0.1, 0.001, 0.0, 0.004, UNION, 1000)
        assert (sampled.certified, bounded.certified) == (False, True)

        rows = read_density_csv(DensityCurve([sampled, bounded]).write_csv(tmp_path / "density_curve.csv"))
        assert [row["certified"] for row in rows] == [False, True]

    def test_union_bound_covers_violations(self, worked_map, worked_sequence):
        """Test that sampled points leaving C_K(a') lie in a band and the union bound covers their share"""
        derived = DecreasingSequence.geometric(Fraction(1, 20), 1)
        r, K = 0.05, 3
        curve = density_curve(worked_map, worked_sequence, 2, 1, 2, [r], K,
                              samples=1000, seed=3, derived=derived)
        bands = candidate_band_set(derived, DecreasingSequence.geometric(1, 0), band_reach(worked_map, r), K,
                                   center=TargetVector(worked_map.value_at_origin()))

        values = worked_map.evaluate_points(sample_chunk(Ball.centered(1, r), 0, 400, 11))
        violated = np.array([
            not membership(TargetVector(tuple(Fraction(float(c)) for c in y)), derived, K).in_class
            for y in values
        ])
        # (-5, 3) cuts f(B(0, r)) near x = -0.029
        assert violated.any()
        assert not (violated & ~bands.hit_mask(values)).any()
        assert clopper_pearson(int(violated.sum()), len(violated))[0] <= curve.points[0].union_bound

    def test_density_nonincreasing_in_cutoff(self, worked_map, worked_sequence):
        """Test that raising K only adds bands and never raises the bound"""
        derived = DecreasingSequence.geometric(Fraction(1, 20), 1)
        points = [
            density_curve(worked_map, worked_sequence, 2, 1, 2, [0.05], K,
                          samples=2000, seed=5, derived=derived).points[0]
            for K in range(1, 6)
        ]
        densities = [p.density_lb for p in points]
        counts = [p.bands_considered for p in points]
        assert all(later <= earlier for earlier, later in zip(densities, densities[1:]))
        assert counts == sorted(counts)
        assert densities[-1] < 1.0

    @pytest.mark.parametrize("radii", [[0.1, 0.1], [0.01, 0.1], [], [0.1, -0.1]])
    def test_radii_validation(self, worked_map, worked_sequence, radii):
        """Test positive, strictly decreasing radii"""
        with pytest.raises(ConfigError):
            density_curve(worked_map, worked_sequence, 2, 1, 2, radii, 3)

    def test_dimension_mismatch(self, worked_map, worked_sequence):
        """Test that n and d must describe the map"""
        with pytest.raises(ConfigError):
            density_curve(worked_map, worked_sequence, 3, 1, 2, [0.1], 3)


class TestUnionBound:
    """Test the certified union bound"""

    def test_empty(self, worked_map):
        """Test that no bands exclude nothing"""
        union = excluded_union_bound(worked_map, BandSet.empty(2), 0.1)
        assert union.fraction == 0.0
        assert union.uncertified == 0

    def test_single_band_bound(self, worked_map):
        """Test a band through f(0) is bounded by the sublevel lemma"""
        band_set = BandSet(2, np.array([[1, -1]]), np.array([2]), {2: Fraction(1, 10 ** 6)})
        union = excluded_union_bound(worked_map, band_set, 0.1)
        assert 0.0 < union.fraction <= 1.0
        assert union.per_band.shape == (1,)


class TestBandPicture:
    """Test the data behind the band plot"""

    def test_picture(self, worked_map, worked_sequence):
        """Test the center, the reach and the listed bands"""
        center, reach, bands = band_picture(worked_map, worked_sequence, 2, 1, 2, 0.25, 3,
                                            derived=DecreasingSequence.geometric(Fraction(1, 20), 1))
        assert [float(c) for c in center] == pytest.approx([1.0, 1.6180339887498949])
        assert reach == pytest.approx(0.25 * (1 + 4 * 0.25 ** 2) ** 0.5, rel=1e-6)
        assert all(len(i) == 2 and w > 0 for i, w in bands)

    def test_constant_map_matches_curve(self, worked_sequence):
        """Test that the picture and the curve search the same reach for a constant map"""
        f = PolynomialMap.from_expressions(["1", "1/2"], 1, l=2)
        derived = DecreasingSequence.geometric(Fraction(1, 20), 1)
        assert band_reach(f, 0.1) == Fraction(0.1) * Fraction(1, 10 ** 12)

        _, reach, bands = band_picture(f, worked_sequence, 2, 1, 2, 0.1, 3, derived=derived)
        curve = density_curve(f, worked_sequence, 2, 1, 2, [0.1], 3, samples=1000,
                              derived=derived, check_preconditions=False)
        assert reach == float(band_reach(f, 0.1))
        assert len(bands) == curve.points[0].bands_considered == 0
