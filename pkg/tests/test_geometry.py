"""Geometry, domain, and sampling tests.

Statistical assertions use fixed seeds and 3-sigma (or stated) gates
against closed-form moments of the uniform distributions.
"""

import math

import numpy as np
import pytest
from scipy.stats import chi2

from bordernet.errors import ParameterError
from bordernet.geometry import (
    Point2,
    RectDomain,
    RngState,
    SectorDomain,
    distance,
    domain_area,
    sample_poisson_count,
    sample_uniform,
    sample_uniform_many,
)


class TestDomains:
    def test_sector_area(self):
        assert SectorDomain(3.0, 2 * math.pi).area == pytest.approx(9 * math.pi)
        assert SectorDomain(3.0, math.pi / 2).area == pytest.approx(9 * math.pi / 4)
        assert domain_area(SectorDomain(2.0, 1.0)) == pytest.approx(2.0)

    def test_rect_area(self):
        assert RectDomain(10.0, 10.0).area == pytest.approx(100.0)
        assert domain_area(RectDomain(2.0, 0.5)) == pytest.approx(1.0)

    def test_sector_membership(self):
        quarter = SectorDomain(1.0, math.pi / 2)
        assert quarter.contains(Point2(0.5, 0.5))
        assert quarter.contains(Point2(0.0, 0.0))
        assert quarter.contains(Point2(1.0, 0.0))  # boundary
        assert not quarter.contains(Point2(0.5, -0.5))  # wrong quadrant
        assert not quarter.contains(Point2(1.1, 0.0))  # beyond radius

    def test_full_disc_membership(self):
        disc = SectorDomain(2.0, 2 * math.pi)
        assert disc.contains(Point2(-1.0, -1.0))
        assert not disc.contains(Point2(2.0, 1.0))

    def test_rect_membership(self):
        rect = RectDomain(4.0, 2.0)
        assert rect.contains(Point2(0.0, 0.0))
        assert rect.contains(Point2(4.0, 2.0))
        assert not rect.contains(Point2(-0.1, 1.0))
        assert not rect.contains(Point2(2.0, 2.1))

    def test_validation(self):
        with pytest.raises(ParameterError):
            SectorDomain(0.0, math.pi)
        with pytest.raises(ParameterError):
            SectorDomain(1.0, 0.0)
        with pytest.raises(ParameterError):
            SectorDomain(1.0, 2 * math.pi + 0.1)
        with pytest.raises(ParameterError):
            RectDomain(-1.0, 1.0)
        with pytest.raises(ParameterError):
            Point2(math.nan, 0.0)

    def test_distance(self):
        assert distance(Point2(0.0, 0.0), Point2(3.0, 4.0)) == 5.0
        assert distance(Point2(1.0, 1.0), Point2(1.0, 1.0)) == 0.0


class TestRngState:
    def test_same_key_same_stream(self):
        a = RngState(12345, 7).generator.random(8)
        b = RngState(12345, 7).generator.random(8)
        np.testing.assert_array_equal(a, b)

    def test_different_stream_different_draws(self):
        a = RngState(12345, 0).generator.random(8)
        b = RngState(12345, 1).generator.random(8)
        assert not np.array_equal(a, b)

    def test_validation(self):
        with pytest.raises(ParameterError):
            RngState(-1, 0)
        with pytest.raises(ParameterError):
            RngState(2**64, 0)
        with pytest.raises(ParameterError):
            RngState(1, -3)


class TestSampling:
    def test_scalar_matches_batch_draw_order(self):
        # One scalar draw consumes the same variates as a batch of one.
        single = sample_uniform(SectorDomain(3.0, math.pi), RngState(99, 0))
        batch = sample_uniform_many(SectorDomain(3.0, math.pi), 1, RngState(99, 0))
        assert (single.x, single.y) == (batch[0, 0], batch[0, 1])

    def test_all_samples_inside_domain(self):
        for domain in (SectorDomain(2.0, 1.3), RectDomain(3.0, 0.5)):
            pts = sample_uniform_many(domain, 2000, RngState(5, 0))
            assert all(domain.contains(Point2(x, y)) for x, y in pts)

    def test_sector_radial_mean(self):
        # E[r] = 2R/3 for uniform sampling in any sector of radius R.
        n = 1_000_000
        pts = sample_uniform_many(SectorDomain(3.0, math.pi / 2), n, RngState(42, 0))
        r = np.hypot(pts[:, 0], pts[:, 1])
        # Var(r) = R^2/2 - (2R/3)^2 = R^2/18
        se = math.sqrt(9.0 / 18.0 / n)
        assert abs(float(r.mean()) - 2.0) < 3 * se

    def test_half_disc_left_right_balance(self):
        n = 400_000
        pts = sample_uniform_many(SectorDomain(1.0, 2 * math.pi), n, RngState(7, 0))
        frac_left = float(np.mean(pts[:, 0] < 0.0))
        assert abs(frac_left - 0.5) < 3 * math.sqrt(0.25 / n)

    def test_sector_uniformity_chi_square(self):
        # Partition the quarter disc radius x angle into equal-probability
        # 4x4 cells; chi-square on 1e5 samples at the 0.001 level.
        n = 100_000
        domain = SectorDomain(3.0, math.pi / 2)
        pts = sample_uniform_many(domain, n, RngState(2718, 0))
        r = np.hypot(pts[:, 0], pts[:, 1])
        phi = np.arctan2(pts[:, 1], pts[:, 0])
        # Equal-area radial edges: r_k = R sqrt(k/4)
        r_bin = np.clip((4 * (r / 3.0) ** 2).astype(int), 0, 3)
        a_bin = np.clip((4 * phi / (math.pi / 2)).astype(int), 0, 3)
        counts = np.bincount(r_bin * 4 + a_bin, minlength=16)
        expected = n / 16.0
        stat = float(((counts - expected) ** 2 / expected).sum())
        assert stat < chi2.ppf(0.999, df=15)

    def test_rect_uniformity_chi_square(self):
        n = 100_000
        pts = sample_uniform_many(RectDomain(2.0, 5.0), n, RngState(123, 0))
        x_bin = np.clip((4 * pts[:, 0] / 2.0).astype(int), 0, 3)
        y_bin = np.clip((4 * pts[:, 1] / 5.0).astype(int), 0, 3)
        counts = np.bincount(x_bin * 4 + y_bin, minlength=16)
        expected = n / 16.0
        stat = float(((counts - expected) ** 2 / expected).sum())
        assert stat < chi2.ppf(0.999, df=15)

    def test_poisson_count_moments(self):
        # Intensity 12 on a full disc of radius 3: mean = 12 * 9 pi = 108 pi.
        mean = 12.0 * SectorDomain(3.0, 2 * math.pi).area
        assert mean == pytest.approx(339.29200658769764, rel=1e-12)
        n = 40_000
        rng = RngState(31415, 0)
        counts = np.array([sample_poisson_count(mean, rng) for _ in range(n)])
        se_mean = math.sqrt(mean / n)
        assert abs(float(counts.mean()) - mean) < 3 * se_mean
        # Poisson: variance equals mean (se of sample variance ~ sqrt(2/n) m)
        assert abs(float(counts.var()) - mean) < 4 * math.sqrt(2.0 / n) * mean

    def test_poisson_validation(self):
        with pytest.raises(ParameterError):
            sample_poisson_count(-1.0, RngState(0, 0))
        with pytest.raises(ParameterError):
            sample_uniform_many(SectorDomain(1.0, 1.0), -1, RngState(0, 0))
        # Zero is a legal empty batch (a realization with no interferers).
        empty = sample_uniform_many(SectorDomain(1.0, 1.0), 0, RngState(0, 0))
        assert empty.shape == (0, 2)
