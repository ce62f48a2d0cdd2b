"""Profile measurement helpers."""

import numpy as np
import pytest

from excitable.analysis import fwhm, super_level_regions


class TestSuperLevelRegions:
    def test_single_interior_run(self):
        v = np.array([0.0, 0.0, 1.0, 1.0, 0.0])
        assert super_level_regions(v, 0.5) == [(2, 4)]

    def test_multiple_runs(self):
        v = np.array([1.0, 0.0, 1.0, 0.0, 1.0])
        assert super_level_regions(v, 0.5) == [(0, 1), (2, 3), (4, 5)]

    def test_edge_touching_runs(self):
        v = np.array([1.0, 1.0, 0.0, 0.0])
        assert super_level_regions(v, 0.5) == [(0, 2)]
        v = np.array([0.0, 0.0, 1.0, 1.0])
        assert super_level_regions(v, 0.5) == [(2, 4)]

    def test_no_region(self):
        assert super_level_regions(np.zeros(5), 0.5) == []

    def test_strictly_above_level(self):
        v = np.array([0.5, 0.5, 0.5])
        assert super_level_regions(v, 0.5) == []


class TestFwhm:
    def test_gaussian_width(self):
        x = np.linspace(-10.0, 10.0, 2001)
        sigma = 1.5
        v = np.exp(-(x**2) / (2 * sigma**2))
        expected = 2.0 * sigma * np.sqrt(2.0 * np.log(2.0))
        assert fwhm(x, v) == pytest.approx(expected, rel=1e-3)

    def test_triangle_width(self):
        x = np.linspace(-2.0, 2.0, 401)
        v = np.maximum(0.0, 1.0 - np.abs(x))
        assert fwhm(x, v) == pytest.approx(1.0, abs=1e-6)

    def test_explicit_baseline(self):
        x = np.linspace(-5.0, 5.0, 1001)
        v = 2.0 + np.exp(-(x**2) / 2.0)  # sits on a pedestal
        expected = 2.0 * np.sqrt(2.0 * np.log(2.0))
        assert fwhm(x, v, baseline=2.0) == pytest.approx(expected, rel=1e-3)
