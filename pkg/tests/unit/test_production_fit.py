# ruff: noqa: PLR2004
"""Unit tests for the linear production surrogates."""

import logging

import numpy as np
import pytest

from p2hsched.exceptions.errors import DomainError
from p2hsched.services.production_fit import (
    fit_hydrogen,
    fit_power,
    fit_production_models,
    hydrogen_curve,
    hydrogen_slope,
)


class TestPowerFit:
    """Tests for the affine stack-power fit."""

    def test_recovers_affine_model(self, awe_unit):
        """Test that an affine ground truth is fitted exactly."""
        fit = fit_power(awe_unit, lambda i, t: 2.0 * i + 0.1 * t + 3.0)
        assert fit.a1 == pytest.approx(2.0)
        assert fit.a2 == pytest.approx(0.1)
        assert fit.a3 == pytest.approx(3.0)
        assert fit.max_error == pytest.approx(0.0, abs=1e-9)

    def test_default_model_signs(self, awe_unit):
        """Test that power rises with current and falls with temperature."""
        fit = fit_power(awe_unit)
        assert fit.a1 > 0
        assert fit.a2 < 0
        assert 0 < fit.max_error < 0.05

    def test_evaluate(self, awe_unit):
        """Test that the fit evaluates its affine form."""
        fit = fit_power(awe_unit, lambda i, t: 2.0 * i + 0.1 * t + 3.0)
        assert fit.evaluate(4.0, 50.0) == pytest.approx(16.0)

    def test_large_error_is_logged(self, awe_unit, caplog):
        """Test that a strongly curved model logs a fit warning."""
        with caplog.at_level(logging.WARNING, logger="p2hsched"):
            fit = fit_power(awe_unit, lambda i, t: 10.0 * i**2 + 0.0 * t)
        assert fit.max_error > 0.03
        assert "Power fit of AWE1 exceeds" in caplog.text


class TestHydrogenFit:
    """Tests for the tangent bound on hydrogen production."""

    def test_slope_matches_finite_difference(self, awe_unit):
        """Test the analytic derivative against central differences."""
        currents = np.linspace(awe_unit.i_min, awe_unit.i_max, 7)
        step = 1e-6
        numeric = (
            hydrogen_curve(awe_unit, currents + step, 40.0)
            - hydrogen_curve(awe_unit, currents - step, 40.0)
        ) / (2 * step)
        np.testing.assert_allclose(hydrogen_slope(awe_unit, currents, 40.0), numeric, rtol=1e-5)

    def test_bound_dominates_curve(self, awe_unit):
        """Test that every tangent bound overestimates production at t_min."""
        fit = fit_hydrogen(awe_unit, 4)
        for current in np.linspace(awe_unit.i_min, awe_unit.i_max, 50):
            truth = float(hydrogen_curve(awe_unit, np.array([current]), awe_unit.t_min)[0])
            assert fit.evaluate(current) >= truth - 1e-9

    def test_bound_dominates_hotter_stacks(self, pemel_unit):
        """Test that production at t_max stays below the t_min bound."""
        fit = pemel_unit.h2_fit
        currents = np.linspace(pemel_unit.i_min, pemel_unit.i_max, 25)
        hot = hydrogen_curve(pemel_unit, currents, pemel_unit.t_max)
        assert all(fit.evaluate(i) >= q for i, q in zip(currents, hot, strict=True))

    def test_more_segments_tighten(self, awe_unit):
        """Test that more tangent rows reduce the largest gap."""
        assert fit_hydrogen(awe_unit, 8).max_gap < fit_hydrogen(awe_unit, 2).max_gap

    def test_segment_count(self, awe_unit):
        """Test that each segment contributes one row."""
        fit = fit_hydrogen(awe_unit, 5)
        assert len(fit.slopes) == len(fit.intercepts) == 5

    def test_too_few_segments(self, awe_unit):
        """Test that fewer than two segments are rejected."""
        with pytest.raises(DomainError):
            fit_production_models(awe_unit, segments=1)

    def test_preset_units_carry_fits(self, awe_unit, pemel_unit):
        """Test that factory electrolyzers come with both surrogates."""
        for unit in (awe_unit, pemel_unit):
            assert unit.power_fit is not None
            assert len(unit.h2_fit.slopes) == 4
