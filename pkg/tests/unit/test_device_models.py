# ruff: noqa: PLR2004
"""Unit tests for the electrolyzer, PEMEL and AFG device models."""

import math
from dataclasses import replace

import numpy as np
import pytest

from p2hsched.config.constants import FARADAY, M_H2
from p2hsched.exceptions.errors import ContractViolationError, DomainError
from p2hsched.services.device_models import (
    afg_power_from_fuel,
    calibrate_edl_capacitance,
    cooling_limit,
    faraday_efficiency,
    faraday_efficiency_at_density,
    fuel_from_power,
    hydrogen_rate,
    pemel_virtual_inertia,
    stack_step_response,
    step_response_fraction,
    thermal_step,
)


class TestFaradayEfficiency:
    """Tests for the Faraday efficiency fit."""

    def test_zero_current(self, awe_unit):
        """Test that no current gives zero efficiency."""
        assert faraday_efficiency(0.0, 60.0, awe_unit) == 0.0

    def test_half_point_at_80_degrees(self):
        """Test the density where i² equals f1 at 80 °C."""
        assert faraday_efficiency_at_density(math.sqrt(250.0), 80.0) == pytest.approx(0.49975)

    def test_density_50_at_80_degrees(self, awe_unit):
        """Test 50 mA/cm² (2 kA on a 4 m² AWE cell) at 80 °C."""
        expected = 2500.0 / 2750.0 * 0.9995
        assert faraday_efficiency(2.0, 80.0, awe_unit) == pytest.approx(expected)
        assert expected == pytest.approx(0.9086, abs=1e-4)

    def test_increasing_in_current(self, awe_unit):
        """Test strict monotonicity in the stack current."""
        values = [faraday_efficiency(i, 50.0, awe_unit) for i in np.linspace(0.1, 7.99, 20)]
        assert all(b > a for a, b in zip(values, values[1:], strict=False))

    def test_bounded_by_f2(self):
        """Test that the efficiency stays below f2 and approaches it for large densities."""
        f2 = 1.0 - 6.25e-6 * 60.0
        assert faraday_efficiency_at_density(1e3, 60.0) < f2
        assert faraday_efficiency_at_density(1e6, 60.0) == pytest.approx(f2, rel=1e-9)

    @pytest.mark.parametrize("temp", [10.0, 90.0])
    def test_temperature_outside_limits(self, awe_unit, temp):
        """Test that temperatures outside the stack limits are rejected."""
        with pytest.raises(DomainError):
            faraday_efficiency(5.0, temp, awe_unit)

    def test_negative_current(self, awe_unit):
        """Test that a negative current is rejected."""
        with pytest.raises(DomainError):
            faraday_efficiency(-1.0, 60.0, awe_unit)


class TestHydrogenRate:
    """Tests for the hydrogen production rate."""

    def test_zero_current(self, awe_unit):
        """Test zero production at zero current."""
        assert hydrogen_rate(0.0, 60.0, awe_unit) == 0.0

    def test_rated_point_below_faraday_limit(self, awe_unit):
        """Test the AWE at 7.99 kA and 80 °C against the ideal production."""
        rate = hydrogen_rate(7.99, 80.0, awe_unit)
        ideal = awe_unit.n_c * 7.99e3 * M_H2 / (2.0 * FARADAY) * 3.6
        assert 0 < rate < ideal

    def test_linear_in_cell_count(self, awe_unit):
        """Test that doubling the cell count doubles production."""
        doubled = replace(awe_unit, n_c=2 * awe_unit.n_c)
        assert hydrogen_rate(6.0, 60.0, doubled) == pytest.approx(
            2 * hydrogen_rate(6.0, 60.0, awe_unit)
        )

    def test_current_above_limit(self, awe_unit):
        """Test that currents above i_max are rejected."""
        with pytest.raises(DomainError):
            hydrogen_rate(awe_unit.i_max + 1.0, 60.0, awe_unit)


class TestStepResponse:
    """Tests for the EDL step response and its calibration."""

    @pytest.mark.parametrize("tau", [0.0, 0.5, 10.0])
    def test_zero_step(self, awe_unit, tau):
        """Test that no current step gives no power change."""
        assert stack_step_response(awe_unit, 4.0, 0.0, tau) == 0.0

    def test_limit_equals_steady_term(self, awe_unit):
        """Test that the response settles on the exponential-free term."""
        step = 1.0e3
        r_edl = awe_unit.r_edl1 + awe_unit.r_edl2
        steady = awe_unit.n_c * step * (awe_unit.v_re + step * r_edl + step * awe_unit.r_ohm) / 1e6
        late = stack_step_response(awe_unit, 4.0, 1.0, 200.0 * awe_unit.theta)
        assert late == pytest.approx(steady, rel=1e-12)

    def test_monotone_approach(self, awe_unit):
        """Test that the distance to the steady value shrinks over time."""
        final = stack_step_response(awe_unit, 4.0, 1.0, 200.0 * awe_unit.theta)
        gaps = [
            abs(stack_step_response(awe_unit, 4.0, 1.0, tau) - final)
            for tau in np.linspace(0.0, 5.0 * awe_unit.theta, 12)
        ]
        assert all(b < a for a, b in zip(gaps, gaps[1:], strict=False))

    def test_continuous_in_time(self, awe_unit):
        """Test that nearby times give nearby responses."""
        a = stack_step_response(awe_unit, 4.0, 1.0, 1.0)
        b = stack_step_response(awe_unit, 4.0, 1.0, 1.0 + 1e-9)
        assert a == pytest.approx(b, abs=1e-9)

    def test_awe_calibrated_rise_time(self, awe_unit):
        """Test that the AWE reaches 95% of its transition at 2.8 s."""
        assert step_response_fraction(awe_unit, 2.8) == pytest.approx(0.95, rel=1e-6)

    def test_pemel_calibrated_rise_time(self, pemel_unit):
        """Test that the PEMEL reaches 95% of its transition at 0.55 s."""
        assert step_response_fraction(pemel_unit, 0.55) == pytest.approx(0.95, rel=1e-6)

    def test_awe_slower_than_pemel(self, awe_unit, pemel_unit):
        """Test that the AWE time constant exceeds the PEMEL's."""
        assert awe_unit.theta > pemel_unit.theta

    def test_calibration_hits_target(self, awe_unit):
        """Test that a recalibrated capacitance reaches 50% at 1 s."""
        capacitance = calibrate_edl_capacitance(awe_unit, 1.0, 0.5)
        unit = replace(awe_unit, c_edl=capacitance)
        assert step_response_fraction(unit, 1.0) == pytest.approx(0.5, rel=1e-6)

    @pytest.mark.parametrize(("rise_time", "fraction"), [(1.0, 0.0), (1.0, 1.0), (0.0, 0.5)])
    def test_calibration_domain(self, awe_unit, rise_time, fraction):
        """Test that invalid calibration targets are rejected."""
        with pytest.raises(DomainError):
            calibrate_edl_capacitance(awe_unit, rise_time, fraction)

    def test_current_outside_limits(self, awe_unit):
        """Test that a step beyond i_max is rejected."""
        with pytest.raises(DomainError):
            stack_step_response(awe_unit, 7.5, 1.0, 0.0)


class TestVirtualInertia:
    """Tests for PEMEL virtual inertia."""

    def test_zero_power(self):
        """Test that no inertial power gives no inertia."""
        assert pemel_virtual_inertia(0.0, 0.5, 50.0) == 0.0

    def test_published_example(self):
        """Test 0.5 MW at 0.5 Hz/s and 50 Hz."""
        assert pemel_virtual_inertia(0.5, 0.5, 50.0) == pytest.approx(0.02)

    def test_linear_in_power(self):
        """Test linear scaling with the inertial power."""
        assert pemel_virtual_inertia(1.5, 0.5, 50.0) == pytest.approx(
            3 * pemel_virtual_inertia(0.5, 0.5, 50.0)
        )

    @pytest.mark.parametrize(("rocof_lim", "f0"), [(0.0, 50.0), (0.5, 0.0), (-0.5, 50.0)])
    def test_nonpositive_limits(self, rocof_lim, f0):
        """Test that nonpositive limits are rejected."""
        with pytest.raises(DomainError):
            pemel_virtual_inertia(0.5, rocof_lim, f0)


class TestAfgFuel:
    """Tests for the AFG fuel conversion."""

    def test_zero_fuel(self, afg_unit):
        """Test that no fuel gives no power."""
        assert afg_power_from_fuel(0.0, afg_unit) == 0.0

    def test_published_efficiencies(self, afg_unit):
        """Test 1 kg/s at 0.88 · 0.40 · 18.6 MJ/kg."""
        assert afg_power_from_fuel(1.0, afg_unit) == pytest.approx(6.5472)

    @pytest.mark.parametrize("power", [0.5, 2.0, 6.0])
    def test_inverse(self, afg_unit, power):
        """Test that fuel_from_power inverts afg_power_from_fuel."""
        assert afg_power_from_fuel(fuel_from_power(power, afg_unit), afg_unit) == pytest.approx(
            power, rel=1e-12
        )

    def test_negative_fuel(self, afg_unit):
        """Test that a negative fuel flow is rejected."""
        with pytest.raises(DomainError):
            afg_power_from_fuel(-0.1, afg_unit)


class TestThermalStep:
    """Tests for the lumped stack thermal balance."""

    def test_thermoneutral_operation(self, awe_unit):
        """Test that thermoneutral power without cooling keeps the temperature."""
        power = awe_unit.n_c * 6.0 * awe_unit.v_tn / 1e3
        assert thermal_step(awe_unit, 60.0, power, 6.0, 0.0, 1.0) == pytest.approx(60.0, abs=1e-12)

    def test_cooling_lowers_temperature(self, awe_unit):
        """Test that cooling at thermoneutral power cools the stack."""
        power = awe_unit.n_c * 6.0 * awe_unit.v_tn / 1e3
        assert thermal_step(awe_unit, 60.0, power, 6.0, 0.5, 1.0) < 60.0

    def test_one_megawatt_hour_of_heat(self, awe_unit):
        """Test 1 MW of excess heat over one hour on a 7.8e7 J/°C stack."""
        power = awe_unit.n_c * 6.0 * awe_unit.v_tn / 1e3 + 1.0
        assert thermal_step(awe_unit, 30.0, power, 6.0, 0.0, 1.0) == pytest.approx(
            30.0 + 3600e6 / 7.8e7
        )

    def test_cooling_limit(self, awe_unit):
        """Test the cooling bound a_cool·(T − T_cool)."""
        assert cooling_limit(awe_unit, 60.0) == pytest.approx(17.0 * 55.0 / 1e3)

    @pytest.mark.parametrize("h_cool", [-0.1, 2.0])
    def test_cooling_out_of_range(self, awe_unit, h_cool):
        """Test that cooling outside its bounds is a contract violation."""
        with pytest.raises(ContractViolationError):
            thermal_step(awe_unit, 60.0, 2.0, 6.0, h_cool, 1.0)
