# ruff: noqa: PLR2004
"""Unit tests for schedule verification by simulation."""

import logging
import math
from dataclasses import replace

import pytest

from p2hsched.models.scenario import SchedulingMode
from p2hsched.services.verification import (
    capability_case,
    hour_case,
    hour_ramps,
    simulation_horizon,
    verify,
    verify_hour,
)


class TestHourCase:
    """Tests for rebuilding a scheduled hour's frequency case."""

    def test_ramps(self, hand_solution):
        """Test one ramp per unit holding primary reserve."""
        ramps = hour_ramps(hand_solution, hand_solution.hours[0])
        assert [(r.label, r.stage, r.delivery_time) for r in ramps] == [
            ("AWE1", 1, 3.0),
            ("AFG1", 2, 6.0),
        ]
        assert [r.label for r in hour_ramps(hand_solution, hand_solution.hours[1])] == ["AFG1"]

    def test_case(self, hand_solution):
        """Test the aggregates of hour 0."""
        case = hour_case(hand_solution, hand_solution.hours[0])
        assert case.h_agg == 0.36
        assert case.d_agg == 0.4
        assert case.stage1_rate == pytest.approx(0.1)
        assert case.stage2_rate == pytest.approx(0.1 + 0.7 / 6)
        assert case.total_pfr == pytest.approx(1.0)

    def test_generator_damping(self, hand_solution):
        """Test that generator damping counts only when enabled."""
        frequency = replace(hand_solution.frequency, afg_damping=True)
        hour = replace(hand_solution.hours[0], afg_damping=0.2)
        solution = replace(hand_solution, frequency=frequency)
        assert hour_case(solution, hour).d_agg == pytest.approx(0.6)
        assert hour_case(hand_solution, hour).d_agg == pytest.approx(0.4)

    def test_horizon(self, hand_solution):
        """Test that short settling times keep the default horizon."""
        assert simulation_horizon(hour_case(hand_solution, hand_solution.hours[0])) == 60.0


class TestCapabilityCase:
    """Tests for the all-reserve case of a scenario hour."""

    def test_toy(self, toy_scenario):
        """Test the toy fleet at its reserve limits."""
        awe, afg = toy_scenario.electrolyzers[0], toy_scenario.afgs[0]
        case = capability_case(toy_scenario, 0)
        assert case.dp_dis == pytest.approx(0.25)
        assert case.h_agg == pytest.approx(0.36)
        assert case.d_agg == pytest.approx(0.375)
        assert case.stage1_rate == pytest.approx(awe.r_pfr_lim / 3.0)
        assert case.stage2_rate == pytest.approx(awe.r_pfr_lim / 3.0 + afg.r_pfr_lim / 6.0)

    def test_cm2_drops_electrolyzers(self, toy_scenario):
        """Test that electrolyzers hold no reserve without hydrogen-plant support."""
        case = capability_case(toy_scenario.with_mode(SchedulingMode.CM2), 0, dp_dis=1.0)
        assert case.dp_dis == 1.0
        assert case.stage1_rate == 0.0


class TestVerifyHour:
    """Tests for per-hour checks."""

    def test_no_disturbance(self, hand_solution):
        """Test that an hour without disturbance passes trivially."""
        hour = replace(hand_solution.hours[0], dp_dis=0.0)
        check = verify_hour(hand_solution, hour)
        assert check.passed
        assert (check.nadir, check.rocof, check.qss) == (0.0, 0.0, 0.0)

    def test_no_inertia(self, hand_solution, caplog):
        """Test that an hour without inertia fails every limit."""
        hour = replace(hand_solution.hours[0], inertia=0.0)
        with caplog.at_level(logging.WARNING, logger="p2hsched"):
            check = verify_hour(hand_solution, hour)
        assert not (check.nadir_ok or check.rocof_ok or check.qss_ok)
        assert math.isinf(check.nadir)
        assert "Hour 0 has no committed inertia" in caplog.text

    def test_large_disturbance(self, hand_solution, caplog):
        """Test that a 5 MW step on 0.36 MW·s/Hz breaks the RoCoF limit."""
        hour = replace(hand_solution.hours[0], dp_dis=5.0)
        with caplog.at_level(logging.WARNING, logger="p2hsched"):
            check = verify_hour(hand_solution, hour)
        assert not check.rocof_ok
        assert check.rocof == pytest.approx(5.0 / 0.72, rel=0.05)
        assert "fails RoCoF" in caplog.text

    def test_report(self, hand_solution):
        """Test that the report covers every hour."""
        report = verify(hand_solution)
        assert [check.hour for check in report.hours] == [0, 1]
        assert report.mode is SchedulingMode.PM
        assert report.failures() == tuple(check for check in report.hours if not check.passed)
