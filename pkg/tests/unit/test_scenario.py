# ruff: noqa: PLR2004
"""Unit tests for scenario loading, validation, presets and run export."""

import json
from dataclasses import replace

import numpy as np
import pytest

from p2hsched.config.constants import MANIFEST_FILE, SOLUTION_FILE
from p2hsched.exceptions.errors import (
    ScenarioValidationError,
    UnknownPresetError,
    UnverifiedSolutionError,
)
from p2hsched.models.scenario import SampleSet, SchedulingMode
from p2hsched.models.solution import HourVerification, VerificationReport
from p2hsched.services.scenario import (
    export,
    export_report,
    load,
    load_solution,
    preset,
    save,
    scenario_issues,
    validate,
)

MINIMAL = {
    "name": "tiny",
    "periods": 2,
    "network": {"root": "b0", "buses": [{"id": "b0"}]},
    "load": {"p_d": [1.0, 1.2], "d_d": 0.1},
}


def _write(path, document):
    path.write_text(json.dumps(document))
    return path


def _report(solution, *failing):
    hours = tuple(
        HourVerification(
            hour=hour.hour,
            nadir=0.5,
            nadir_time=1.0,
            rocof=0.3,
            qss=0.1,
            nadir_ok=hour.hour not in failing,
            rocof_ok=True,
            qss_ok=True,
        )
        for hour in solution.hours
    )
    return VerificationReport(mode=solution.mode, tolerance=1e-3, hours=hours)


class TestLoad:
    """Tests for reading scenario documents."""

    def test_missing_file(self, tmp_path):
        """Test that a missing document is a validation error."""
        with pytest.raises(ScenarioValidationError, match="file not found"):
            load(tmp_path / "absent.json")

    def test_minimal_document(self, tmp_path):
        """Test a document with a load and no units."""
        scenario = load(_write(tmp_path / "tiny.json", MINIMAL))
        assert scenario.name == "tiny"
        assert scenario.load.p_d == (1.0, 1.2)
        assert scenario.unit_count == 0

    def test_malformed_document(self, tmp_path):
        """Test that every missing section is listed."""
        with pytest.raises(ScenarioValidationError) as excinfo:
            load(_write(tmp_path / "bad.json", {"name": "bad"}))
        issues = excinfo.value.issues
        assert any(issue.startswith("periods:") for issue in issues)
        assert any(issue.startswith("network:") for issue in issues)
        assert any(issue.startswith("load:") for issue in issues)

    def test_schema_version(self, tmp_path):
        """Test that a newer major schema version is rejected."""
        path = _write(tmp_path / "new.json", {**MINIMAL, "schema_version": "2.0"})
        with pytest.raises(ScenarioValidationError, match="schema_version 2.0"):
            load(path)

    def test_short_load(self, tmp_path):
        """Test that a load series shorter than the horizon is reported."""
        path = _write(tmp_path / "short.json", {**MINIMAL, "periods": 3})
        with pytest.raises(ScenarioValidationError, match="missing hour 2 of 3"):
            load(path)

    def test_forecast_sidecar(self, tmp_path):
        """Test that a forecast CSV replaces inline series."""
        (tmp_path / "forecasts.csv").write_text("hour,WT1\n0,1.5\n1,2.5\n")
        document = {
            **MINIMAL,
            "wts": [{"id": "WT1", "capacity": 4.0, "forecast": [0.0, 0.0], "bus": "b0"}],
            "forecasts_csv": "forecasts.csv",
        }
        scenario = load(_write(tmp_path / "wind.json", document))
        assert scenario.wts[0].forecast == (1.5, 2.5)

    def test_missing_sample_source(self, tmp_path):
        """Test that a sample section needs a CSV or inline values."""
        document = {**MINIMAL, "samples": {"wind": {"theta": 0.1, "rho": 0.2}}}
        with pytest.raises(ScenarioValidationError, match="either csv or values"):
            load(_write(tmp_path / "samples.json", document))


class TestSave:
    """Tests for writing scenario documents."""

    def test_toy_reloads_equal(self, toy_scenario, tmp_path):
        """Test that the toy preset survives a save and load."""
        path = save(toy_scenario, tmp_path / "toy" / "scenario.json")
        assert load(path) == toy_scenario

    def test_samples_sidecar(self, toy_scenario, tmp_path):
        """Test that joint samples are written to a CSV next to the document."""
        rng = np.random.default_rng(0)
        samples = SampleSet("joint", rng.normal(size=(6, 3, 2)), 0.1, 0.2)
        scenario = toy_scenario.with_changes(samples={"joint": samples})

        path = save(scenario, tmp_path / "scenario.json")

        header = (tmp_path / "samples_joint.csv").read_text().splitlines()[0]
        assert header == "hour,sample,wind,solar"
        loaded = load(path).samples["joint"]
        np.testing.assert_allclose(loaded.samples, samples.samples)
        assert (loaded.theta, loaded.rho) == (0.1, 0.2)


class TestValidate:
    """Tests for scenario invariants."""

    def test_toy_is_valid(self, toy_scenario):
        """Test that the toy preset has no issues."""
        assert scenario_issues(toy_scenario) == []

    def test_all_issues_reported(self, toy_scenario):
        """Test that every violation is listed at once."""
        afg = toy_scenario.afgs[0]
        scenario = toy_scenario.with_changes(
            afgs=(afg, afg), load=replace(toy_scenario.load, d_d=-1.0)
        )
        with pytest.raises(ScenarioValidationError) as excinfo:
            validate(scenario)
        assert "load: d_d must be nonnegative" in excinfo.value.issues
        assert "AFG1: duplicate unit identifier" in excinfo.value.issues

    def test_unknown_bus(self, toy_scenario):
        """Test that units on undeclared buses are reported."""
        unit = replace(toy_scenario.afgs[0], bus="b7")
        issues = scenario_issues(toy_scenario.with_changes(afgs=(unit,)))
        assert issues == ["AFG1: attached to unknown bus 'b7'"]

    def test_wind_samples_are_scalar(self, toy_scenario):
        """Test that wind samples with two coordinates are rejected."""
        samples = SampleSet("wind", np.zeros((6, 3, 2)), 0.0, 0.2)
        issues = scenario_issues(toy_scenario.with_changes(samples={"wind": samples}))
        assert issues == ["samples[wind]: wind errors are scalar per sample"]

    def test_load_step_fraction(self, toy_scenario):
        """Test the contingency fraction range."""
        contingency = replace(toy_scenario.contingency, load_step_fraction=1.5)
        issues = scenario_issues(toy_scenario.with_changes(contingency=contingency))
        assert issues == ["contingency: load_step_fraction must lie in [0, 1]"]


class TestPresets:
    """Tests for named presets."""

    def test_toy(self):
        """Test the toy preset's fleet and horizon."""
        scenario = preset("toy")
        assert scenario.periods == 6
        assert [unit.id for unit in scenario.electrolyzers] == ["AWE1"]
        assert [unit.id for unit in scenario.afgs] == ["AFG1"]
        assert scenario.mode is SchedulingMode.PM

    def test_unknown(self):
        """Test that unknown preset names are rejected with the known names."""
        with pytest.raises(UnknownPresetError, match="toy"):
            preset("nonexistent")


class TestExport:
    """Tests for run-directory export."""

    def test_requires_verification(self, hand_solution, tmp_path):
        """Test that an unverified solution is not exported by default."""
        with pytest.raises(UnverifiedSolutionError):
            export(hand_solution, tmp_path)

    def test_unverified_override(self, hand_solution, tmp_path):
        """Test that the override writes the run files and manifest."""
        written = export(hand_solution, tmp_path, allow_unverified=True)
        assert set(written) == {
            "solution.json",
            "envelopes.json",
            "drcc_audit.json",
            "schedule_units.csv",
            "frequency_metrics.csv",
        }
        manifest = json.loads((tmp_path / MANIFEST_FILE).read_text())
        assert set(manifest) == set(written)

    def test_failing_hours_get_trajectories(self, hand_solution, tmp_path):
        """Test that hours failing verification are written as trajectories."""
        solution = hand_solution.with_verification(_report(hand_solution, 1))
        written = export(solution, tmp_path)
        assert "trajectory_hour_01.csv" in written
        assert "trajectory_hour_00.csv" not in written
        header = (tmp_path / "trajectory_hour_01.csv").read_text().splitlines()[0]
        assert header == "time_s,deviation_hz"

    def test_requested_trajectories(self, hand_solution, tmp_path):
        """Test that extra hours can be requested."""
        solution = hand_solution.with_verification(_report(hand_solution))
        written = export(solution, tmp_path, trajectory_hours=(0,))
        assert "trajectory_hour_00.csv" in written

    def test_solution_reloads_equal(self, hand_solution, tmp_path):
        """Test that the exported solution document reads back unchanged."""
        solution = hand_solution.with_verification(_report(hand_solution))
        export(solution, tmp_path)
        assert load_solution(tmp_path) == solution
        assert load_solution(tmp_path / SOLUTION_FILE) == solution

    def test_report_tables(self, hand_solution, tmp_path):
        """Test the reserve, objective and yield tables."""
        written = export_report(hand_solution, tmp_path)
        assert set(written) == {"reserve_allocation.csv", "objective.csv", "hydrogen_yield.csv"}
