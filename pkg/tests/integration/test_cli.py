# ruff: noqa: PLR2004
"""Integration tests for the command-line interface."""

import json
from dataclasses import replace

import pytest

from p2hsched.cli import EXIT_BACKEND, EXIT_INPUT, EXIT_OK, EXIT_VERIFICATION, main
from p2hsched.models.scenario import SchedulingMode
from p2hsched.schemas.solution import dump_solution


@pytest.fixture
def solution_file(tmp_path, hand_solution):
    """Write the hand-built schedule as a CM1 solution document.

    Returns
    -------
    Path
        Path of ``solution.json``
    """
    path = tmp_path / "run" / "solution.json"
    path.parent.mkdir()
    path.write_bytes(dump_solution(replace(hand_solution, mode=SchedulingMode.CM1)))
    return path


class TestSimulate:
    """Tests for the simulate command."""

    def test_case_without_disturbance(self, tmp_path, capsys):
        """Test a case given on the command line."""
        code = main(["simulate", "--h-agg", "10", "--dp-dis", "0", "--out", str(tmp_path)])
        assert code == EXIT_OK
        assert "Nadir: 0.0000 Hz" in capsys.readouterr().out
        header = (tmp_path / "trajectory.csv").read_text().splitlines()[0]
        assert header == "time_s,deviation_hz"

    def test_preset_hour(self, tmp_path, capsys):
        """Test the capability case of a preset hour."""
        code = main(["simulate", "--preset", "toy", "--hour", "2", "--out", str(tmp_path)])
        assert code == EXIT_OK
        assert "Max RoCoF" in capsys.readouterr().out

    def test_missing_inertia(self, tmp_path, capsys):
        """Test that a bare case needs an inertia."""
        assert main(["simulate", "--dp-dis", "1", "--out", str(tmp_path)]) == EXIT_INPUT
        assert "h_agg" in capsys.readouterr().out

    def test_hour_out_of_range(self, tmp_path):
        """Test that hours beyond the horizon are input errors."""
        args = ["simulate", "--preset", "toy", "--hour", "6", "--out", str(tmp_path)]
        assert main(args) == EXIT_INPUT

    def test_scheduled_hour(self, solution_file, tmp_path):
        """Test the scheduled hour of a solution."""
        args = ["simulate", "--solution", str(solution_file), "--out", str(tmp_path)]
        assert main(args) == EXIT_OK


class TestCompile:
    """Tests for the compile command."""

    def test_toy(self, tmp_path, capsys):
        """Test that the toy envelopes are written and summarized."""
        code = main(["compile", "--preset", "toy", "--out", str(tmp_path)])
        assert code == EXIT_OK
        output = capsys.readouterr().out
        assert "Hour  0: dP=0.250 MW" in output
        assert len(json.loads((tmp_path / "envelopes.json").read_text())) == 6

    def test_malformed_scenario(self, tmp_path, capsys):
        """Test that an invalid document exits with the input code."""
        path = tmp_path / "bad.json"
        path.write_text("{}")
        assert main(["compile", "--scenario", str(path), "--out", str(tmp_path)]) == EXIT_INPUT
        assert "Scenario is invalid" in capsys.readouterr().out


class TestSchedule:
    """Tests for the schedule command."""

    def test_missing_solver(self, tmp_path, capsys):
        """Test that an unknown solver plugin exits with the backend code."""
        args = ["schedule", "--preset", "toy", "--out", str(tmp_path), "--solver", "no_such_solver"]
        assert main(args) == EXIT_BACKEND
        assert "no_such_solver" in capsys.readouterr().out

    def test_toy(self, tmp_path, highs, capsys):
        """Test that the toy schedule is solved, verified and exported."""
        args = ["schedule", "--preset", "toy", "--out", str(tmp_path), "--no-cache"]
        assert main(args) == EXIT_OK
        output = capsys.readouterr().out
        assert "Status: optimal" in output
        assert "Verified hours: 6 of 6" in output
        assert (tmp_path / "solution.json").exists()


class TestVerifyAndReport:
    """Tests for the verify and report commands."""

    def test_verify_benchmark(self, solution_file, capsys):
        """Test that a benchmark schedule exits cleanly and writes its metrics."""
        assert main(["verify", "--solution", str(solution_file)]) == EXIT_OK
        assert "Hour  1:" in capsys.readouterr().out
        assert (solution_file.parent / "frequency_metrics.csv").exists()

    def test_verify_failure(self, tmp_path, hand_solution):
        """Test that a failing secured schedule exits with the verification code."""
        hours = tuple(replace(hour, dp_dis=5.0) for hour in hand_solution.hours)
        path = tmp_path / "solution.json"
        path.write_bytes(dump_solution(hand_solution.with_hours(hours)))
        assert main(["verify", "--solution", str(path)]) == EXIT_VERIFICATION

    def test_report(self, solution_file, tmp_path):
        """Test that report tables are written to the requested directory."""
        out = tmp_path / "report"
        args = ["report", "--solution", str(solution_file.parent), "--out", str(out)]
        assert main(args) == EXIT_OK
        assert sorted(path.name for path in out.iterdir() if path.suffix == ".csv") == [
            "hydrogen_yield.csv",
            "objective.csv",
            "reserve_allocation.csv",
        ]


class TestOptions:
    """Tests for global options."""

    def test_invalid_log_level(self, tmp_path, capsys):
        """Test that an unknown log level is rejected."""
        args = ["--log-level", "loud", "compile", "--preset", "toy", "--out", str(tmp_path)]
        assert main(args) == EXIT_INPUT
        assert "Invalid log level: loud" in capsys.readouterr().out

    def test_log_file(self, tmp_path):
        """Test that records are appended to the requested file."""
        log_file = tmp_path / "p2hsched.log"
        args = ["--log-level", "info", "--log-file", str(log_file)]
        assert main([*args, "compile", "--preset", "toy", "--out", str(tmp_path)]) == EXIT_OK
        assert "New run started" in log_file.read_text()

    def test_unknown_preset(self, tmp_path):
        """Test that argparse rejects preset names it does not know."""
        with pytest.raises(SystemExit) as excinfo:
            main(["compile", "--preset", "nope", "--out", str(tmp_path)])
        assert excinfo.value.code == 2
