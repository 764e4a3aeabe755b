# ruff: noqa: PLR2004
"""Unit tests for model files, solver calls and schedule extraction."""

import logging

import pyomo.environ as pyo
import pytest
from pyomo.opt import TerminationCondition

from p2hsched.config.settings import get_settings
from p2hsched.core.protocols import SolverBackendProtocol
from p2hsched.exceptions.errors import (
    ContractViolationError,
    IntegralityError,
    SolverNotFoundError,
)
from p2hsched.models.run_config import SolverConfig
from p2hsched.models.solution import SolveResult, SolveStatus
from p2hsched.services.milp_model import build
from p2hsched.services.solver_io import (
    _map_status,
    _options,
    _solver,
    extract_schedule,
    load_values,
    read_model_counts,
    solve,
    write_model,
)


def _result(status, values=None):
    return SolveResult(
        status=status, objective=0.0, values=values or {}, gap=None, runtime=0.0, solver_id="fake"
    )


class TestModelFiles:
    """Tests for LP and MPS output."""

    def test_symbolic_labels(self, toy_scenario, tmp_path):
        """Test that indexed variables keep readable names in the LP text."""
        path = write_model(build(toy_scenario), tmp_path / "toy.lp")
        text = path.read_text()
        assert "el_x_st(AWE1_0)" in text
        assert "afg_x(AFG1_5)" in text

    def test_deterministic(self, toy_scenario, tmp_path):
        """Test that two builds of one scenario give identical files."""
        first = write_model(build(toy_scenario), tmp_path / "a.lp")
        second = write_model(build(toy_scenario), tmp_path / "b.lp")
        assert first.read_bytes() == second.read_bytes()

    def test_format_from_argument(self, toy_scenario, tmp_path):
        """Test that an explicit format overrides the suffix."""
        path = write_model(build(toy_scenario), tmp_path / "toy.txt", fmt="mps")
        assert "ROWS" in path.read_text()

    def test_unknown_format(self, toy_scenario, tmp_path):
        """Test that formats other than LP and MPS are rejected."""
        with pytest.raises(ContractViolationError, match="nl"):
            write_model(build(toy_scenario), tmp_path / "toy.nl")

    @pytest.mark.parametrize("suffix", ["lp", "mps"])
    def test_counts(self, toy_scenario, tmp_path, highs, suffix):
        """Test that HiGHS reads the written file back."""
        instance = build(toy_scenario)
        path = write_model(instance, tmp_path / f"toy.{suffix}")
        rows, columns, nonzeros = read_model_counts(path)
        assert rows > 0
        assert columns > 0
        assert nonzeros >= rows


class TestSolverCalls:
    """Tests for backend selection and outcome mapping."""

    @pytest.mark.parametrize(
        ("condition", "has_solution", "expected"),
        [
            (TerminationCondition.optimal, True, SolveStatus.OPTIMAL),
            (TerminationCondition.maxTimeLimit, True, SolveStatus.FEASIBLE),
            (TerminationCondition.maxTimeLimit, False, SolveStatus.TIMEOUT),
            (TerminationCondition.infeasible, False, SolveStatus.INFEASIBLE),
            (TerminationCondition.infeasibleOrUnbounded, False, SolveStatus.INFEASIBLE),
            (TerminationCondition.unbounded, False, SolveStatus.UNBOUNDED),
            (TerminationCondition.feasible, True, SolveStatus.FEASIBLE),
            (TerminationCondition.solverFailure, False, SolveStatus.ERROR),
            (TerminationCondition.error, False, SolveStatus.ERROR),
        ],
    )
    def test_status_mapping(self, condition, has_solution, expected):
        """Test the normalized status of each termination condition."""
        assert _map_status(condition, has_solution) is expected

    @pytest.mark.parametrize(
        ("backend", "expected"),
        [
            ("appsi_highs", {"time_limit": 60.0, "mip_rel_gap": 0.02, "threads": 2}),
            ("cbc", {"sec": 60.0, "ratioGap": 0.02, "threads": 2}),
            ("glpk", {"tmlim": 60.0, "mipgap": 0.02}),
            ("other", {}),
        ],
    )
    def test_option_names(self, backend, expected):
        """Test the per-plugin option names."""
        config = SolverConfig(backend=backend, time_limit=60.0, gap=0.02, threads=2)
        assert _options(config) == expected

    def test_missing_backend(self):
        """Test that an unknown plugin is reported as not found."""
        with pytest.raises(SolverNotFoundError, match="no_such_solver"):
            _solver(SolverConfig(backend="no_such_solver"))

    def test_injected_backend(self, toy_scenario, fake_backend):
        """Test an injected backend reporting infeasibility."""
        backend = fake_backend(TerminationCondition.infeasible)
        assert isinstance(backend, SolverBackendProtocol)
        result = solve(build(toy_scenario), SolverConfig(time_limit=5.0), backend=backend)
        assert result.status is SolveStatus.INFEASIBLE
        assert result.objective is None
        assert result.values == {}
        options = {"time_limit": 5.0, "mip_rel_gap": 0.01, "threads": 1}
        assert backend.calls == [{"load_solutions": False, "options": options}]

    def test_default_config_from_settings(self, toy_scenario, monkeypatch, fake_backend):
        """Test that settings supply the limits when no config is given."""
        monkeypatch.setenv("P2HSCHED_TIME_LIMIT", "12")
        get_settings.cache_clear()
        backend = fake_backend(TerminationCondition.maxTimeLimit)
        result = solve(build(toy_scenario), backend=backend)
        assert result.status is SolveStatus.TIMEOUT
        assert backend.calls[0]["options"]["time_limit"] == 12.0

    def test_unset_variables_are_recorded(self, toy_scenario, highs, caplog):
        """Test that a variable no row uses is named in the result and the debug log."""
        instance = build(toy_scenario)
        instance.model.spare = pyo.Var(bounds=(0, 1))
        with caplog.at_level(logging.DEBUG, logger="p2hsched"):
            result = solve(instance, SolverConfig(time_limit=60.0))
        assert result.status.has_solution
        assert "spare" in result.unset
        assert "spare" not in result.values
        assert "el_x_st[AWE1,0]" in result.values
        assert "no value after the solve" in caplog.text


class TestExtraction:
    """Tests for reading values back into the model."""

    def test_no_solution(self, toy_scenario):
        """Test that an infeasible result has no schedule."""
        with pytest.raises(ContractViolationError, match="infeasible"):
            extract_schedule(_result(SolveStatus.INFEASIBLE), build(toy_scenario))

    def test_fractional_binary(self, toy_scenario):
        """Test that a fractional run state is rejected."""
        result = _result(SolveStatus.OPTIMAL, {"el_x_st[AWE1,0]": 0.5})
        with pytest.raises(IntegralityError, match="el_x_st"):
            load_values(build(toy_scenario), result)

    def test_snapping(self, toy_scenario):
        """Test that near-integral binaries are snapped."""
        instance = build(toy_scenario)
        load_values(instance, _result(SolveStatus.OPTIMAL, {"afg_x[AFG1,2]": 1 - 1e-7}))
        assert instance.model.afg_x["AFG1", 2].value == 1.0

    def test_defaulted_values_are_logged(self, toy_scenario, caplog):
        """Test that variables missing from a result are zeroed and reported."""
        instance = build(toy_scenario)
        with caplog.at_level(logging.DEBUG, logger="p2hsched"):
            load_values(instance, _result(SolveStatus.OPTIMAL, {"afg_x[AFG1,2]": 1.0}))
        assert instance.model.el_p["AWE1", 0].value == 0.0
        assert instance.model.afg_x["AFG1", 2].value == 1.0
        assert "variables without a value were set to 0" in caplog.text

    def test_complete_result_is_silent(self, toy_scenario, caplog):
        """Test that a result covering every variable logs nothing about defaults."""
        instance = build(toy_scenario)
        values = {
            var.name: var.value if var.value is not None else 0.0
            for var in instance.model.component_data_objects(pyo.Var, descend_into=True)
        }
        with caplog.at_level(logging.DEBUG, logger="p2hsched"):
            load_values(instance, _result(SolveStatus.OPTIMAL, values))
        assert "set to 0" not in caplog.text
