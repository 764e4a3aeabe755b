# ruff: noqa: PLR2004
"""Unit tests for the Wasserstein chance-constraint reformulation."""

import logging

import numpy as np
import pyomo.environ as pyo
import pytest

from p2hsched.exceptions.errors import DomainError, UnsupportedRegimeError
from p2hsched.models.scenario import SampleSet
from p2hsched.services.drcc import (
    RESERVE_CLASSES,
    AffineForm,
    affine_policy_constraints,
    check_regime,
    in_sample_violation_rate,
    reformulate,
)

ERRORS = np.array([[-2.0], [-1.0], [0.0], [1.0], [2.0]])
FORECAST = 10.0


@pytest.fixture
def deload_model():
    """Deloading LP: a reserve r backed by a share k of an uncertain 10 MW forecast.

    The chance constraint is ``r ≤ k·(P + ξ)``, written as ``−k·ξ ≤ k·P − r``.

    Returns
    -------
    tuple[pyo.ConcreteModel, AffineForm]
        The model, maximizing r, and its chance-constraint maps
    """
    model = pyo.ConcreteModel()
    model.k = pyo.Var(bounds=(0.0, 0.1))
    model.r = pyo.Var(bounds=(0.0, None))
    model.chance = pyo.Block()
    model.objective = pyo.Objective(expr=model.r, sense=pyo.maximize)
    form = AffineForm(a_terms=(-model.k,), b_term=FORECAST * model.k - model.r)
    return model, form


class TestReformulation:
    """Tests for the CVaR reformulation on the deloading LP."""

    @pytest.mark.parametrize(
        ("theta", "rho", "expected"),
        [(0.0, 0.2, 0.8), (0.0, 0.4, 0.85), (0.2, 0.2, 0.7)],
    )
    def test_optimal_reserve(self, deload_model, highs, theta, rho, expected):
        """Test the largest reserve the chance constraint admits."""
        model, form = deload_model
        reformulate(model.chance, form, ERRORS, theta, rho)
        pyo.SolverFactory(highs).solve(model)
        assert pyo.value(model.r) == pytest.approx(expected, abs=1e-6)

    def test_violation_rate_within_bound(self, deload_model, highs):
        """Test that the optimum violates at most ρ of the samples."""
        model, form = deload_model
        block = reformulate(model.chance, form, ERRORS, 0.0, 0.4, label="wind_up", hour=3)
        pyo.SolverFactory(highs).solve(model)
        audit = block.audit()
        assert audit.violation_rate == pytest.approx(0.2)
        assert audit.violation_rate <= 0.4
        assert (audit.block, audit.hour, audit.n) == ("wind_up", 3, 5)

    def test_structure(self, deload_model):
        """Test the auxiliary and row counts for five scalar samples."""
        model, form = deload_model
        block = reformulate(model.chance, form, ERRORS, 0.1, 0.2)
        assert block.n == 5
        assert block.auxiliaries == 7
        assert block.row_count == 8
        assert len(model.chance.k) == 5
        assert len(model.chance.sample) == 5
        assert len(model.chance.norm_upper) == len(model.chance.norm_lower) == 1

    def test_joint_structure(self):
        """Test the row count of a two-coordinate constraint."""
        model = pyo.ConcreteModel()
        model.x = pyo.Var()
        model.chance = pyo.Block()
        form = AffineForm(a_terms=(model.x, 2 * model.x), b_term=model.x)
        block = reformulate(model.chance, form, np.zeros((4, 2)), 0.0, 0.25)
        assert block.row_count == 1 + 4 + 4
        assert len(model.chance.norm_upper) == 2

    @pytest.mark.parametrize(
        ("points", "theta", "rho"),
        [
            (ERRORS.ravel(), 0.0, 0.2),
            (np.zeros((5, 2)), 0.0, 0.2),
            (np.zeros((0, 1)), 0.0, 0.2),
            (ERRORS, -0.1, 0.2),
            (ERRORS, 0.0, 0.0),
            (ERRORS, 0.0, 1.5),
        ],
    )
    def test_domain(self, deload_model, points, theta, rho):
        """Test that malformed samples, radii and probabilities are rejected."""
        model, form = deload_model
        with pytest.raises(DomainError):
            reformulate(model.chance, form, points, theta, rho)

    def test_strict_regime(self, deload_model):
        """Test that strict mode rejects ρ above 1/N."""
        model, form = deload_model
        with pytest.raises(UnsupportedRegimeError):
            reformulate(model.chance, form, ERRORS, 0.0, 0.4, strict=True)


class TestRegime:
    """Tests for the ρ ≤ 1/N regime check."""

    def test_inside(self):
        """Test that ρ = 1/N is inside the regime."""
        assert check_regime(SampleSet("wind", np.zeros((2, 5)), 0.0, 0.2))

    def test_outside_warns(self, caplog):
        """Test that ρ > 1/N logs a warning by default."""
        with caplog.at_level(logging.WARNING, logger="p2hsched"):
            assert not check_regime(SampleSet("wind", np.zeros((2, 5)), 0.0, 0.4))
        assert "applying the reformulation anyway" in caplog.text

    def test_outside_strict(self):
        """Test that strict mode raises outside the regime."""
        with pytest.raises(UnsupportedRegimeError):
            check_regime(SampleSet("wind", np.zeros((2, 5)), 0.0, 0.4), strict=True)


class TestViolationRate:
    """Tests for the in-sample violation rate."""

    def test_joint(self):
        """Test a two-coordinate rate with one violated sample of three."""
        points = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        assert in_sample_violation_rate(np.array([1.0, -1.0]), 0.0, points) == pytest.approx(1 / 3)

    def test_boundary_is_satisfied(self):
        """Test that a loss of exactly zero is not a violation."""
        assert in_sample_violation_rate(np.array([1.0]), 1.0, np.array([[1.0]])) == 0.0


class TestAffinePolicy:
    """Tests for the participation-factor rows."""

    @pytest.fixture
    def policy_model(self):
        """Model with one participation factor per reserve class.

        Returns
        -------
        pyo.ConcreteModel
            Model with ``alpha`` and an empty ``policy`` block
        """
        model = pyo.ConcreteModel()
        model.alpha = pyo.Var(RESERVE_CLASSES)
        model.policy = pyo.Block()
        return model

    def test_bounds(self, policy_model):
        """Test that every factor is bounded to [−1, 1]."""
        alpha = {name: policy_model.alpha[name] for name in RESERVE_CLASSES}
        affine_policy_constraints(policy_model.policy, alpha, RESERVE_CLASSES)
        for name in RESERVE_CLASSES:
            assert policy_model.alpha[name].bounds == (-1.0, 1.0)

    @pytest.mark.parametrize(
        ("values", "holds"),
        [((0.5, 0.3, 0.2), True), ((1.0, 1.0, -1.0), True), ((0.5, 0.5, 0.5), False)],
    )
    def test_sum_to_one(self, policy_model, values, holds):
        """Test the participation factors' sum row."""
        alpha = {name: policy_model.alpha[name] for name in RESERVE_CLASSES}
        affine_policy_constraints(policy_model.policy, alpha, RESERVE_CLASSES)
        for name, value in zip(RESERVE_CLASSES, values, strict=True):
            policy_model.alpha[name].value = value
        row = policy_model.policy.alpha_sum
        assert (abs(pyo.value(row.body) - row.ub) < 1e-12) is holds

    def test_no_classes(self, policy_model):
        """Test that a policy needs at least one class."""
        with pytest.raises(DomainError):
            affine_policy_constraints(policy_model.policy, {}, ())
