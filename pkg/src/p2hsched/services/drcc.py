"""
Distributionally Robust Chance Constraints.

Each chance constraint ``P(A(x)·ξ ≤ B(x)) ≥ 1 − ρ`` over a type-1 Wasserstein
ball of radius θ around N empirical samples is replaced by its conservative
linear reformulation

    β + (v·θ + (1/N)·Σ k_i)/ρ ≤ 0
    A(x)·ζ_i − B(x) − β ≤ k_i,   k_i ≥ 0
    ±A_j(x) ≤ v,                 v ≥ 0

with ∞-norm ground metric. Forecast errors ξ are actual minus forecast, so a
negative wind error is a shortfall.
"""

from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np
import pyomo.environ as pyo

from p2hsched.exceptions.errors import DomainError, UnsupportedRegimeError
from p2hsched.models.scenario import SampleSet
from p2hsched.models.solution import DrccAudit
from p2hsched.utils.logging_config import logger

WIND_SOURCE = "wind"
JOINT_SOURCE = "joint"
JOINT_COORDINATES = ("wind", "solar")
RESERVE_CLASSES = ("afg", "el", "bes")
VIOLATION_TOLERANCE = 1e-9


@dataclass(frozen=True)
class AffineForm:
    """
    Affine maps of a chance constraint.

    ``a_terms`` holds one linear expression (or number) per error coordinate
    and ``b_term`` the right-hand side; the constraint reads A·ξ ≤ B.
    """

    a_terms: tuple[object, ...]
    b_term: object

    @property
    def dim(self) -> int:
        """Number of error coordinates."""
        return len(self.a_terms)

    def evaluate(self) -> tuple[np.ndarray, float]:
        """Return the numeric (A, B) at the current variable values."""
        a_values = np.array([pyo.value(term) for term in self.a_terms], dtype=float)
        return a_values, float(pyo.value(self.b_term))


@dataclass(frozen=True)
class DrccBlock:
    """A reformulated chance constraint and the pyomo block holding its rows."""

    label: str
    hour: int
    form: AffineForm
    points: np.ndarray
    theta: float
    rho: float
    block: pyo.Block

    @property
    def n(self) -> int:
        """Number of samples."""
        return int(self.points.shape[0])

    @property
    def auxiliaries(self) -> int:
        """Number of auxiliary variables (β, v and one k per sample)."""
        return self.n + 2

    @property
    def row_count(self) -> int:
        """Number of emitted constraint rows."""
        return 1 + self.n + 2 * self.form.dim

    def audit(self) -> DrccAudit:
        """Return the audit record at the current variable values."""
        a_values, b_value = self.form.evaluate()
        return DrccAudit(
            block=self.label,
            hour=self.hour,
            theta=self.theta,
            rho=self.rho,
            n=self.n,
            auxiliaries=self.auxiliaries,
            violation_rate=in_sample_violation_rate(a_values, b_value, self.points),
        )


def check_regime(sample_set: SampleSet, *, strict: bool = False) -> bool:
    """
    Check whether ρ ≤ 1/N holds for a sample set.

    Outside that regime the reformulation is still a valid conservative
    approximation; a warning is logged unless ``strict`` turns it into an
    error.

    Raises
    ------
    UnsupportedRegimeError
        If ``strict`` and ρ > 1/N.
    """
    inside = sample_set.rho <= 1.0 / sample_set.n
    if not inside:
        if strict:
            raise UnsupportedRegimeError(sample_set.rho, sample_set.n)
        logger.warning(
            "Chance constraint %s uses rho=%.4g > 1/N=%.4g; applying the reformulation anyway",
            sample_set.source,
            sample_set.rho,
            1.0 / sample_set.n,
        )
    return inside


def reformulate(  # noqa: PLR0913
    block: pyo.Block,
    form: AffineForm,
    points: np.ndarray,
    theta: float,
    rho: float,
    *,
    label: str = "",
    hour: int = 0,
    strict: bool = False,
) -> DrccBlock:
    """
    Write the linear reformulation of one chance constraint into ``block``.

    Parameters
    ----------
    block : pyo.Block
        Empty block receiving ``beta``, ``v``, ``k`` and the rows.
    form : AffineForm
        A(x) and B(x).
    points : np.ndarray
        Samples of shape (n, dim).
    theta : float
        Wasserstein radius (MW).
    rho : float
        Violation probability bound.

    Returns
    -------
    DrccBlock
        The emitted block with its data.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] < 1:  # noqa: PLR2004
        raise DomainError("points", points.shape, "(n >= 1, dim)")
    if points.shape[1] != form.dim:
        raise DomainError("points", points.shape, f"dim = {form.dim}")
    if theta < 0:
        raise DomainError("theta", theta, ">= 0 MW")
    if not 0 < rho <= 1:
        raise DomainError("rho", rho, "(0, 1]")
    n = points.shape[0]
    if strict and rho > 1.0 / n:
        raise UnsupportedRegimeError(rho, n)

    samples = range(n)
    coordinates = range(form.dim)
    block.beta = pyo.Var(domain=pyo.Reals)
    block.v = pyo.Var(domain=pyo.NonNegativeReals)
    block.k = pyo.Var(samples, domain=pyo.NonNegativeReals)

    block.cvar = pyo.Constraint(
        expr=block.beta + (theta * block.v + sum(block.k[i] for i in samples) / n) / rho <= 0
    )

    def sample_rule(b: pyo.Block, i: int) -> object:
        loss = sum(float(points[i, j]) * form.a_terms[j] for j in coordinates) - form.b_term
        return loss - b.beta <= b.k[i]

    block.sample = pyo.Constraint(samples, rule=sample_rule)
    block.norm_upper = pyo.Constraint(coordinates, rule=lambda b, j: form.a_terms[j] <= b.v)
    block.norm_lower = pyo.Constraint(coordinates, rule=lambda b, j: -form.a_terms[j] <= b.v)
    return DrccBlock(
        label=label, hour=hour, form=form, points=points, theta=theta, rho=rho, block=block
    )


def in_sample_violation_rate(a_values: np.ndarray, b_value: float, points: np.ndarray) -> float:
    """
    Return the fraction of samples with A·ζ_i − B > 0.

    Examples
    --------
    >>> import numpy as np
    >>> in_sample_violation_rate(np.array([1.0]), 0.5, np.array([[0.0], [1.0]]))
    0.5
    """
    losses = np.asarray(points, dtype=float) @ np.asarray(a_values, dtype=float) - b_value
    return float(np.mean(losses > VIOLATION_TOLERANCE))


def affine_policy_constraints(
    block: pyo.Block, alpha: Mapping[str, pyo.Var], classes: tuple[str, ...]
) -> None:
    """
    Bound participation factors to [−1, 1] and require them to sum to one.

    ``alpha`` maps each reserve class to its factor for one (period, error source).
    """
    if not classes:
        raise DomainError("classes", classes, "at least one reserve class")
    for name in classes:
        alpha[name].setlb(-1.0)
        alpha[name].setub(1.0)
    block.alpha_sum = pyo.Constraint(expr=sum(alpha[name] for name in classes) == 1)
