"""
Production Model Fitting.

Linear surrogates of the nonlinear electrolyzer model for the scheduling
MILP: an affine stack-power fit ``a1·I + a2·T + a3`` by least squares over
the operating box, and a concave piecewise-linear upper bound of hydrogen
production built from tangents of the Faraday-efficiency curve at the
minimum temperature (where production is highest).
"""

from collections.abc import Callable

import numpy as np

from p2hsched.config.constants import FARADAY, FIT_ERROR_LIMIT, M_H2
from p2hsched.exceptions.errors import DomainError
from p2hsched.models.units import ElectrolyzerUnit, HydrogenFit, PowerFit
from p2hsched.services.device_models import (
    SECONDS_PER_HOUR,
    faraday_efficiency_at_density,
    stack_power,
)
from p2hsched.utils.logging_config import logger

PowerModel = Callable[[np.ndarray, np.ndarray], np.ndarray]

CURRENT_GRID = 41
TEMPERATURE_GRID = 23
HYDROGEN_CHECK_POINTS = 400


def hydrogen_curve(unit: ElectrolyzerUnit, currents: np.ndarray, temp: float) -> np.ndarray:
    """Return the hydrogen rate (kg/h) over an array of stack currents (kA)."""
    currents = np.asarray(currents, dtype=float)
    density = 100.0 * currents / unit.area
    eta = faraday_efficiency_at_density(density, temp)
    return eta * unit.n_c * currents * 1e3 * M_H2 / (2.0 * FARADAY) * SECONDS_PER_HOUR / 1e3


def hydrogen_slope(unit: ElectrolyzerUnit, currents: np.ndarray, temp: float) -> np.ndarray:
    """Return dq/dI (kg/h per kA) of ``hydrogen_curve``."""
    currents = np.asarray(currents, dtype=float)
    kappa = 100.0 / unit.area
    f1 = 2.5 * temp + 50.0
    f2 = 1.0 - 6.25e-6 * temp
    scale = unit.n_c * 1e3 * M_H2 / (2.0 * FARADAY) * SECONDS_PER_HOUR / 1e3
    squared = (kappa * currents) ** 2
    return scale * f2 * squared * (3.0 * f1 + squared) / (f1 + squared) ** 2


def fit_power(
    unit: ElectrolyzerUnit,
    power_model: PowerModel | None = None,
    grid: tuple[int, int] = (CURRENT_GRID, TEMPERATURE_GRID),
) -> PowerFit:
    """
    Fit the stack power to ``a1·I + a2·T + a3`` over the (I, T) operating box.

    The reported error is the largest absolute residual on the grid relative
    to the largest stack power on the box.
    """
    model = power_model or (lambda i, t: stack_power(i, t, unit))
    currents, temps = np.meshgrid(
        np.linspace(unit.i_min, unit.i_max, grid[0]),
        np.linspace(unit.t_min, unit.t_max, grid[1]),
        indexing="ij",
    )
    target = np.asarray(model(currents, temps), dtype=float).ravel()
    design = np.column_stack([currents.ravel(), temps.ravel(), np.ones(target.size)])
    coefficients, *_ = np.linalg.lstsq(design, target, rcond=None)
    residuals = np.abs(design @ coefficients - target)
    scale = np.max(np.abs(target))
    max_error = float(residuals.max() / scale) if scale > 0 else 0.0

    if max_error > FIT_ERROR_LIMIT:
        worst = int(residuals.argmax())
        logger.warning(
            "Power fit of %s exceeds %.0f%%: %.2f%% near I=%.3g kA, T=%.3g °C",
            unit.id,
            100 * FIT_ERROR_LIMIT,
            100 * max_error,
            currents.ravel()[worst],
            temps.ravel()[worst],
        )
    a1, a2, a3 = (float(c) for c in coefficients)
    return PowerFit(a1=a1, a2=a2, a3=a3, max_error=max_error)


def fit_hydrogen(unit: ElectrolyzerUnit, segments: int) -> HydrogenFit:
    """
    Build ``segments`` tangent rows of the hydrogen curve at the minimum temperature.

    Tangent points sit at the centres of equal current intervals. On the
    concave part of the curve every tangent overestimates production.
    """
    width = (unit.i_max - unit.i_min) / segments
    points = unit.i_min + width * (np.arange(segments) + 0.5)
    slopes = hydrogen_slope(unit, points, unit.t_min)
    intercepts = hydrogen_curve(unit, points, unit.t_min) - slopes * points

    check = np.linspace(unit.i_min, unit.i_max, HYDROGEN_CHECK_POINTS)
    bound = np.min(np.outer(check, slopes) + intercepts, axis=1)
    truth = hydrogen_curve(unit, check, unit.t_min)
    gap = bound - truth
    if gap.min() < -1e-9 * truth.max():
        logger.warning(
            "Hydrogen rows of %s underestimate production near I=%.3g kA",
            unit.id,
            check[int(gap.argmin())],
        )
    return HydrogenFit(
        slopes=tuple(float(s) for s in slopes),
        intercepts=tuple(float(b) for b in intercepts),
        max_gap=float(gap.max() / truth.max()),
    )


def fit_production_models(
    unit: ElectrolyzerUnit,
    segments: int = 4,
    power_model: PowerModel | None = None,
) -> tuple[PowerFit, HydrogenFit]:
    """
    Fit the linear production surrogates of one electrolyzer.

    Parameters
    ----------
    unit : ElectrolyzerUnit
        Electrolyzer with its operating box.
    segments : int
        Number of hydrogen tangent rows, at least two.
    power_model : callable, optional
        Ground-truth stack power ``f(I, T)`` on arrays; defaults to
        ``stack_power``.

    Returns
    -------
    tuple[PowerFit, HydrogenFit]
        Affine power fit with its maximum relative error and the hydrogen rows.
    """
    if segments < 2:  # noqa: PLR2004
        raise DomainError("segments", segments, ">= 2")
    power_fit = fit_power(unit, power_model)
    h2_fit = fit_hydrogen(unit, segments)
    logger.debug(
        "Fitted %s: power error %.2f%%, hydrogen gap %.2f%%",
        unit.id,
        100 * power_fit.max_error,
        100 * h2_fit.max_gap,
    )
    return power_fit, h2_fit
