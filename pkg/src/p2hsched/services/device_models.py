"""
Device Models.

Physical and economic response models of the frequency-regulation resources:
electrolyzer electrochemistry, EDL step response and thermal balance,
PEMEL virtual inertia and ammonia-fueled generator fuel conversion. All
functions are pure.
"""

import math

from scipy.optimize import bisect

from p2hsched.config.constants import FARADAY, M_H2
from p2hsched.exceptions.errors import ContractViolationError, DomainError
from p2hsched.models.units import AfgUnit, ElectrolyzerUnit
from p2hsched.utils.logging_config import logger

SECONDS_PER_HOUR = 3600.0
JOULES_PER_MWH = 3.6e9


def current_density(current: float, unit: ElectrolyzerUnit) -> float:
    """Return the current density in mA/cm² for a stack current in kA and cell area in m²."""
    # kA / m² -> A / cm² is 1e3 / 1e4, then A -> mA is 1e3
    return 100.0 * current / unit.area


def faraday_efficiency_at_density(density: float, temp: float) -> float:
    """Return the Faraday efficiency at a current density (mA/cm²) and temperature (°C)."""
    f1 = 2.5 * temp + 50.0
    f2 = 1.0 - 6.25e-6 * temp
    squared = density * density
    return squared / (f1 + squared) * f2


def faraday_efficiency(current: float, temp: float, unit: ElectrolyzerUnit) -> float:
    """
    Return the Faraday efficiency of an electrolyzer.

    Parameters
    ----------
    current : float
        Stack current (kA).
    temp : float
        Stack temperature (°C).
    unit : ElectrolyzerUnit
        Electrolyzer parameters.

    Returns
    -------
    float
        Fraction in [0, 1).

    Raises
    ------
    DomainError
        If the current is negative or the temperature is outside the stack limits.
    """
    if current < 0:
        raise DomainError("current", current, ">= 0 kA")
    if not unit.t_min <= temp <= unit.t_max:
        raise DomainError("temp", temp, f"[{unit.t_min}, {unit.t_max}] °C")
    return faraday_efficiency_at_density(current_density(current, unit), temp)


def hydrogen_rate(current: float, temp: float, unit: ElectrolyzerUnit) -> float:
    """Return the hydrogen production rate (kg/h) at a stack current (kA) and temperature (°C)."""
    if current > unit.i_max:
        raise DomainError("current", current, f"[0, {unit.i_max}] kA")
    eta = faraday_efficiency(current, temp, unit)
    grams_per_second = eta * unit.n_c * current * 1e3 * M_H2 / (2.0 * FARADAY)
    return grams_per_second * SECONDS_PER_HOUR / 1e3


def stack_voltage(current: float, temp: float, unit: ElectrolyzerUnit) -> float:
    """
    Return the steady-state cell voltage (V).

    Reversible and activation terms, a linear temperature correction around
    25 °C and the resistive drops of the ohmic and EDL branches.
    """
    resistance = unit.r_ohm + unit.r_edl1 + unit.r_edl2
    return (
        unit.v_re
        + unit.v_act
        - unit.v_temp_coeff * (temp - 25.0)
        + resistance * current * 1e3
    )


def stack_power(current: float, temp: float, unit: ElectrolyzerUnit) -> float:
    """Return the steady-state stack power (MW)."""
    return unit.n_c * stack_voltage(current, temp, unit) * current * 1e3 / 1e6


def stack_step_response(unit: ElectrolyzerUnit, i0: float, di: float, tau: float) -> float:
    """
    Return the stack power change (MW) after a current step.

    Parameters
    ----------
    unit : ElectrolyzerUnit
        Electrolyzer parameters.
    i0 : float
        Current before the step (kA).
    di : float
        Current step (kA).
    tau : float
        Time since the step (s).

    Returns
    -------
    float
        Power change relative to the pre-step operating point.
    """
    if not (0 <= i0 <= unit.i_max and 0 <= i0 + di <= unit.i_max):
        raise DomainError("i0 + di", i0 + di, f"[0, {unit.i_max}] kA")
    if tau < 0:
        raise DomainError("tau", tau, ">= 0 s")
    r_edl = unit.r_edl1 + unit.r_edl2
    step = di * 1e3
    v_dl0 = i0 * 1e3 * r_edl
    steady = unit.n_c * step * (unit.v_re + step * r_edl + step * unit.r_ohm)
    transient = unit.n_c * step * (v_dl0 - step * r_edl) * math.exp(-tau / unit.theta)
    return (steady + transient) / 1e6


def step_response_fraction(unit: ElectrolyzerUnit, tau: float) -> float:
    """Return the fraction of the EDL transition completed after ``tau`` seconds."""
    return -math.expm1(-tau / unit.theta)


def calibrate_edl_capacitance(
    unit: ElectrolyzerUnit,
    rise_time: float,
    fraction: float = 0.95,
) -> float:
    """
    Return the EDL capacitance (F) reaching ``fraction`` of the transition at ``rise_time``.

    Solved by bisection on the capacitance with the unit's EDL resistances fixed.
    """
    if not 0 < fraction < 1:
        raise DomainError("fraction", fraction, "(0, 1)")
    if rise_time <= 0:
        raise DomainError("rise_time", rise_time, "> 0 s")
    r_edl = unit.r_edl1 + unit.r_edl2

    def residual(capacitance: float) -> float:
        return -math.expm1(-rise_time / (r_edl * capacitance)) - fraction

    high = rise_time / r_edl
    while residual(high) > 0:
        high *= 2.0
    low = high
    while residual(low) < 0:
        low /= 2.0
    capacitance = bisect(residual, low, high, xtol=1e-12 * high, rtol=1e-14, maxiter=500)
    logger.debug(
        "EDL capacitance for %s: %.6g F (theta=%.6g s)", unit.id, capacitance, capacitance * r_edl
    )
    return capacitance


def pemel_virtual_inertia(dp_vi: float, rocof_lim: float, f0: float) -> float:
    """Return the equivalent virtual inertia (MW·s/Hz) of a PEMEL's inertial response power."""
    if rocof_lim <= 0:
        raise DomainError("rocof_lim", rocof_lim, "> 0 Hz/s")
    if f0 <= 0:
        raise DomainError("f0", f0, "> 0 Hz")
    if dp_vi < 0:
        raise DomainError("dp_vi", dp_vi, ">= 0 MW")
    return dp_vi / (rocof_lim * f0)


def afg_power_from_fuel(q_nh3: float, unit: AfgUnit) -> float:
    """Return the AFG output (MW) for an ammonia flow (kg/s)."""
    if q_nh3 < 0:
        raise DomainError("q_nh3", q_nh3, ">= 0 kg/s")
    return unit.eta_comb * unit.eta_steam * unit.lhv_nh3 * q_nh3


def fuel_from_power(power: float, unit: AfgUnit) -> float:
    """Return the ammonia flow (kg/s) needed for an AFG output (MW)."""
    if power < 0:
        raise DomainError("power", power, ">= 0 MW")
    return power / (unit.eta_comb * unit.eta_steam * unit.lhv_nh3)


def cooling_limit(unit: ElectrolyzerUnit, temp: float) -> float:
    """Return the maximum cooling heat flow (MW) at a stack temperature."""
    return max(0.0, unit.a_cool * (temp - unit.t_cool) / 1e3)


def thermal_step(  # noqa: PLR0913
    unit: ElectrolyzerUnit,
    temp: float,
    p_stack: float,
    current: float,
    h_cool: float,
    dt: float,
) -> float:
    """
    Advance the lumped stack temperature by one period.

    Parameters
    ----------
    unit : ElectrolyzerUnit
        Electrolyzer parameters.
    temp : float
        Temperature at the start of the period (°C).
    p_stack : float
        Stack power (MW).
    current : float
        Stack current (kA).
    h_cool : float
        Cooling heat flow (MW).
    dt : float
        Period length (h).

    Returns
    -------
    float
        Temperature at the end of the period (°C). Not clamped to the stack limits.

    Raises
    ------
    ContractViolationError
        If the cooling flow exceeds what the temperature difference to the coolant allows.
    """
    limit = cooling_limit(unit, temp)
    if h_cool < 0 or h_cool > limit + 1e-12:
        msg = f"Cooling {h_cool:g} MW outside [0, {limit:g}] MW at {temp:g} °C for {unit.id}."
        raise ContractViolationError(msg)
    thermoneutral = unit.n_c * current * unit.v_tn / 1e3
    net_heat = p_stack - thermoneutral - h_cool
    return temp + net_heat * JOULES_PER_MWH * dt / unit.c_heat
