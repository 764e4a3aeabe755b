"""
Schedule Verification.

Rebuilds each hour's frequency case from a solved schedule (committed
inertia, damping and every unit's primary reserve as its own ramp) and
simulates the post-contingency response to check the nadir, RoCoF and
quasi-steady-state limits.
"""

import math

import numpy as np

from p2hsched.config.constants import DEFAULT_HORIZON, DEFAULT_STEP, VERIFICATION_TOLERANCE
from p2hsched.models.frequency import FrequencyCase, FrequencyTrajectory, PfrRamp
from p2hsched.models.scenario import SchedulingMode, SystemScenario
from p2hsched.models.solution import (
    HourSchedule,
    HourVerification,
    ScheduleSolution,
    VerificationReport,
)
from p2hsched.services.freq_dynamics import simulate
from p2hsched.services.security_compiler import compute_dp_dis, inertia_bounds, system_damping
from p2hsched.utils.logging_config import logger

SETTLING_TIME_CONSTANTS = 8.0
MAX_HORIZON = 600.0
SAMPLES_PER_HORIZON = 20_000

# Response stage and delivery-time key of each unit kind.
RAMP_STAGES = {"el": (1, "t_e"), "bes": (1, "t_b"), "afg": (2, "t_g"), "wt": (2, "t_w")}


def hour_ramps(solution: ScheduleSolution, hour: HourSchedule) -> tuple[PfrRamp, ...]:
    """Return one ramp per unit holding primary reserve in an hour."""
    ramps = []
    for unit in hour.units:
        if unit.kind not in RAMP_STAGES or unit.r_pfr <= 0:
            continue
        stage, key = RAMP_STAGES[unit.kind]
        ramps.append(
            PfrRamp(
                label=unit.unit_id,
                reserve=unit.r_pfr,
                delivery_time=solution.delivery_times[key],
                stage=stage,
            )
        )
    return tuple(ramps)


def hour_case(solution: ScheduleSolution, hour: HourSchedule) -> FrequencyCase:
    """Build the frequency case of a scheduled hour."""
    freq = solution.frequency
    damping = hour.damping + (hour.afg_damping if freq.afg_damping else 0.0)
    return FrequencyCase.from_ramps(
        h_agg=hour.inertia,
        d_agg=damping,
        dp_dis=hour.dp_dis,
        db1=freq.db1,
        db2=freq.db2,
        t_db1=freq.t_db1,
        t_db2=freq.t_db2,
        ramps=hour_ramps(solution, hour),
        f_n=freq.f_n,
    )


def capability_case(scenario: SystemScenario, hour: int, dp_dis: float | None = None) -> FrequencyCase:
    """
    Build an hour's frequency case with every unit committed at its reserve limit.

    The disturbance defaults to the scenario's contingency for that hour.
    Electrolyzers hold no reserve in CM2.
    """
    freq = scenario.frequency
    if dp_dis is None:
        dp_dis = float(compute_dp_dis(scenario)[hour])
    ramps = [PfrRamp(unit.id, unit.p_lim, freq.t_b, 1) for unit in scenario.bess]
    if scenario.mode is not SchedulingMode.CM2:
        ramps.extend(PfrRamp(unit.id, unit.r_pfr_lim, freq.t_e, 1) for unit in scenario.electrolyzers)
    ramps.extend(PfrRamp(unit.id, unit.r_pfr_lim, freq.t_g, 2) for unit in scenario.afgs)
    ramps.extend(PfrRamp(unit.id, unit.capacity * unit.k_deload_max, freq.t_w, 2) for unit in scenario.wts)
    _, h_agg = inertia_bounds(scenario, 0.0)
    return FrequencyCase.from_ramps(
        h_agg=h_agg,
        d_agg=system_damping(scenario, hour, include_afg=freq.afg_damping),
        dp_dis=dp_dis,
        db1=freq.db1,
        db2=freq.db2,
        t_db1=freq.t_db1,
        t_db2=freq.t_db2,
        ramps=tuple(ramp for ramp in ramps if ramp.reserve > 0),
        f_n=freq.f_n,
    )


def simulation_horizon(case: FrequencyCase) -> float:
    """
    Return a horizon long enough for every ramp to saturate and the response to settle.

    Examples
    --------
    >>> case = FrequencyCase(10.0, 0.0, 1.0, 0.03, 0.05, 0.5, 1.0, 1.0, 1.0, 1.0)
    >>> simulation_horizon(case)
    600.0
    """
    ramps_done = case.t_db2 + max((ramp.delivery_time for ramp in case.ramps), default=0.0)
    settle = SETTLING_TIME_CONSTANTS * 2.0 * case.h_agg / case.d_agg if case.d_agg > 0 else math.inf
    return min(MAX_HORIZON, max(DEFAULT_HORIZON, ramps_done + settle))


def simulate_case(case: FrequencyCase, *, continuous_ramps: bool = False) -> FrequencyTrajectory:
    """Simulate a case over a settling horizon with a step resolving the first stage."""
    horizon = simulation_horizon(case)
    step = min(max(DEFAULT_STEP, horizon / SAMPLES_PER_HORIZON), 0.5 * case.stage_width)
    return simulate(case, horizon, step, continuous_ramps=continuous_ramps)


def simulate_hour(solution: ScheduleSolution, hour: HourSchedule) -> FrequencyTrajectory:
    """Simulate a scheduled hour's post-contingency deviation."""
    return simulate_case(hour_case(solution, hour), continuous_ramps=solution.frequency.continuous_ramps)


def _arresting_rocof(trajectory: FrequencyTrajectory) -> float:
    """Largest deviation rate (Hz/s) before the nadir."""
    times = trajectory.times
    values = trajectory.deviations
    end = max(int(np.searchsorted(times, trajectory.nadir_time, side="right")), 2)
    rates = np.abs(np.diff(values[:end]) / np.diff(times[:end]))
    return float(rates.max()) if rates.size else 0.0


def verify_hour(
    solution: ScheduleSolution,
    hour: HourSchedule,
    tolerance: float = VERIFICATION_TOLERANCE,
) -> HourVerification:
    """
    Check one hour against the nadir, RoCoF and quasi-steady-state limits.

    RoCoF is taken over the arresting phase (up to the nadir). The settled
    deviation counts only under-frequency offsets; fixed reserve ramps that
    overshoot nominal frequency are not penalized.
    """
    freq = solution.frequency
    if hour.dp_dis <= 0:
        return HourVerification(
            hour=hour.hour, nadir=0.0, nadir_time=0.0, rocof=0.0, qss=0.0,
            nadir_ok=True, rocof_ok=True, qss_ok=True,
        )
    if hour.inertia <= 0:
        logger.warning("Hour %d has no committed inertia", hour.hour)
        return HourVerification(
            hour=hour.hour, nadir=math.inf, nadir_time=0.0, rocof=math.inf, qss=math.inf,
            nadir_ok=False, rocof_ok=False, qss_ok=False,
        )
    trajectory = simulate_hour(solution, hour)
    nadir = trajectory.nadir_value
    rocof = _arresting_rocof(trajectory)
    qss = max(0.0, trajectory.qss)
    result = HourVerification(
        hour=hour.hour,
        nadir=nadir,
        nadir_time=trajectory.nadir_time,
        rocof=rocof,
        qss=qss,
        nadir_ok=nadir <= freq.nadir_lim + tolerance,
        rocof_ok=rocof <= freq.rocof_lim + tolerance,
        qss_ok=qss <= freq.qss_lim + tolerance,
    )
    for metric, ok, value, limit in (
        ("nadir", result.nadir_ok, nadir, freq.nadir_lim),
        ("RoCoF", result.rocof_ok, rocof, freq.rocof_lim),
        ("QSS", result.qss_ok, qss, freq.qss_lim),
    ):
        if not ok:
            logger.warning("Hour %d fails %s: %.4f > %.4f", hour.hour, metric, value, limit)
    return result


def verify(solution: ScheduleSolution, tolerance: float = VERIFICATION_TOLERANCE) -> VerificationReport:
    """Verify every hour of a schedule and return the report."""
    hours = tuple(verify_hour(solution, hour, tolerance) for hour in solution.hours)
    report = VerificationReport(mode=solution.mode, tolerance=tolerance, hours=hours)
    logger.info(
        "Verified %s (%s): %d of %d hours pass",
        solution.scenario_name,
        solution.mode.value,
        sum(hour.passed for hour in hours),
        len(hours),
    )
    return report
