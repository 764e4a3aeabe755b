"""
Frequency Dynamics.

Staged post-contingency centre-of-inertia frequency response. The deviation
magnitude ``y`` (Hz, positive for under-frequency) obeys

    2H·y' + D·(y − c(τ)) = ΔP − P_pfr(τ)

with ``c = 0`` before the first deadband time, ``c = db1`` in stage 1 and
``c = 0`` from the second deadband time on. Primary reserves ramp linearly
from the deadband times and saturate at their reserve values.

Closed forms cover the unsaturated stage-1 trajectory and its nadir, plus the
stage-2 analog used by the security compiler. ``simulate`` is an independent
fixed-step RK4 integrator of the piecewise right-hand side.
"""

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.optimize import minimize_scalar

from p2hsched.config.constants import (
    DEADBAND_MISMATCH_WARNING,
    DEFAULT_HORIZON,
    DEFAULT_STEP,
)
from p2hsched.exceptions.errors import (
    DomainError,
    NoStage1NadirError,
    ResolutionError,
    UnboundedDeviationError,
)
from p2hsched.models.frequency import FrequencyCase, FrequencyTrajectory
from p2hsched.utils.logging_config import logger

Direction = Literal["under", "over"]

SERIES_THRESHOLD = 1e-4


def _rise(k: float, u: float) -> float:
    """Return (1 − e^{−ku})/k, equal to u when k = 0."""
    x = k * u
    if abs(x) < SERIES_THRESHOLD:
        return u * (1.0 - x / 2.0 + x * x / 6.0)
    return -math.expm1(-x) / k


def _lag(k: float, u: float) -> float:
    """Return (ku − 1 + e^{−ku})/k², equal to u²/2 when k = 0."""
    x = k * u
    if abs(x) < SERIES_THRESHOLD:
        return u * u * (0.5 - x / 6.0 + x * x / 24.0)
    return (math.expm1(-x) + x) / (k * k)


def _log_ratio(x: float) -> float:
    """Return (x − log1p(x))/x², equal to 1/2 when x = 0."""
    if abs(x) < SERIES_THRESHOLD:
        return 0.5 - x / 3.0 + x * x / 4.0
    return (x - math.log1p(x)) / (x * x)


def _log1p_ratio(x: float) -> float:
    """Return log1p(x)/x, equal to 1 when x = 0."""
    if abs(x) < SERIES_THRESHOLD:
        return 1.0 - x / 2.0 + x * x / 3.0
    return math.log1p(x) / x


def linear_stage_response(  # noqa: PLR0913
    h_agg: float,
    d_agg: float,
    y0: float,
    forcing: float,
    rate: float,
    u: float,
) -> float:
    """
    Return y(u) for 2H·y' + D·y = forcing − rate·u with y(0) = y0.

    The constant ``forcing`` already contains any deadband offset ``D·c``.
    """
    k = d_agg / (2.0 * h_agg)
    return y0 * math.exp(-k * u) + (forcing * _rise(k, u) - rate * _lag(k, u)) / (2.0 * h_agg)


def linear_stage_peak(
    h_agg: float,
    d_agg: float,
    y0: float,
    forcing: float,
    rate: float,
) -> tuple[float, float]:
    """
    Return (u*, y*) of the supremum of a linear stage response over u ≥ 0.

    A stage that starts falling peaks at u = 0. Without a ramp the supremum is
    the asymptote (u* = inf).
    """
    margin = forcing - d_agg * y0
    if margin <= 0:
        return 0.0, y0
    if rate <= 0:
        if d_agg <= 0:
            return math.inf, math.inf
        return math.inf, forcing / d_agg
    x = d_agg * margin / (2.0 * h_agg * rate)
    u_star = margin / rate * _log1p_ratio(x)
    return u_star, linear_stage_response(h_agg, d_agg, y0, forcing, rate, u_star)


def _check_disturbance(case: FrequencyCase) -> None:
    if case.dp_dis < 0:
        raise DomainError("dp_dis", case.dp_dis, ">= 0 MW (use direction='over' to mirror)")


def trajectory_closed_form(case: FrequencyCase, tau: float) -> float:
    """
    Return the stage-1 deviation (Hz) at time ``tau``.

    Stage 1 starts at the first deadband with y = db1 and an unsaturated
    aggregate ramp ``stage1_rate``.

    Raises
    ------
    DomainError
        If ``tau`` lies outside [t_db1, t_db2].
    """
    _check_disturbance(case)
    if not case.t_db1 <= tau <= case.t_db2:
        raise DomainError("tau", tau, f"[{case.t_db1}, {case.t_db2}] s")
    if case.dp_dis == 0:
        # no deadband is crossed, the system stays at rest
        return 0.0
    k = case.d_agg / (2.0 * case.h_agg)
    u = tau - case.t_db1
    return case.db1 + (case.dp_dis * _rise(k, u) - case.stage1_rate * _lag(k, u)) / (
        2.0 * case.h_agg
    )


def trajectory_piecewise(
    case: FrequencyCase,
    tau: float,
    *,
    continuous_ramps: bool = False,
) -> float:
    """
    Return the unsaturated closed-form deviation (Hz) at any ``tau`` ≥ 0.

    Before t_db1 the response is the free step from rest; stage 1 follows the
    stage-1 closed form; stage 2 starts from the stage-1 value at t_db2 and
    either restarts every ramp at t_db2 (default) or keeps the stage-1 ramps
    running (``continuous_ramps``).
    """
    _check_disturbance(case)
    if tau < 0:
        raise DomainError("tau", tau, ">= 0 s")
    if case.dp_dis == 0:
        return 0.0
    if tau < case.t_db1:
        return linear_stage_response(case.h_agg, case.d_agg, 0.0, case.dp_dis, 0.0, tau)
    if tau <= case.t_db2:
        return trajectory_closed_form(case, tau)
    y0, forcing = stage2_initial_state(case, continuous_ramps=continuous_ramps)
    return linear_stage_response(
        case.h_agg, case.d_agg, y0, forcing, case.stage2_rate, tau - case.t_db2
    )


def stage2_initial_state(
    case: FrequencyCase,
    *,
    continuous_ramps: bool = False,
) -> tuple[float, float]:
    """Return the stage-2 initial deviation and constant forcing term (MW)."""
    y0 = trajectory_closed_form(case, case.t_db2)
    forcing = case.dp_dis
    if continuous_ramps:
        forcing -= case.stage1_rate * case.stage_width
    return y0, forcing


def stage2_peak(case: FrequencyCase, *, continuous_ramps: bool = False) -> tuple[float, float]:
    """Return (time s, deviation Hz) of the unsaturated stage-2 peak of the piecewise form."""
    y0, forcing = stage2_initial_state(case, continuous_ramps=continuous_ramps)
    u_star, value = linear_stage_peak(case.h_agg, case.d_agg, y0, forcing, case.stage2_rate)
    return case.t_db2 + u_star, value


def nadir_time(case: FrequencyCase) -> float:
    """
    Return the stage-1 nadir time (s).

    Raises
    ------
    NoStage1NadirError
        If the stage-1 reserve rate is zero.
    """
    _check_disturbance(case)
    if case.stage1_rate <= 0:
        raise NoStage1NadirError
    if case.dp_dis == 0:
        return case.t_db1
    x = case.d_agg * case.dp_dis / (2.0 * case.h_agg * case.stage1_rate)
    return case.t_db1 + case.dp_dis / case.stage1_rate * _log1p_ratio(x)


def nadir_value(case: FrequencyCase) -> float:
    """
    Return the stage-1 nadir deviation (Hz).

    Evaluated as db1 + ΔP/D + (2HR₁/D²)·ln(2HR₁/(DΔP + 2HR₁)) in a form that
    stays exact as D → 0.
    """
    _check_disturbance(case)
    if case.stage1_rate <= 0:
        raise NoStage1NadirError
    x = case.d_agg * case.dp_dis / (2.0 * case.h_agg * case.stage1_rate)
    return case.db1 + case.dp_dis**2 * _log_ratio(x) / (2.0 * case.h_agg * case.stage1_rate)


def nadir_time_stage2(case: FrequencyCase) -> float:
    """Return the stage-2 analog nadir time (s): stage-1 form with R₂ from t_db2."""
    _check_disturbance(case)
    if case.stage2_rate <= 0:
        raise NoStage1NadirError("No stage-2 nadir: stage-2 reserve rate is zero.")
    x = case.d_agg * case.dp_dis / (2.0 * case.h_agg * case.stage2_rate)
    return case.t_db2 + case.dp_dis / case.stage2_rate * _log1p_ratio(x)


def nadir_value_stage2(case: FrequencyCase) -> float:
    """Return the stage-2 analog nadir deviation (Hz): stage-1 form with R₂ and db2."""
    _check_disturbance(case)
    if case.stage2_rate <= 0:
        raise NoStage1NadirError("No stage-2 nadir: stage-2 reserve rate is zero.")
    x = case.d_agg * case.dp_dis / (2.0 * case.h_agg * case.stage2_rate)
    return case.db2 + case.dp_dis**2 * _log_ratio(x) / (2.0 * case.h_agg * case.stage2_rate)


def max_rocof(case: FrequencyCase) -> float:
    """Return the initial (maximum) rate of change of frequency ΔP/(2H) in Hz/s."""
    _check_disturbance(case)
    return case.dp_dis / (2.0 * case.h_agg)


def qss_deviation(case: FrequencyCase) -> float:
    """
    Return the quasi-steady-state deviation (Hz) once all reserves are deployed.

    Raises
    ------
    UnboundedDeviationError
        If there is no damping and the reserves do not cover the disturbance.
    """
    _check_disturbance(case)
    shortfall = case.dp_dis - case.total_pfr
    if case.d_agg == 0:
        if shortfall > 0:
            raise UnboundedDeviationError(case.dp_dis, case.total_pfr)
        return 0.0
    return max(0.0, shortfall / case.d_agg)


def deadband_crossing_time(case: FrequencyCase) -> float:
    """Return when the free response from rest reaches db1 (inf if it never does)."""
    _check_disturbance(case)
    if case.db1 == 0:
        return 0.0
    if case.dp_dis <= case.d_agg * case.db1:
        return math.inf
    if case.d_agg == 0:
        return 2.0 * case.h_agg * case.db1 / case.dp_dis
    ratio = case.d_agg * case.db1 / case.dp_dis
    return -2.0 * case.h_agg / case.d_agg * math.log1p(-ratio)


def check_deadband_consistency(case: FrequencyCase) -> float:
    """Warn when the free-response crossing of db1 is far from t_db1; return the crossing."""
    crossing = deadband_crossing_time(case)
    if case.dp_dis > 0 and case.t_db1 > 0:
        mismatch = abs(crossing - case.t_db1) / case.t_db1
        if mismatch > DEADBAND_MISMATCH_WARNING:
            logger.warning(
                "Deadband time %.4g s differs from the integrated crossing %.4g s by %.0f%%",
                case.t_db1,
                crossing,
                100 * mismatch if math.isfinite(mismatch) else math.inf,
            )
    return crossing


@dataclass(frozen=True)
class _RampTerm:
    rate: float
    reserve: float
    start: float
    window: tuple[float, float]

    def power(self, tau: float) -> float:
        if not self.window[0] <= tau < self.window[1] or tau < self.start:
            return 0.0
        return min(self.reserve, self.rate * (tau - self.start))

    def slope(self, tau: float) -> float:
        if not self.window[0] <= tau < self.window[1] or tau < self.start:
            return 0.0
        return self.rate if self.rate * (tau - self.start) < self.reserve else 0.0

    def saturation_time(self) -> float:
        if self.rate <= 0 or not math.isfinite(self.reserve):
            return math.inf
        return self.start + self.reserve / self.rate


def _ramp_terms(case: FrequencyCase, *, continuous_ramps: bool) -> tuple[list[_RampTerm], float]:
    """Return the reserve ramp terms and the joint reserve cap of a case."""
    stage1 = (case.t_db1, case.t_db2)
    stage2 = (case.t_db2, math.inf)
    terms: list[_RampTerm] = []
    if case.ramps:
        for ramp in case.ramps:
            if ramp.reserve <= 0 or ramp.delivery_time <= 0:
                continue
            if ramp.stage == 1:
                terms.append(_RampTerm(ramp.rate, ramp.reserve, case.t_db1, stage1))
            start = case.t_db1 if continuous_ramps and ramp.stage == 1 else case.t_db2
            terms.append(_RampTerm(ramp.rate, ramp.reserve, start, stage2))
        return terms, math.inf

    extra = case.stage2_rate - case.stage1_rate
    terms.append(_RampTerm(case.stage1_rate, math.inf, case.t_db1, stage1))
    if continuous_ramps:
        terms.append(_RampTerm(case.stage1_rate, math.inf, case.t_db1, stage2))
        terms.append(_RampTerm(extra, math.inf, case.t_db2, stage2))
    else:
        terms.append(_RampTerm(case.stage2_rate, math.inf, case.t_db2, stage2))
    return terms, case.total_pfr


def _breakpoints(
    case: FrequencyCase,
    terms: list[_RampTerm],
    cap: float,
    horizon: float,
) -> list[float]:
    points = {0.0, case.t_db1, case.t_db2, horizon}
    points.update(
        t for term in terms if 0 < (t := term.saturation_time()) < horizon and t >= term.window[0]
    )
    ordered = sorted(p for p in points if 0 <= p <= horizon)
    if math.isfinite(cap):
        hits = []
        for left, right in zip(ordered, ordered[1:], strict=False):
            mid = 0.5 * (left + right)
            level = sum(term.power(left) for term in terms)
            slope = sum(term.slope(mid) for term in terms)
            if level < cap and slope > 0 and level + slope * (right - left) > cap:
                hits.append(left + (cap - level) / slope)
        ordered = sorted(set(ordered) | set(hits))
    return ordered


def simulate(  # noqa: PLR0913
    case: FrequencyCase,
    horizon: float = DEFAULT_HORIZON,
    step: float = DEFAULT_STEP,
    *,
    continuous_ramps: bool = False,
    direction: Direction = "under",
) -> FrequencyTrajectory:
    """
    Integrate the staged frequency response with fixed-step RK4.

    Parameters
    ----------
    case : FrequencyCase
        Hour parameters. Per-resource ramps are used when present; otherwise
        the aggregate stage rates are ramped jointly up to ``total_pfr``.
    horizon : float
        Simulated time (s), must exceed t_db2.
    step : float
        Nominal integration step (s). Segments between breakpoints (deadband
        times, ramp saturations, horizon) are split into equal substeps no
        longer than ``step``.
    continuous_ramps : bool
        Keep stage-1 ramps running across t_db2 instead of restarting them.
    direction : {"under", "over"}
        ``"over"`` mirrors the trajectory for a generation-loss event.

    Returns
    -------
    FrequencyTrajectory
        Samples with the refined nadir, maximum RoCoF and final deviation.

    Raises
    ------
    ResolutionError
        If ``step`` does not resolve the first response stage.
    """
    _check_disturbance(case)
    if step <= 0:
        raise DomainError("step", step, "> 0 s")
    if horizon <= case.t_db2:
        raise DomainError("horizon", horizon, f"> t_db2 = {case.t_db2} s")
    if step >= case.stage_width:
        raise ResolutionError(step, case.stage_width)
    if case.dp_dis == 0:
        times = np.linspace(0.0, horizon, math.ceil(horizon / step) + 1)
        return FrequencyTrajectory(
            times=times, deviations=np.zeros_like(times), nadir=(0.0, 0.0), max_rocof=0.0, qss=0.0
        )
    check_deadband_consistency(case)

    terms, cap = _ramp_terms(case, continuous_ramps=continuous_ramps)
    two_h = 2.0 * case.h_agg
    damping = case.d_agg

    def offset(tau: float) -> float:
        return case.db1 if case.t_db1 <= tau < case.t_db2 else 0.0

    def rhs(tau: float, y: float) -> float:
        delivered = min(cap, sum(term.power(tau) for term in terms))
        return (case.dp_dis - delivered - damping * (y - offset(tau))) / two_h

    breakpoints = _breakpoints(case, terms, cap, horizon)
    times = [0.0]
    values = [0.0]
    segment_of_sample = [0]

    def rk4(tau: float, y: float, h: float, segment_mid: float) -> float:
        # evaluate the piecewise coefficients of the segment containing segment_mid
        c = offset(segment_mid)
        delivered0 = min(cap, sum(term.power(tau) for term in terms))
        slope = 0.0 if delivered0 >= cap else sum(term.slope(segment_mid) for term in terms)

        def f(t: float, x: float) -> float:
            return (case.dp_dis - (delivered0 + slope * (t - tau)) - damping * (x - c)) / two_h

        k1 = f(tau, y)
        k2 = f(tau + h / 2, y + h * k1 / 2)
        k3 = f(tau + h / 2, y + h * k2 / 2)
        k4 = f(tau + h, y + h * k3)
        return y + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6

    segments = list(zip(breakpoints, breakpoints[1:], strict=False))
    for index, (left, right) in enumerate(segments):
        count = max(1, math.ceil((right - left) / step - 1e-9))
        h = (right - left) / count
        mid = 0.5 * (left + right)
        y = values[-1]
        for i in range(count):
            tau = left + i * h
            y = rk4(tau, y, h, mid)
            times.append(right if i == count - 1 else left + (i + 1) * h)
            values.append(y)
            segment_of_sample.append(index)

    time_array = np.asarray(times)
    value_array = np.asarray(values)

    def value_at(t: float) -> float:
        j = int(np.searchsorted(time_array, t, side="right")) - 1
        j = min(max(j, 0), len(time_array) - 2)
        left_time = time_array[j]
        if t == left_time:
            return float(value_array[j])
        seg_left, seg_right = segments[segment_of_sample[j + 1]]
        return rk4(left_time, float(value_array[j]), t - left_time, 0.5 * (seg_left + seg_right))

    peak = int(np.argmax(value_array))
    nadir = (float(time_array[peak]), float(value_array[peak]))
    if 0 < peak < len(time_array) - 1:
        refined = minimize_scalar(
            lambda t: -value_at(t),
            bounds=(time_array[peak - 1], time_array[peak + 1]),
            method="bounded",
            options={"xatol": 1e-10},
        )
        if -refined.fun >= nadir[1]:
            nadir = (float(refined.x), float(-refined.fun))

    rocof = max(abs(rhs(t, y)) for t, y in zip(times[:-1], values[:-1], strict=True))
    qss = float(value_array[-1])

    if direction == "over":
        return FrequencyTrajectory(
            times=time_array,
            deviations=-value_array,
            nadir=(nadir[0], -nadir[1]),
            max_rocof=rocof,
            qss=-qss,
        )
    return FrequencyTrajectory(
        times=time_array,
        deviations=value_array,
        nadir=nadir,
        max_rocof=rocof,
        qss=qss,
    )
