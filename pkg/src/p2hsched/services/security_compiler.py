"""
Security Compiler.

Turns the hourly frequency limits into linear constraint data: the RoCoF
inertia floor, the quasi-steady-state reserve floor, the nadir thresholds on
the inertia-weighted reserve rate, and the single-binary stage selection that
decides whether the nadir is secured in the first or the second stage.

Compilation of an hour is pure and independent of every other hour.
``compile_security_rows`` then writes an envelope into a pyomo block.
"""

import math
from dataclasses import dataclass

import numpy as np
import pyomo.environ as pyo
from scipy.optimize import bisect

from p2hsched.config.constants import (
    BIG_M_SAFETY,
    ROOT_RESIDUAL_TOLERANCE,
)
from p2hsched.exceptions.errors import DomainError, InfeasibleSecurityError
from p2hsched.models.envelope import NadirThreshold, SecurityEnvelope, ThresholdStatus
from p2hsched.models.scenario import LoadBasis, SchedulingMode, SystemScenario
from p2hsched.utils.logging_config import logger

ROOT_LOWER_BRACKET = 1e-9
ROOT_MAX_ITERATIONS = 400
ROOT_RELATIVE_TOLERANCE = 4 * np.finfo(float).eps


def rocof_floor(dp_dis: float, rocof_lim: float) -> float:
    """
    Return the minimum aggregate inertia ΔP/(2·lim) in MW·s/Hz.

    Examples
    --------
    >>> rocof_floor(9.0, 0.5)
    9.0
    """
    if rocof_lim <= 0:
        raise DomainError("rocof_lim", rocof_lim, "> 0 Hz/s")
    return dp_dis / (2.0 * rocof_lim)


def qss_floor(dp_dis: float, d_agg: float, qss_lim: float) -> float:
    """
    Return the minimum total primary reserve max(0, ΔP − D·lim) in MW.

    Examples
    --------
    >>> qss_floor(9.0, 2.0, 0.5)
    8.0
    """
    return max(0.0, dp_dis - d_agg * qss_lim)


def nadir_gap(x: float, d_agg: float, dp_dis: float) -> float:
    """Return g(x) = 2x·ln(2x/(DΔP + 2x)), strictly decreasing from 0 to −DΔP."""
    return -2.0 * x * math.log1p(d_agg * dp_dis / (2.0 * x))


def solve_x_star(d_agg: float, dp_dis: float, nadir_lim: float, db: float) -> NadirThreshold:
    """
    Solve the nadir threshold equation g(x) = D²(lim − db) − DΔP.

    The threshold is on the product of aggregate inertia and stage reserve
    rate (MW²/Hz): a stage whose product reaches it keeps its nadir within the
    limit.

    Parameters
    ----------
    d_agg : float
        Aggregate damping (MW/Hz).
    dp_dis : float
        Disturbance (MW).
    nadir_lim : float
        Nadir limit (Hz).
    db : float
        Deadband of the stage (Hz).

    Returns
    -------
    NadirThreshold
        ``SOLVED`` with the root, ``TRIVIAL`` when the right-hand side is
        nonnegative, or ``INFEASIBLE`` when it lies at or below −DΔP.
    """
    if d_agg <= 0:
        raise DomainError("d_agg", d_agg, "> 0 MW/Hz")
    if dp_dis <= 0:
        raise DomainError("dp_dis", dp_dis, "> 0 MW")
    if nadir_lim <= db:
        raise DomainError("nadir_lim", nadir_lim, f"> deadband {db} Hz")

    rhs = d_agg**2 * (nadir_lim - db) - d_agg * dp_dis
    if rhs >= 0:
        return NadirThreshold(ThresholdStatus.TRIVIAL, None, rhs)
    if rhs <= -d_agg * dp_dis:
        return NadirThreshold(ThresholdStatus.INFEASIBLE, None, rhs)

    def residual(x: float) -> float:
        return nadir_gap(x, d_agg, dp_dis) - rhs

    lower, upper = ROOT_LOWER_BRACKET, 1.0
    while residual(lower) <= 0:
        lower *= 0.5
    while residual(upper) >= 0:
        upper *= 2.0
    root = bisect(
        residual, lower, upper, xtol=1e-15 * upper, rtol=ROOT_RELATIVE_TOLERANCE, maxiter=ROOT_MAX_ITERATIONS
    )
    error = abs(residual(root))
    if error > ROOT_RESIDUAL_TOLERANCE * max(1.0, abs(rhs)):
        logger.warning("Nadir threshold %.6g has residual %.3g above tolerance", root, error)
    logger.debug("Nadir threshold %.6g solved with residual %.3g (rhs %.6g)", root, error, rhs)
    return NadirThreshold(ThresholdStatus.SOLVED, root, rhs, error)


def _stage_rate_at(h: float, d_agg: float, dp_dis: float, dt_stage: float) -> float:
    """Return R₁*(H), the stage-1 rate whose nadir lands exactly at t_db2."""
    if d_agg == 0:
        return dp_dis / dt_stage
    beta = d_agg * dt_stage / 2.0
    return d_agg * dp_dis / (2.0 * h * math.expm1(beta / h))


def r1_thresholds(
    h_lo: float,
    h_hi: float,
    d_agg: float,
    dp_dis: float,
    dt_stage: float,
) -> tuple[float, float]:
    """
    Return (r1_lo, r1_hi): the stage-1 rates at the inertia bounds above which
    the nadir falls inside stage 1.

    Raises
    ------
    DomainError
        If the inertia bounds are not ordered and positive.
    """
    if not 0 < h_lo <= h_hi:
        raise DomainError("h_lo", h_lo, f"0 < h_lo <= h_hi = {h_hi}")
    if dt_stage <= 0:
        raise DomainError("dt_stage", dt_stage, "> 0 s")
    return (
        _stage_rate_at(h_lo, d_agg, dp_dis, dt_stage),
        _stage_rate_at(h_hi, d_agg, dp_dis, dt_stage),
    )


def mu_margin(h_lo: float, h_hi: float, d_agg: float, dt_stage: float) -> tuple[float, float]:
    """
    Return the nadir-time margin μ (s) and its second-order estimate.

    μ bounds how far before t_db2 the nadir can fall when the stage-1 rate is
    between ``r1_lo`` and ``r1_hi``.
    """
    if not 0 < h_lo <= h_hi:
        raise DomainError("h_lo", h_lo, f"0 < h_lo <= h_hi = {h_hi}")
    if dt_stage <= 0:
        raise DomainError("dt_stage", dt_stage, "> 0 s")
    if d_agg == 0:
        return 0.0, 0.0
    beta = d_agg * dt_stage / 2.0
    exact = 2.0 / d_agg * (beta - h_lo * math.log1p(h_hi * math.expm1(beta / h_hi) / h_lo))
    estimate = beta**2 * (h_hi - h_lo) / (d_agg * h_hi * h_lo)
    return max(0.0, exact), estimate


def system_damping(scenario: SystemScenario, hour: int, *, include_afg: bool = False) -> float:
    """Return the aggregate damping of an hour (MW/Hz)."""
    damping = scenario.load.damping(hour) + sum(bes.d_b for bes in scenario.bess)
    if include_afg:
        damping += sum(afg.d_g for afg in scenario.afgs)
    return damping


def inertia_bounds(scenario: SystemScenario, rocof_inertia: float) -> tuple[float, float]:
    """
    Return (H̲, H̄) of an hour.

    H̄ commits every inertia source; H̲ is the larger of the RoCoF floor and
    the always-available storage inertia.
    """
    storage = sum(bes.h_b for bes in scenario.bess)
    upper = storage + sum(afg.inertia(scenario.frequency.f_n) for afg in scenario.afgs)
    if scenario.mode is not SchedulingMode.CM2:
        upper += sum(unit.h_virtual for unit in scenario.pemels)
    return max(rocof_inertia, storage), upper


def reserve_rate_bounds(scenario: SystemScenario) -> tuple[float, float]:
    """Return the largest attainable stage-1 and stage-2 reserve rates (MW/s)."""
    freq = scenario.frequency
    stage1 = sum(bes.p_lim / freq.t_b for bes in scenario.bess)
    if scenario.mode is not SchedulingMode.CM2:
        stage1 += sum(unit.r_pfr_lim / freq.t_e for unit in scenario.electrolyzers)
    stage2 = stage1 + sum(afg.r_pfr_lim / freq.t_g for afg in scenario.afgs)
    stage2 += sum(wt.capacity * wt.k_deload_max / freq.t_w for wt in scenario.wts)
    return stage1, stage2


def contingency_base(
    scenario: SystemScenario,
    scheduled_load: np.ndarray | None = None,
) -> np.ndarray:
    """
    Return the hourly load (MW) the contingency step is a fraction of.

    Under the total basis this is the scheduled load when one is given, else
    the forecast total load: downstream load plus the full electrolyzer
    capacity. Under the downstream basis it is the downstream load alone.
    """
    downstream = np.asarray(scenario.load.p_d[: scenario.periods], dtype=float)
    if scenario.contingency.basis is not LoadBasis.TOTAL:
        return downstream
    if scheduled_load is None:
        return downstream + sum(unit.p_max for unit in scenario.electrolyzers)
    return np.asarray(scheduled_load, dtype=float)


def compute_dp_dis(
    scenario: SystemScenario,
    scheduled_load: np.ndarray | None = None,
) -> np.ndarray:
    """
    Return the per-hour disturbance (MW).

    Examples
    --------
    >>> from p2hsched.factory import build_preset
    >>> round(float(compute_dp_dis(build_preset("base_system"))[12]), 3)
    7.915
    """
    return scenario.contingency.load_step_fraction * contingency_base(scenario, scheduled_load)


def _empty_envelope(scenario: SystemScenario, hour: int, dp_dis: float, d_agg: float) -> SecurityEnvelope:
    freq = scenario.frequency
    return SecurityEnvelope(
        hour=hour,
        inertia_floor=0.0,
        qss_reserve_floor=0.0,
        x1_star=None,
        x2_star=None,
        stage1_status=ThresholdStatus.TRIVIAL,
        stage2_status=ThresholdStatus.TRIVIAL,
        r1_lo=0.0,
        r1_hi=0.0,
        mu_margin=0.0,
        mu_estimate=0.0,
        nadir_lim=freq.nadir_lim,
        rocof_lim=freq.rocof_lim,
        qss_lim=freq.qss_lim,
        dp_dis=dp_dis,
        d_agg=d_agg,
        h_bounds=(0.0, 0.0),
    )


def compile_hour(scenario: SystemScenario, hour: int, dp_dis: float) -> SecurityEnvelope:
    """
    Compile the security envelope of one hour.

    Raises
    ------
    InfeasibleSecurityError
        If the RoCoF floor exceeds every committable inertia, or neither stage
        can keep the nadir within the limit at any reserve.
    """
    freq = scenario.frequency
    d_agg = system_damping(scenario, hour)
    if dp_dis <= 0:
        return _empty_envelope(scenario, hour, dp_dis, d_agg)

    inertia_floor = rocof_floor(dp_dis, freq.rocof_lim)
    h_lo, h_hi = inertia_bounds(scenario, inertia_floor)
    if h_lo > h_hi or h_hi <= 0:
        raise InfeasibleSecurityError(
            hour, f"inertia floor {h_lo:.4g} MW·s/Hz exceeds committable {h_hi:.4g} MW·s/Hz"
        )

    stage1 = solve_x_star(d_agg, dp_dis, freq.nadir_lim, freq.db1)
    stage2 = solve_x_star(d_agg, dp_dis, freq.nadir_lim, freq.db2)
    if stage1.status is ThresholdStatus.INFEASIBLE and stage2.status is ThresholdStatus.INFEASIBLE:
        raise InfeasibleSecurityError(hour, "nadir limit unreachable in either response stage")

    dt_stage = freq.t_db2 - freq.t_db1
    r1_lo, r1_hi = r1_thresholds(h_lo, h_hi, d_agg, dp_dis, dt_stage)
    mu, mu_estimate = mu_margin(h_lo, h_hi, d_agg, dt_stage)
    r1_max, _ = reserve_rate_bounds(scenario)

    big_m = {
        "r1_hi": BIG_M_SAFETY * r1_hi,
        "r1_lo": BIG_M_SAFETY * max(0.0, r1_max - r1_lo),
    }
    if stage1.value is not None:
        big_m["phi1"] = BIG_M_SAFETY * stage1.value
    if stage2.value is not None:
        big_m["phi2"] = BIG_M_SAFETY * stage2.value

    envelope = SecurityEnvelope(
        hour=hour,
        inertia_floor=inertia_floor,
        qss_reserve_floor=qss_floor(dp_dis, d_agg, freq.qss_lim),
        x1_star=stage1.value,
        x2_star=stage2.value,
        stage1_status=stage1.status,
        stage2_status=stage2.status,
        r1_lo=r1_lo,
        r1_hi=r1_hi,
        mu_margin=mu,
        mu_estimate=mu_estimate,
        nadir_lim=freq.nadir_lim,
        rocof_lim=freq.rocof_lim,
        qss_lim=freq.qss_lim,
        dp_dis=dp_dis,
        d_agg=d_agg,
        h_bounds=(h_lo, h_hi),
        big_m=big_m,
    )
    logger.debug(
        "Hour %d: H in [%.4g, %.4g], x1*=%s (%s), x2*=%s (%s)",
        hour,
        h_lo,
        h_hi,
        stage1.value,
        stage1.status.value,
        stage2.value,
        stage2.status.value,
    )
    return envelope


def compile_envelopes(
    scenario: SystemScenario,
    dp_dis: np.ndarray | None = None,
) -> dict[int, SecurityEnvelope]:
    """Compile every hour of a scenario, keyed by hour index."""
    disturbances = compute_dp_dis(scenario) if dp_dis is None else np.asarray(dp_dis, dtype=float)
    envelopes = {hour: compile_hour(scenario, hour, float(disturbances[hour])) for hour in scenario.hours}
    logger.info("Compiled %d security envelopes for %s", len(envelopes), scenario.name)
    return envelopes


@dataclass(frozen=True)
class SecurityTerms:
    """
    Linear expressions of one hour that the security rows constrain.

    ``inertia_rate1`` and ``inertia_rate2`` are the linearized products of
    aggregate inertia with the stage-1 and stage-2 reserve rates.
    """

    inertia: object
    stage1_rate: object
    total_reserve: object
    inertia_rate1: object
    inertia_rate2: object


def compile_nadir_binary(block: pyo.Block, envelope: SecurityEnvelope, terms: SecurityTerms) -> None:
    """
    Add the stage-selection binary ``delta`` and its four big-M rows to ``block``.

    ``delta = 1`` secures the nadir in stage 1 (R₁ ≥ R₁^hi, H·R₁ ≥ x₁*);
    ``delta = 0`` secures it in stage 2 (R₁ ≤ R₁^lo, H·R₂ ≥ x₂*).
    """
    block.delta = pyo.Var(domain=pyo.Binary)
    if envelope.fixed_branch is not None:
        block.delta.fix(envelope.fixed_branch)
    delta = block.delta
    m = envelope.big_m

    block.stage1_rate_floor = pyo.Constraint(
        expr=terms.stage1_rate >= envelope.r1_hi - m["r1_hi"] * (1 - delta)
    )
    block.stage1_rate_cap = pyo.Constraint(
        expr=terms.stage1_rate <= envelope.r1_lo + m["r1_lo"] * delta
    )
    if envelope.x1_star is not None:
        block.stage1_nadir = pyo.Constraint(
            expr=envelope.x1_star - terms.inertia_rate1 <= m["phi1"] * (1 - delta)
        )
    if envelope.x2_star is not None:
        block.stage2_nadir = pyo.Constraint(
            expr=envelope.x2_star - terms.inertia_rate2 <= m["phi2"] * delta
        )


def compile_security_rows(block: pyo.Block, envelope: SecurityEnvelope, terms: SecurityTerms) -> None:
    """Add the RoCoF, quasi-steady-state and (when needed) nadir rows of one hour."""
    if envelope.dp_dis <= 0:
        return
    block.rocof = pyo.Constraint(expr=terms.inertia >= envelope.inertia_floor)
    block.qss = pyo.Constraint(expr=terms.total_reserve >= envelope.qss_reserve_floor)
    if envelope.needs_nadir_rows:
        compile_nadir_binary(block, envelope, terms)
