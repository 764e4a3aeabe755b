"""
Solver I/O.

Writes built models as LP or MPS files, solves them through a pyomo solver
plugin (HiGHS by default), normalizes the solver outcome and turns a solved
model into a typed ``ScheduleSolution``.

Model files are written with symbolic labels, so a variable
``el_x_st[AWE1,3]`` appears as ``el_x_st(AWE1_3)`` in the LP text.
"""

import os
import time
from pathlib import Path

import highspy
import numpy as np
import pyomo.environ as pyo
from pyomo.opt import TerminationCondition

from p2hsched.config.constants import BINARY_TOLERANCE
from p2hsched.config.settings import get_settings
from p2hsched.core.protocols import SolverBackendProtocol
from p2hsched.exceptions.errors import (
    ContractViolationError,
    IntegralityError,
    SolutionParseError,
    SolverNotFoundError,
)
from p2hsched.models.scenario import SchedulingMode
from p2hsched.models.run_config import SolverConfig
from p2hsched.models.solution import (
    HourSchedule,
    ObjectiveBreakdown,
    ScheduleSolution,
    SolveResult,
    SolveStatus,
    UnitSchedule,
    UnitState,
)
from p2hsched.models.units import Technology
from p2hsched.services.milp_model import ModelInstance
from p2hsched.services.production_fit import hydrogen_curve
from p2hsched.services.security_compiler import compute_dp_dis, system_damping
from p2hsched.utils.logging_config import logger

MODEL_FORMATS = ("lp", "mps")

# Option names per pyomo plugin for time limit, relative gap and threads.
BACKEND_OPTIONS: dict[str, dict[str, str]] = {
    "appsi_highs": {"time_limit": "time_limit", "gap": "mip_rel_gap", "threads": "threads"},
    "highs": {"time_limit": "time_limit", "gap": "mip_rel_gap", "threads": "threads"},
    "cbc": {"time_limit": "sec", "gap": "ratioGap", "threads": "threads"},
    "glpk": {"time_limit": "tmlim", "gap": "mipgap"},
}

FEASIBLE_STOPS = (
    TerminationCondition.maxTimeLimit,
    TerminationCondition.maxIterations,
    TerminationCondition.maxEvaluations,
    TerminationCondition.userInterrupt,
)


def write_model(instance: ModelInstance, path: str | Path, fmt: str | None = None) -> Path:
    """
    Write a model file in LP or MPS format.

    The format is taken from ``fmt`` or the file suffix. Variable and row
    order follow component construction order, so identical scenarios give
    byte-identical files.

    Returns
    -------
    Path
        The written file.
    """
    path = Path(path)
    fmt = (fmt or path.suffix.lstrip(".") or "lp").lower()
    if fmt not in MODEL_FORMATS:
        raise ContractViolationError(f"Unsupported model format {fmt!r}; expected one of {MODEL_FORMATS}.")
    path.parent.mkdir(parents=True, exist_ok=True)
    instance.model.write(str(path), format=fmt, io_options={"symbolic_solver_labels": True})
    logger.debug("Wrote %s model to %s", fmt.upper(), path)
    return path


def read_model_counts(path: str | Path) -> tuple[int, int, int]:
    """
    Parse a model file with HiGHS and return (rows, columns, nonzeros).

    Raises
    ------
    SolutionParseError
        If HiGHS cannot read the file.
    """
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    status = h.readModel(str(path))
    if status == highspy.HighsStatus.kError:
        raise SolutionParseError(str(path), "HiGHS could not parse the model file")
    lp = h.getLp()
    return int(lp.num_row_), int(lp.num_col_), len(lp.a_matrix_.value_)


def _solver(config: SolverConfig) -> SolverBackendProtocol:
    solver = pyo.SolverFactory(config.backend)
    if solver is None or not solver.available(exception_flag=False):
        raise SolverNotFoundError(config.backend, os.environ.get("PATH", ""))
    return solver


def _options(config: SolverConfig) -> dict[str, float | int]:
    names = BACKEND_OPTIONS.get(config.backend, {})
    values = {"time_limit": config.time_limit, "gap": config.gap, "threads": config.threads}
    return {names[key]: value for key, value in values.items() if key in names}


def _map_status(condition: TerminationCondition, has_solution: bool) -> SolveStatus:  # noqa: FBT001
    if condition == TerminationCondition.optimal:
        return SolveStatus.OPTIMAL
    if condition in FEASIBLE_STOPS:
        return SolveStatus.FEASIBLE if has_solution else SolveStatus.TIMEOUT
    if condition in (TerminationCondition.infeasible, TerminationCondition.infeasibleOrUnbounded):
        return SolveStatus.INFEASIBLE
    if condition == TerminationCondition.unbounded:
        return SolveStatus.UNBOUNDED
    if condition == TerminationCondition.feasible:
        return SolveStatus.FEASIBLE
    return SolveStatus.ERROR


def _relative_gap(lower: float | None, upper: float | None, objective: float | None) -> float | None:
    bounds = (lower, upper, objective)
    if any(value is None or not np.isfinite(value) for value in bounds):
        return None
    return abs(upper - lower) / max(abs(objective), 1e-10)


def solve(
    instance: ModelInstance,
    config: SolverConfig | None = None,
    *,
    backend: SolverBackendProtocol | None = None,
) -> SolveResult:
    """
    Solve a built model.

    Parameters
    ----------
    instance : ModelInstance
        Model from ``milp_model.build``.
    config : SolverConfig, optional
        Backend and limits; defaults come from ``get_settings()``.
    backend : SolverBackendProtocol, optional
        Solver plugin to use instead of the one named by ``config.backend``.

    Returns
    -------
    SolveResult
        Normalized outcome. A run stopped by the time limit with an incumbent
        reports ``feasible``.

    Raises
    ------
    SolverNotFoundError
        If the backend plugin or its executable is unavailable.
    """
    if config is None:
        settings = get_settings()
        config = SolverConfig(
            backend=settings.SOLVER,
            time_limit=settings.TIME_LIMIT,
            gap=settings.MIP_GAP,
            threads=settings.THREADS,
        )
    solver = backend if backend is not None else _solver(config)
    model = instance.model

    started = time.perf_counter()
    results = solver.solve(model, load_solutions=False, options=_options(config))
    runtime = time.perf_counter() - started

    has_solution = len(results.solution) > 0
    status = _map_status(results.solver.termination_condition, has_solution)
    objective = None
    values: dict[str, float] = {}
    unset: list[str] = []
    gap = None
    if status.has_solution:
        model.solutions.load_from(results)
        objective = float(pyo.value(model.objective))
        for var in model.component_data_objects(pyo.Var, descend_into=True):
            if var.value is None:
                unset.append(var.name)
            else:
                values[var.name] = float(var.value)
        if unset:
            logger.debug("%d variables have no value after the solve: %s", len(unset), _preview(unset))
        gap = _relative_gap(results.problem.lower_bound, results.problem.upper_bound, objective)

    logger.info(
        "Solved %s with %s: %s, objective=%s, gap=%s, %.2f s",
        instance.scenario.name,
        config.backend,
        status.value,
        objective,
        gap,
        runtime,
    )
    return SolveResult(
        status=status,
        objective=objective,
        values=values,
        gap=gap,
        runtime=runtime,
        solver_id=config.backend,
        unset=tuple(unset),
    )


def _preview(names: list[str], limit: int = 5) -> str:
    shown = ", ".join(names[:limit])
    return shown if len(names) <= limit else f"{shown}, ..."


def load_values(instance: ModelInstance, result: SolveResult) -> None:
    """
    Set the model's variables from a result, snapping binaries.

    Variables the result has no value for keep their current value, or 0 when
    they have none; the defaulted names are logged at debug level.

    Raises
    ------
    IntegralityError
        If a binary lies more than ``BINARY_TOLERANCE`` from 0 or 1.
    """
    defaulted = []
    for var in instance.model.component_data_objects(pyo.Var, descend_into=True):
        value = result.values.get(var.name)
        if value is None:
            if var.value is None:
                defaulted.append(var.name)
                value = 0.0
            else:
                value = var.value
        if var.is_binary():
            snapped = round(value)
            if abs(value - snapped) > BINARY_TOLERANCE:
                raise IntegralityError(var.name, value)
            value = float(snapped)
        var.set_value(value, skip_validation=True)
    if defaulted:
        logger.debug("%d variables without a value were set to 0: %s", len(defaulted), _preview(defaulted))


def _value(component: object) -> float:
    return float(pyo.value(component))


def _state(st: float, sb: float) -> UnitState:
    if st > 0.5:  # noqa: PLR2004
        return UnitState.ON
    if sb > 0.5:  # noqa: PLR2004
        return UnitState.STANDBY
    return UnitState.OFF


def _electrolyzer_schedules(instance: ModelInstance, t: int) -> list[UnitSchedule]:
    m = instance.model
    schedules = []
    for unit in instance.scenario.electrolyzers:
        key = (unit.id, t)
        state = _state(_value(m.el_x_st[key]), _value(m.el_x_sb[key]))
        current = _value(m.el_i[key])
        temperature = _value(m.el_temp[key])
        true_rate = (
            float(hydrogen_curve(unit, np.array([current]), temperature)[0])
            if state is UnitState.ON
            else 0.0
        )
        schedules.append(
            UnitSchedule(
                unit_id=unit.id,
                kind="el",
                state=state,
                power=_value(m.el_p[key]),
                current=current,
                temperature=temperature,
                hydrogen=_value(m.el_q[key]),
                hydrogen_true=true_rate,
                r_pfr=_value(m.el_r_pfr[key]),
                r_up=_value(m.el_r_up[key]),
                r_dn=_value(m.el_r_dn[key]),
                r_vi=_value(m.el_r_vi[key]),
            )
        )
    return schedules


def _hour_schedule(instance: ModelInstance, t: int, dp_dis: float) -> HourSchedule:
    m = instance.model
    scenario = instance.scenario
    f_n = scenario.frequency.f_n
    units = _electrolyzer_schedules(instance, t)
    for unit in scenario.afgs:
        on = _value(m.afg_x[unit.id, t]) > 0.5  # noqa: PLR2004
        units.append(
            UnitSchedule(
                unit_id=unit.id,
                kind="afg",
                state=UnitState.ON if on else UnitState.OFF,
                power=_value(m.afg_p[unit.id, t]),
                fuel=_value(m.afg_q[unit.id, t]),
                r_pfr=_value(m.afg_r_pfr[unit.id, t]),
                r_up=_value(m.afg_r_up[unit.id, t]),
                r_dn=_value(m.afg_r_dn[unit.id, t]),
            )
        )
    for unit in scenario.wts:
        units.append(
            UnitSchedule(
                unit_id=unit.id,
                kind="wt",
                state=UnitState.ON,
                power=_value(m.wt_p[unit.id, t]),
                r_pfr=_value(m.wt_r_pfr[unit.id, t]),
                deload=_value(m.wt_k[unit.id, t]),
            )
        )
    units.extend(
        UnitSchedule(unit_id=unit.id, kind="pv", state=UnitState.ON, power=_value(m.pv_p[unit.id, t]))
        for unit in scenario.pvs
    )
    for unit in scenario.bess:
        charge = _value(m.bes_p_c[unit.id, t])
        discharge = _value(m.bes_p_d[unit.id, t])
        units.append(
            UnitSchedule(
                unit_id=unit.id,
                kind="bes",
                state=UnitState.ON,
                power=discharge - charge,
                r_pfr=_value(m.bes_r_pfr[unit.id, t]),
                r_up=_value(m.bes_r_up[unit.id, t]),
                r_dn=_value(m.bes_r_dn[unit.id, t]),
                charge=charge,
                discharge=discharge,
                soc=_value(m.bes_e[unit.id, t]),
            )
        )

    by_id = {schedule.unit_id: schedule for schedule in units}
    inertia = sum(unit.h_b for unit in scenario.bess) + sum(
        unit.inertia(f_n) for unit in scenario.afgs if by_id[unit.id].state is UnitState.ON
    )
    if scenario.mode is not SchedulingMode.CM2:
        inertia += sum(
            unit.h_virtual
            for unit in scenario.electrolyzers
            if unit.tech is Technology.PEMEL and by_id[unit.id].state is UnitState.ON
        )
    afg_damping = sum(unit.d_g for unit in scenario.afgs if by_id[unit.id].state is UnitState.ON)

    delta = None
    security = getattr(m, "security", None)
    if security is not None and hasattr(security[t], "delta"):
        delta = int(round(_value(security[t].delta)))
    alpha = {}
    if hasattr(m, "alpha"):
        alpha = {f"{c}:{s}": _value(m.alpha[c, hour, s]) for c, hour, s in m.alpha if hour == t}

    return HourSchedule(
        hour=t,
        dp_dis=dp_dis,
        inertia=inertia,
        damping=system_damping(scenario, t),
        afg_damping=afg_damping,
        delta=delta,
        units=tuple(units),
        alpha=alpha,
    )


def extract_schedule(result: SolveResult, instance: ModelInstance) -> ScheduleSolution:
    """
    Turn a solved model into a typed schedule.

    Binaries are snapped within ``BINARY_TOLERANCE``. The objective breakdown
    is re-accumulated from the snapped values and checked against the solver
    objective. The true hydrogen rate at the solved current and temperature
    is recorded next to the piecewise bound.

    Raises
    ------
    ContractViolationError
        If the result carries no primal solution.
    IntegralityError
        If a binary is not integral within tolerance.
    """
    if not result.status.has_solution:
        msg = f"Cannot extract a schedule from a {result.status.value} result."
        raise ContractViolationError(msg)
    scenario = instance.scenario
    load_values(instance, result)
    m = instance.model

    objective = ObjectiveBreakdown(c_ps=_value(m.c_ps), c_op=_value(m.c_op), c_res=_value(m.c_res))
    if result.objective is not None:
        mismatch = abs(objective.c_net - result.objective)
        if mismatch > 1e-6 * max(1.0, abs(result.objective)):
            logger.warning(
                "Objective breakdown %.6f differs from solver objective %.6f",
                objective.c_net,
                result.objective,
            )

    if instance.envelopes:
        disturbances = {hour: envelope.dp_dis for hour, envelope in instance.envelopes.items()}
    else:
        disturbances = dict(enumerate(compute_dp_dis(scenario).tolist()))
    hours = tuple(_hour_schedule(instance, t, float(disturbances[t])) for t in scenario.hours)

    gaps = [
        unit.hydrogen - unit.hydrogen_true
        for hour in hours
        for unit in hour.units
        if unit.kind == "el" and unit.state is UnitState.ON
    ]
    if gaps:
        logger.info("Hydrogen bound exceeds the true rate by at most %.4g kg/h", max(gaps))

    freq = scenario.frequency
    return ScheduleSolution(
        scenario_name=scenario.name,
        mode=scenario.mode,
        dt_h=scenario.dt_h,
        frequency=freq,
        delivery_times={"t_b": freq.t_b, "t_e": freq.t_e, "t_w": freq.t_w, "t_g": freq.t_g},
        hours=hours,
        objective=objective,
        solve=result.summary(),
        envelopes=tuple(instance.envelopes[hour] for hour in sorted(instance.envelopes)),
        drcc_audit=tuple(block.audit() for block in instance.drcc_blocks),
    )
