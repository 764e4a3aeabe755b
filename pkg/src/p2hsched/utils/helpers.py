"""p2hsched helper functions: storage selection and plot-ready report tables."""

from pathlib import Path

import numpy as np
import pandas as pd

from p2hsched.config.constants import (
    FREQUENCY_METRICS_COLUMNS,
    H2_PER_NH3,
    OBJECTIVE_REPORT_COLUMNS,
    RESERVE_REPORT_COLUMNS,
    UNIT_SCHEDULE_COLUMNS,
    YIELD_REPORT_COLUMNS,
)
from p2hsched.exceptions.errors import UnsupportedStorageError
from p2hsched.models.solution import ScheduleSolution
from p2hsched.services.device_models import SECONDS_PER_HOUR
from p2hsched.storage.base_storage import BaseRunStorage
from p2hsched.storage.csv_storage import CSVRunStorage

RESERVE_CLASSES = ("el", "bes", "afg", "wt")


def get_run_storage(storage_type: str, run_dir: Path | None = None) -> BaseRunStorage:
    """Return the storage manager of a run directory."""
    if "csv" in storage_type.lower():
        return CSVRunStorage(Path(run_dir) if run_dir is not None else Path("p2hsched-run"))
    raise UnsupportedStorageError(storage_type)


def unit_schedule_frame(solution: ScheduleSolution) -> pd.DataFrame:
    """Return one row per (hour, unit) with states, setpoints and reserves."""
    rows = [
        (
            hour.hour,
            unit.unit_id,
            unit.kind,
            unit.state.value,
            unit.power,
            unit.current,
            unit.temperature,
            unit.hydrogen,
            unit.r_pfr,
            unit.r_up,
            unit.r_dn,
            unit.r_vi,
            unit.deload,
        )
        for hour in solution.hours
        for unit in hour.units
    ]
    return pd.DataFrame(rows, columns=list(UNIT_SCHEDULE_COLUMNS))


def frequency_metrics_frame(solution: ScheduleSolution) -> pd.DataFrame:
    """Return hourly frequency-response inputs and, when verified, the simulated metrics."""
    checks = {}
    if solution.verification is not None:
        checks = {check.hour: check for check in solution.verification.hours}
    rows = []
    for hour in solution.hours:
        check = checks.get(hour.hour)
        rows.append(
            (
                hour.hour,
                hour.dp_dis,
                hour.inertia,
                hour.damping,
                check.nadir if check else np.nan,
                check.nadir_time if check else np.nan,
                check.rocof if check else np.nan,
                check.qss if check else np.nan,
                check.passed if check else None,
            )
        )
    return pd.DataFrame(rows, columns=list(FREQUENCY_METRICS_COLUMNS))


def reserve_allocation_frame(solution: ScheduleSolution) -> pd.DataFrame:
    """Return each resource class's primary reserve and its share of the hour's total."""
    rows = []
    for hour in solution.hours:
        by_class = {name: 0.0 for name in RESERVE_CLASSES}
        for unit in hour.units:
            if unit.kind in by_class:
                by_class[unit.kind] += unit.r_pfr
        total = sum(by_class.values())
        rows.extend(
            (hour.hour, name, reserve, reserve / total if total > 0 else 0.0)
            for name, reserve in by_class.items()
        )
    return pd.DataFrame(rows, columns=list(RESERVE_REPORT_COLUMNS))


def objective_frame(solution: ScheduleSolution) -> pd.DataFrame:
    """Return the objective components and net profit (CNY)."""
    objective = solution.objective
    rows = [
        ("c_ps", objective.c_ps),
        ("c_op", objective.c_op),
        ("c_res", objective.c_res),
        ("c_net", objective.c_net),
    ]
    return pd.DataFrame(rows, columns=list(OBJECTIVE_REPORT_COLUMNS))


def hydrogen_yield_frame(solution: ScheduleSolution) -> pd.DataFrame:
    """Return hourly hydrogen production, ammonia burned and the net hydrogen balance (kg)."""
    rows = []
    for hour in solution.hours:
        hydrogen = sum(unit.hydrogen for unit in hour.units if unit.kind == "el") * solution.dt_h
        ammonia = (
            sum(unit.fuel for unit in hour.units if unit.kind == "afg")
            * SECONDS_PER_HOUR
            * solution.dt_h
        )
        rows.append((hour.hour, hydrogen, ammonia, hydrogen - H2_PER_NH3 * ammonia))
    return pd.DataFrame(rows, columns=list(YIELD_REPORT_COLUMNS))
