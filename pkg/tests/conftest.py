"""Shared pytest fixtures for p2hsched tests."""

import logging
from types import SimpleNamespace

import pytest

from p2hsched.config.settings import get_settings
from p2hsched.models.frequency import FrequencyCase
from p2hsched.utils.logging_config import logger


@pytest.fixture(autouse=True)
def reset_logging():
    """Restore the package logger after a test installed console handlers.

    Yields
    ------
    None
        Control to the test.
    """
    yield
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()
    logger.propagate = True
    logger.setLevel(logging.INFO)


@pytest.fixture(autouse=True)
def reset_settings(monkeypatch, tmp_path):
    """Isolate the cached settings and point the solution cache at a temporary directory.

    Parameters
    ----------
    monkeypatch : pytest.MonkeyPatch
        Pytest monkeypatch fixture
    tmp_path : Path
        Per-test temporary directory

    Yields
    ------
    None
        Control to the test.
    """
    monkeypatch.setenv("P2HSCHED_CACHE_PATH", str(tmp_path / "cache"))
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


# Scenario Fixtures
@pytest.fixture(scope="session")
def toy_scenario():
    """Toy preset: one AWE and one AFG over six hours.

    Returns
    -------
    SystemScenario
        Validated toy scenario
    """
    from p2hsched.services.scenario import preset

    return preset("toy")


@pytest.fixture(scope="session")
def base_scenario():
    """Base-system preset with seed 0.

    Returns
    -------
    SystemScenario
        Validated base scenario
    """
    from p2hsched.services.scenario import preset

    return preset("base_system")


@pytest.fixture(scope="session")
def awe_unit(toy_scenario):
    """Calibrated and fitted AWE of the toy preset.

    Returns
    -------
    ElectrolyzerUnit
        Alkaline electrolyzer
    """
    return toy_scenario.electrolyzers[0]


@pytest.fixture(scope="session")
def pemel_unit():
    """Calibrated and fitted PEMEL.

    Returns
    -------
    ElectrolyzerUnit
        PEM electrolyzer
    """
    from p2hsched.factory import electrolyzers
    from p2hsched.models.units import Technology

    return electrolyzers(Technology.PEMEL, 1, prefix="PEMEL", bus="b0")[0]


@pytest.fixture(scope="session")
def afg_unit(toy_scenario):
    """Small AFG of the toy preset.

    Returns
    -------
    AfgUnit
        Ammonia-fueled generator
    """
    return toy_scenario.afgs[0]


# Frequency Fixtures
def consistent_case(  # noqa: PLR0913
    h_agg: float,
    d_agg: float,
    dp_dis: float,
    stage1_rate: float,
    stage2_rate: float,
    total_pfr: float,
    db1: float = 0.05,
    t_db2: float = 20.0,
) -> FrequencyCase:
    """Return a case whose first deadband time matches the free response from rest."""
    from p2hsched.services.freq_dynamics import deadband_crossing_time

    free = FrequencyCase(h_agg, d_agg, dp_dis, db1, 0.2, 0.0, t_db2, 0.0, 0.0, 0.0)
    return FrequencyCase(
        h_agg=h_agg,
        d_agg=d_agg,
        dp_dis=dp_dis,
        db1=db1,
        db2=0.2,
        t_db1=deadband_crossing_time(free),
        t_db2=t_db2,
        stage1_rate=stage1_rate,
        stage2_rate=stage2_rate,
        total_pfr=total_pfr,
    )


@pytest.fixture
def frequency_case():
    """Stage-1 case with H=7.5, D=1.2, R1=0.8, dP=9 and db1=0.05.

    The nadir falls well inside stage 1 and no reserve saturates before t_db2.

    Returns
    -------
    FrequencyCase
        Deadband-consistent case
    """
    return consistent_case(7.5, 1.2, 9.0, 0.8, 1.2, 40.0)


# Solver Fixtures
@pytest.fixture
def highs():
    """Skip the test unless the HiGHS pyomo plugin is usable.

    Returns
    -------
    str
        Solver plugin name
    """
    pytest.importorskip("highspy")
    import pyomo.environ as pyo

    if not pyo.SolverFactory("appsi_highs").available(exception_flag=False):
        pytest.skip("appsi_highs is not available")
    return "appsi_highs"


class FakeBackend:
    """Solver plugin returning a fixed termination without a solution."""

    def __init__(self, condition):
        self.condition = condition
        self.calls = []

    def available(self, exception_flag=True):  # noqa: FBT002
        return True

    def solve(self, model, **kwargs):
        self.calls.append(kwargs)
        return SimpleNamespace(
            solver=SimpleNamespace(termination_condition=self.condition),
            problem=SimpleNamespace(lower_bound=None, upper_bound=None),
            solution=[],
        )


@pytest.fixture
def fake_backend():
    """Return the recording stand-in for a pyomo solver plugin.

    Returns
    -------
    type[FakeBackend]
        Class taking the termination condition to report
    """
    return FakeBackend


# Storage Fixtures
@pytest.fixture
def run_storage(tmp_path):
    """Create an isolated CSV run directory.

    Parameters
    ----------
    tmp_path : Path
        Per-test temporary directory

    Returns
    -------
    CSVRunStorage
        Storage rooted at ``tmp_path / "run"``
    """
    from p2hsched.storage.csv_storage import CSVRunStorage

    return CSVRunStorage(tmp_path / "run")


@pytest.fixture
def make_case():
    """Return the builder of deadband-consistent frequency cases.

    Returns
    -------
    Callable[..., FrequencyCase]
        ``consistent_case``
    """
    return consistent_case


# Solution Fixtures
@pytest.fixture
def hand_solution():
    """Two-hour schedule of the toy fleet, built without a solver.

    Hour 0 runs the AWE and the AFG; hour 1 runs the AFG alone.

    Returns
    -------
    ScheduleSolution
        Unverified schedule
    """
    from p2hsched.models.scenario import FrequencyConfig, SchedulingMode
    from p2hsched.models.solution import (
        HourSchedule,
        ObjectiveBreakdown,
        ScheduleSolution,
        SolveStatus,
        SolveSummary,
        UnitSchedule,
        UnitState,
    )

    awe_on = UnitSchedule(
        unit_id="AWE1",
        kind="el",
        state=UnitState.ON,
        power=2.0,
        current=4.0,
        temperature=70.0,
        hydrogen=400.0,
        hydrogen_true=395.0,
        r_pfr=0.3,
    )
    awe_off = UnitSchedule(unit_id="AWE1", kind="el", state=UnitState.OFF)
    afg = UnitSchedule(
        unit_id="AFG1", kind="afg", state=UnitState.ON, power=1.0, fuel=0.05, r_pfr=0.7
    )
    hours = (
        HourSchedule(0, 0.25, 0.36, 0.4, 0.0, None, (awe_on, afg)),
        HourSchedule(1, 0.25, 0.36, 0.4, 0.0, None, (awe_off, afg)),
    )
    freq = FrequencyConfig()
    return ScheduleSolution(
        scenario_name="hand",
        mode=SchedulingMode.PM,
        dt_h=1.0,
        frequency=freq,
        delivery_times={"t_b": freq.t_b, "t_e": freq.t_e, "t_w": freq.t_w, "t_g": freq.t_g},
        hours=hours,
        objective=ObjectiveBreakdown(c_ps=100.0, c_op=30.0, c_res=5.0),
        solve=SolveSummary(
            status=SolveStatus.OPTIMAL, objective=65.0, gap=0.0, runtime=0.1, solver_id="hand"
        ),
    )
