"""
Scenario Service.

Loads and validates scenario documents (JSON with sidecar CSVs), saves
scenarios back to that format, resolves named presets, and exports or
re-imports solved schedules as a run directory of JSON documents and CSV
tables.
"""

from dataclasses import replace
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from p2hsched.config.constants import (
    DRCC_AUDIT_FILE,
    ENVELOPES_FILE,
    FREQUENCY_METRICS_FILE,
    OBJECTIVE_REPORT_FILE,
    RESERVE_REPORT_FILE,
    SCHEMA_VERSION,
    SOLUTION_FILE,
    TRAJECTORY_HOUR_FILE,
    UNIT_SCHEDULE_FILE,
    YIELD_REPORT_FILE,
)
from p2hsched.exceptions.errors import ScenarioValidationError, UnverifiedSolutionError
from p2hsched.models.network import NetworkModel
from p2hsched.models.scenario import SampleSet, SystemScenario
from p2hsched.models.solution import ScheduleSolution
from p2hsched.models.units import DownstreamLoad
from p2hsched.parsers.series_parser import parse_forecasts, parse_samples, samples_frame
from p2hsched.schemas.scenario import (
    LoadDocument,
    NetworkDocument,
    SampleDocument,
    ScenarioDocument,
)
from p2hsched.schemas.solution import dump_drcc_audit, dump_envelopes, dump_solution, parse_solution
from p2hsched.services.drcc import JOINT_COORDINATES, JOINT_SOURCE, WIND_SOURCE
from p2hsched.services.verification import simulate_hour
from p2hsched.storage.base_storage import BaseRunStorage
from p2hsched.utils.helpers import (
    frequency_metrics_frame,
    get_run_storage,
    hydrogen_yield_frame,
    objective_frame,
    reserve_allocation_frame,
    unit_schedule_frame,
)
from p2hsched.utils.logging_config import logger

SAMPLE_FILE = "samples_{source}.csv"


def _sample_coordinates(source: str, dim: int) -> tuple[str, ...]:
    if source == JOINT_SOURCE and dim == len(JOINT_COORDINATES):
        return JOINT_COORDINATES
    if dim == 1:
        return (source,)
    return tuple(f"{source}_{j}" for j in range(dim))


def _unit_issues(scenario: SystemScenario) -> list[str]:
    units = (*scenario.electrolyzers, *scenario.afgs, *scenario.wts, *scenario.pvs, *scenario.bess)
    issues = [issue for unit in units for issue in unit.issues()]
    seen: set[str] = set()
    for unit in units:
        if unit.id in seen:
            issues.append(f"{unit.id}: duplicate unit identifier")
        seen.add(unit.id)

    buses = set(scenario.network.bus_ids)
    issues.extend(
        f"{unit.id}: attached to unknown bus {unit.bus!r}"
        for unit in units
        if unit.bus and unit.bus not in buses
    )
    electrolyzers = {unit.id for unit in scenario.electrolyzers}
    assigned: set[str] = set()
    for plant in scenario.plants:
        if plant.bus and plant.bus not in buses:
            issues.append(f"{plant.id}: attached to unknown bus {plant.bus!r}")
        for member in plant.electrolyzers:
            if member not in electrolyzers:
                issues.append(f"{plant.id}: unknown electrolyzer {member!r}")
            elif member in assigned:
                issues.append(f"{plant.id}: electrolyzer {member!r} belongs to two plants")
            assigned.add(member)
    return issues


def _series_issues(scenario: SystemScenario) -> list[str]:
    issues = []
    periods = scenario.periods
    for source, series in (("load", scenario.load.p_d), *scenario.forecasts.items()):
        if len(series) < periods:
            issues.append(f"{source}: forecast missing hour {len(series)} of {periods}")
    buses = set(scenario.network.bus_ids)
    issues.extend(
        f"load: share at unknown bus {bus!r}" for bus, _ in scenario.load.bus_shares if bus not in buses
    )
    for source, sample_set in scenario.samples.items():
        found = sample_set.issues()
        issues.extend(found)
        if found:
            continue
        if sample_set.periods < periods:
            issues.append(f"samples[{source}]: missing hour {sample_set.periods} of {periods}")
        if source == WIND_SOURCE and sample_set.dim != 1:
            issues.append(f"samples[{source}]: wind errors are scalar per sample")
        if source == JOINT_SOURCE and sample_set.dim != len(JOINT_COORDINATES):
            issues.append(f"samples[{source}]: joint errors need coordinates {JOINT_COORDINATES}")
    return issues


def scenario_issues(scenario: SystemScenario) -> list[str]:
    """Return every violated invariant of a scenario."""
    issues = [*scenario.frequency.issues(), *scenario.network.issues(), *scenario.load.issues()]
    issues.extend(_unit_issues(scenario))
    issues.extend(_series_issues(scenario))
    if scenario.periods < 0:
        issues.append("scenario: periods must be nonnegative")
    if not 0 <= scenario.contingency.load_step_fraction <= 1:
        issues.append("contingency: load_step_fraction must lie in [0, 1]")
    return issues


def validate(scenario: SystemScenario) -> SystemScenario:
    """
    Return the scenario if it is valid.

    Raises
    ------
    ScenarioValidationError
        With every violated invariant, never a partial list.
    """
    issues = scenario_issues(scenario)
    if issues:
        raise ScenarioValidationError(issues)
    return scenario


def _sample_set(source: str, document: SampleDocument, base: Path) -> SampleSet:
    if document.csv is not None:
        samples = parse_samples(base / document.csv)
    elif document.values is not None:
        samples = np.asarray(document.values, dtype=float)
    else:
        raise ScenarioValidationError([f"samples[{source}]: give either csv or values"])
    return SampleSet(source=source, samples=samples, theta=document.theta, rho=document.rho)


def from_document(document: ScenarioDocument, base: Path) -> SystemScenario:
    """Build a scenario from a parsed document; sidecar paths are relative to ``base``."""
    wts, pvs = document.wts, document.pvs
    if document.forecasts_csv is not None:
        series = parse_forecasts(base / document.forecasts_csv)
        wts = [replace(unit, forecast=series.get(unit.id, unit.forecast)) for unit in wts]
        pvs = [replace(unit, forecast=series.get(unit.id, unit.forecast)) for unit in pvs]
    return SystemScenario(
        name=document.name,
        periods=document.periods,
        network=NetworkModel(
            buses=tuple(document.network.buses),
            branches=tuple(document.network.branches),
            root=document.network.root,
        ),
        load=DownstreamLoad(
            p_d=tuple(document.load.p_d),
            d_d=document.load.d_d,
            bus_shares=tuple(document.load.bus_shares.items()),
        ),
        electrolyzers=tuple(document.electrolyzers),
        plants=tuple(document.plants),
        afgs=tuple(document.afgs),
        wts=tuple(wts),
        pvs=tuple(pvs),
        bess=tuple(document.bess),
        samples={
            source: _sample_set(source, sample, base) for source, sample in document.samples.items()
        },
        frequency=document.frequency,
        contingency=document.contingency,
        prices=document.prices,
        mode=document.mode,
        dt_h=document.dt_h,
        reserve_duration_h=document.reserve_duration_h,
        base_mva=document.base_mva,
        seed=document.seed,
    )


def load(path: str | Path) -> SystemScenario:
    """
    Load and validate a scenario document.

    Raises
    ------
    ScenarioValidationError
        If the document is malformed, a sidecar file is missing or the
        scenario violates any invariant.
    """
    path = Path(path)
    if not path.exists():
        raise ScenarioValidationError([f"{path}: file not found"])
    try:
        document = ScenarioDocument.model_validate_json(path.read_bytes())
    except ValidationError as e:
        raise ScenarioValidationError(
            [f"{'.'.join(str(p) for p in error['loc'])}: {error['msg']}" for error in e.errors()]
        ) from e
    if document.schema_version.split(".")[0] != SCHEMA_VERSION.split(".")[0]:
        raise ScenarioValidationError(
            [f"schema_version {document.schema_version} is not compatible with {SCHEMA_VERSION}"]
        )
    scenario = validate(from_document(document, path.parent))
    logger.info("Loaded scenario %s (%d periods, %d units)", scenario.name, scenario.periods, scenario.unit_count)
    return scenario


def save(scenario: SystemScenario, path: str | Path) -> Path:
    """Write a scenario document with one sidecar CSV per sample set."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    samples = {}
    for source, sample_set in scenario.samples.items():
        name = SAMPLE_FILE.format(source=source)
        coordinates = _sample_coordinates(source, sample_set.dim)
        samples_frame(sample_set.samples, coordinates).to_csv(
            path.parent / name, index=False, lineterminator="\n"
        )
        samples[source] = SampleDocument(theta=sample_set.theta, rho=sample_set.rho, csv=name)
    document = ScenarioDocument(
        name=scenario.name,
        periods=scenario.periods,
        dt_h=scenario.dt_h,
        mode=scenario.mode,
        seed=scenario.seed,
        reserve_duration_h=scenario.reserve_duration_h,
        base_mva=scenario.base_mva,
        network=NetworkDocument(
            root=scenario.network.root,
            buses=list(scenario.network.buses),
            branches=list(scenario.network.branches),
        ),
        load=LoadDocument(
            p_d=list(scenario.load.p_d),
            d_d=scenario.load.d_d,
            bus_shares=dict(scenario.load.bus_shares),
        ),
        electrolyzers=list(scenario.electrolyzers),
        plants=list(scenario.plants),
        afgs=list(scenario.afgs),
        wts=list(scenario.wts),
        pvs=list(scenario.pvs),
        bess=list(scenario.bess),
        samples=samples,
        frequency=scenario.frequency,
        contingency=scenario.contingency,
        prices=scenario.prices,
    )
    path.write_text(document.model_dump_json(indent=2) + "\n")
    return path


def preset(name: str, *, seed: int = 0) -> SystemScenario:
    """Return a validated named preset (see ``p2hsched.factory``)."""
    from p2hsched.factory import build_preset  # noqa: PLC0415

    return validate(build_preset(name, seed=seed))


def _storage(out_dir: str | Path | BaseRunStorage) -> BaseRunStorage:
    if isinstance(out_dir, BaseRunStorage):
        return out_dir
    return get_run_storage("csv", Path(out_dir))


def export(
    solution: ScheduleSolution,
    out_dir: str | Path | BaseRunStorage,
    *,
    allow_unverified: bool = False,
    trajectory_hours: tuple[int, ...] = (),
) -> dict[str, Path]:
    """
    Write a solution as a run directory.

    Writes the JSON solution, envelopes and chance-constraint audit, the unit
    schedule and frequency-metric CSVs, and trajectory CSVs for failing hours
    plus any hours in ``trajectory_hours``.

    Raises
    ------
    UnverifiedSolutionError
        If the solution has no verification report and ``allow_unverified``
        is not set.
    """
    if not solution.is_verified and not allow_unverified:
        raise UnverifiedSolutionError
    storage = _storage(out_dir)
    written = {
        SOLUTION_FILE: storage.write_bytes(SOLUTION_FILE, dump_solution(solution)),
        ENVELOPES_FILE: storage.write_bytes(ENVELOPES_FILE, dump_envelopes(solution.envelopes)),
        DRCC_AUDIT_FILE: storage.write_bytes(DRCC_AUDIT_FILE, dump_drcc_audit(solution.drcc_audit)),
        UNIT_SCHEDULE_FILE: storage.write_frame(UNIT_SCHEDULE_FILE, unit_schedule_frame(solution)),
        FREQUENCY_METRICS_FILE: storage.write_frame(
            FREQUENCY_METRICS_FILE, frequency_metrics_frame(solution)
        ),
    }
    flagged = set(trajectory_hours)
    if solution.verification is not None:
        flagged.update(check.hour for check in solution.verification.failures())
    by_hour = {hour.hour: hour for hour in solution.hours}
    for hour in sorted(flagged):
        schedule = by_hour.get(hour)
        if schedule is None or schedule.dp_dis <= 0 or schedule.inertia <= 0:
            continue
        name = TRAJECTORY_HOUR_FILE.format(hour=hour)
        written[name] = storage.write_frame(name, simulate_hour(solution, schedule).to_frame())
    logger.info("Exported %s: %d files", solution.scenario_name, len(written))
    return written


def export_report(solution: ScheduleSolution, out_dir: str | Path | BaseRunStorage) -> dict[str, Path]:
    """Write the reserve-allocation, objective and hydrogen-yield tables."""
    storage = _storage(out_dir)
    return {
        RESERVE_REPORT_FILE: storage.write_frame(RESERVE_REPORT_FILE, reserve_allocation_frame(solution)),
        OBJECTIVE_REPORT_FILE: storage.write_frame(OBJECTIVE_REPORT_FILE, objective_frame(solution)),
        YIELD_REPORT_FILE: storage.write_frame(YIELD_REPORT_FILE, hydrogen_yield_frame(solution)),
    }


def load_solution(path: str | Path) -> ScheduleSolution:
    """Read a solution from its JSON document or from a run directory."""
    path = Path(path)
    if path.is_dir():
        path = path / SOLUTION_FILE
    return parse_solution(path.read_bytes())
