"""
Scheduling Pipeline.

Runs a scenario end to end: security compilation, model build, model file,
cached solve, schedule extraction, verification and export. An optional
fixed-point loop recomputes the hourly disturbance from the scheduled load
and re-solves until it settles.
"""

from dataclasses import dataclass, field
from pathlib import Path
from tempfile import TemporaryDirectory

import numpy as np

from p2hsched.config.constants import (
    ENVELOPES_FILE,
    FIXED_POINT_MAX_ITERATIONS,
    FIXED_POINT_TOLERANCE,
    MODEL_FILE,
)
from p2hsched.config.settings import get_settings
from p2hsched.core.protocols import SolverBackendProtocol
from p2hsched.models.envelope import SecurityEnvelope
from p2hsched.models.run_config import RunConfig, SolverConfig
from p2hsched.models.scenario import LoadBasis, SchedulingMode, SystemScenario
from p2hsched.models.solution import ScheduleSolution, SolveResult
from p2hsched.schemas.solution import dump_envelopes
from p2hsched.services import scenario as scenario_service
from p2hsched.services.cache import SolutionCache, cache_key
from p2hsched.services.milp_model import ModelInstance, build
from p2hsched.services.security_compiler import compile_envelopes, compute_dp_dis
from p2hsched.services.solver_io import extract_schedule, solve, write_model
from p2hsched.services.verification import verify
from p2hsched.storage.base_storage import BaseRunStorage
from p2hsched.utils.helpers import get_run_storage
from p2hsched.utils.logging_config import logger


@dataclass
class ScheduleRun:
    """
    Outcome of one scheduling run.

    Attributes
    ----------
    result : SolveResult
        Solver outcome of the last iteration.
    solution : ScheduleSolution | None
        Verified schedule, or None when the solver returned no solution.
    iterations : int
        Number of solves (more than one only with the fixed-point loop).
    cached : bool
        Whether the last result came from the solution cache.
    files : dict[str, Path]
        Written run artefacts.
    """

    result: SolveResult
    solution: ScheduleSolution | None = None
    iterations: int = 1
    cached: bool = False
    files: dict[str, Path] = field(default_factory=dict)


def resolve_scenario(config: RunConfig) -> SystemScenario:
    """Load the scenario or preset of a run and apply its mode override."""
    if config.preset is not None:
        scenario = scenario_service.preset(config.preset, seed=config.seed)
    else:
        scenario = scenario_service.load(config.scenario_path)
    if config.mode is not None:
        scenario = scenario.with_mode(config.mode)
    return scenario


def compile_only(
    scenario: SystemScenario,
    storage: BaseRunStorage | None = None,
) -> dict[int, SecurityEnvelope]:
    """Compile every hour's envelope and optionally write the envelope audit."""
    envelopes = compile_envelopes(scenario)
    if storage is not None:
        storage.write_bytes(ENVELOPES_FILE, dump_envelopes(tuple(envelopes[h] for h in sorted(envelopes))))
    return envelopes


def scheduled_load(solution: ScheduleSolution, scenario: SystemScenario) -> np.ndarray:
    """Return the hourly total load: downstream load plus scheduled electrolyzer power (MW)."""
    load = np.asarray(scenario.load.p_d[: scenario.periods], dtype=float).copy()
    for hour in solution.hours:
        load[hour.hour] += sum(unit.power for unit in hour.units if unit.kind == "el")
    return load


def _solve_cached(
    instance: ModelInstance,
    solver: SolverConfig,
    cache: SolutionCache | None,
    backend: SolverBackendProtocol | None,
) -> tuple[SolveResult, bytes, bool]:
    with TemporaryDirectory() as directory:
        model_text = write_model(instance, Path(directory) / MODEL_FILE).read_bytes()
    key = cache_key(model_text, solver)
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            logger.info("Reusing cached %s result for %s", hit.status.value, instance.scenario.name)
            return hit, model_text, True
    result = solve(instance, solver, backend=backend)
    if cache is not None:
        cache.set(key, result)
    return result, model_text, False


def _converged(previous: np.ndarray, current: np.ndarray) -> bool:
    scale = np.maximum(np.abs(previous), 1e-9)
    return bool(np.all(np.abs(current - previous) / scale < FIXED_POINT_TOLERANCE))


def schedule(  # noqa: PLR0913
    scenario: SystemScenario,
    *,
    solver: SolverConfig | None = None,
    storage: BaseRunStorage | None = None,
    fixed_point: bool = False,
    cache: SolutionCache | None = None,
    backend: SolverBackendProtocol | None = None,
) -> ScheduleRun:
    """
    Schedule a scenario, verify the schedule and export the run.

    Parameters
    ----------
    scenario : SystemScenario
        Validated scenario; its mode selects CM1, CM2 or PM.
    solver : SolverConfig, optional
        Backend and limits; defaults come from the settings.
    storage : BaseRunStorage, optional
        Run directory for the model file, solution and reports.
    fixed_point : bool
        Recompute the disturbance from the scheduled total load and re-solve,
        at most ``FIXED_POINT_MAX_ITERATIONS`` times. Each re-solve caps the
        total load at the basis of its disturbance, so the step never
        understates the schedule. The downstream basis does not depend on
        the schedule and is solved once.
    cache : SolutionCache, optional
        Solution cache consulted before solving.
    backend : SolverBackendProtocol, optional
        Solver plugin overriding ``solver.backend``.

    Returns
    -------
    ScheduleRun
        The last solve and, when it produced one, the verified schedule.
    """
    settings = get_settings()
    if solver is None:
        solver = SolverConfig(
            backend=settings.SOLVER,
            time_limit=settings.TIME_LIMIT,
            gap=settings.MIP_GAP,
            threads=settings.THREADS,
        )
    iterate = fixed_point and scenario.mode is not SchedulingMode.CM1
    if fixed_point and not iterate:
        logger.info("CM1 has no security rows; skipping the disturbance fixed point")
    if iterate and scenario.contingency.basis is not LoadBasis.TOTAL:
        logger.info("Disturbance does not depend on the schedule under the downstream basis")
        iterate = False

    dp_dis = compute_dp_dis(scenario)
    limit = FIXED_POINT_MAX_ITERATIONS if iterate else 1
    outcome: ScheduleRun | None = None
    for iteration in range(1, limit + 1):
        envelopes = None if scenario.mode is SchedulingMode.CM1 else compile_envelopes(scenario, dp_dis)
        instance = build(scenario, envelopes, strict_drcc=settings.STRICT_DRCC)
        result, model_text, cached = _solve_cached(instance, solver, cache, backend)
        outcome = ScheduleRun(result=result, iterations=iteration, cached=cached)
        if storage is not None:
            outcome.files[MODEL_FILE] = storage.write_bytes(MODEL_FILE, model_text)
        if not result.status.has_solution:
            logger.error("No schedule for %s: solver returned %s", scenario.name, result.status.value)
            return outcome
        outcome.solution = extract_schedule(result, instance)
        if not iterate:
            break
        updated = compute_dp_dis(scenario, scheduled_load(outcome.solution, scenario))
        if _converged(dp_dis, updated):
            logger.info("Disturbance fixed point reached after %d solves", iteration)
            break
        dp_dis = updated
    else:
        logger.warning("Disturbance fixed point not reached in %d solves", limit)

    outcome.solution = outcome.solution.with_verification(verify(outcome.solution))
    if storage is not None:
        outcome.files.update(scenario_service.export(outcome.solution, storage))
        outcome.files.update(scenario_service.export_report(outcome.solution, storage))
    return outcome


def run(config: RunConfig, *, backend: SolverBackendProtocol | None = None) -> ScheduleRun:
    """Schedule the scenario of a run configuration into its output directory."""
    scenario = resolve_scenario(config)
    storage = get_run_storage("csv", config.output_dir)
    if config.use_cache:
        with SolutionCache() as cache:
            return schedule(
                scenario,
                solver=config.solver,
                storage=storage,
                fixed_point=config.fixed_point,
                cache=cache,
                backend=backend,
            )
    return schedule(
        scenario,
        solver=config.solver,
        storage=storage,
        fixed_point=config.fixed_point,
        backend=backend,
    )
