# ruff: noqa: T201

"""
CLI module for p2hsched.

Batch commands to simulate an hour's frequency response, compile security
envelopes, schedule a scenario, verify a solved schedule and write report
tables. Exit codes: 0 success, 1 verification failure or no schedule, 2 input
error, 3 solver or environment error.
"""

import argparse
import logging
import sys
from collections.abc import Callable
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

from p2hsched.config.constants import FREQUENCY_METRICS_FILE, TRAJECTORY_FILE
from p2hsched.config.settings import get_settings
from p2hsched.exceptions.errors import (
    ContractViolationError,
    DomainError,
    InfeasibleSecurityError,
    NetworkTopologyError,
    ResolutionError,
    ScenarioValidationError,
    SolutionParseError,
    SolverNotFoundError,
    UnknownPresetError,
    UnsupportedRegimeError,
)
from p2hsched.factory import PRESETS
from p2hsched.models.frequency import FrequencyCase
from p2hsched.models.run_config import RunConfig, SolverConfig
from p2hsched.models.scenario import FrequencyConfig, SchedulingMode, SystemScenario
from p2hsched.models.solution import SolveStatus
from p2hsched.services import pipeline
from p2hsched.services import scenario as scenario_service
from p2hsched.services.verification import capability_case, simulate_case, simulate_hour, verify
from p2hsched.utils.helpers import frequency_metrics_frame, get_run_storage
from p2hsched.utils.logging_config import enable_file_logging, init_console_logging

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_INPUT = 2
EXIT_BACKEND = 3

INPUT_ERRORS = (
    ScenarioValidationError,
    DomainError,
    UnknownPresetError,
    SolutionParseError,
    ContractViolationError,
    NetworkTopologyError,
    InfeasibleSecurityError,
    UnsupportedRegimeError,
    ResolutionError,
    FileNotFoundError,
    ValueError,
)

try:
    p2hsched_version = version("p2hsched")
except PackageNotFoundError:
    p2hsched_version = "unknown"


def _add_source(parser: argparse.ArgumentParser, *, required: bool = True) -> None:
    source = parser.add_mutually_exclusive_group(required=required)
    source.add_argument("--scenario", type=Path, help="Scenario JSON document")
    source.add_argument("--preset", choices=PRESETS, help="Shipped preset name")
    parser.add_argument("--seed", type=int, default=0, help="Seed of preset synthetic data (default: 0)")
    parser.add_argument(
        "--mode",
        choices=[mode.value for mode in SchedulingMode],
        help="Benchmark mode override",
    )


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser of the command-line interface."""
    parser = argparse.ArgumentParser(description="Frequency-secure power-to-hydrogen scheduling")
    parser.add_argument("--version", action="version", version=f"p2hsched v{p2hsched_version}")
    parser.add_argument(
        "-log",
        "--log-level",
        default=None,
        help="Set log level (e.g., debug, info, warning, error); default from P2HSCHED_LOG_LEVEL",
    )
    parser.add_argument("--log-file", type=Path, help="Also append log records to this file")
    subparsers = parser.add_subparsers(dest="command", required=True, help="Available commands")

    simulate_parser = subparsers.add_parser("simulate", help="Simulate one post-contingency response")
    _add_source(simulate_parser, required=False)
    simulate_parser.add_argument("--hour", type=int, default=0, help="Hour of the scenario (default: 0)")
    simulate_parser.add_argument("--solution", type=Path, help="Use the scheduled hour of a solution")
    case_group = simulate_parser.add_argument_group("Case Parameters")
    case_group.add_argument("--h-agg", type=float, help="Aggregate inertia (MW·s/Hz)")
    case_group.add_argument("--d-agg", type=float, default=0.0, help="Aggregate damping (MW/Hz)")
    case_group.add_argument("--dp-dis", type=float, default=0.0, help="Disturbance (MW)")
    case_group.add_argument("--r1", type=float, default=0.0, help="Stage-1 reserve rate (MW/s)")
    case_group.add_argument("--r2", type=float, default=0.0, help="Stage-2 reserve rate (MW/s)")
    case_group.add_argument("--total-pfr", type=float, default=0.0, help="Total primary reserve (MW)")
    simulate_parser.add_argument("--out", type=Path, default=Path("."), help="Output directory")

    compile_parser = subparsers.add_parser("compile", help="Compile hourly security envelopes")
    _add_source(compile_parser)
    compile_parser.add_argument("--out", type=Path, required=True, help="Run directory")

    schedule_parser = subparsers.add_parser("schedule", help="Solve, verify and export a schedule")
    _add_source(schedule_parser)
    schedule_parser.add_argument("--out", type=Path, required=True, help="Run directory")
    schedule_parser.add_argument("--solver", help="Pyomo solver plugin (default from settings)")
    schedule_parser.add_argument("--time-limit", type=float, help="Time limit per solve (s)")
    schedule_parser.add_argument("--gap", type=float, help="Relative MIP gap")
    schedule_parser.add_argument("--threads", type=int, help="Solver threads")
    schedule_parser.add_argument(
        "--fixed-point",
        action="store_true",
        help="Iterate the disturbance on the scheduled load",
    )
    schedule_parser.add_argument("--no-cache", action="store_true", help="Skip the solution cache")

    verify_parser = subparsers.add_parser("verify", help="Verify a solved schedule")
    verify_parser.add_argument("--solution", type=Path, required=True, help="Solution JSON or run directory")
    verify_parser.add_argument("--out", type=Path, help="Output directory (default: the solution's)")

    report_parser = subparsers.add_parser("report", help="Write report tables of a solved schedule")
    report_parser.add_argument("--solution", type=Path, required=True, help="Solution JSON or run directory")
    report_parser.add_argument("--out", type=Path, help="Output directory (default: the solution's)")
    return parser


def _solution_dir(path: Path, out: Path | None) -> Path:
    if out is not None:
        return out
    return path if path.is_dir() else path.parent


def _scenario(args: argparse.Namespace) -> SystemScenario:
    if args.preset is not None:
        scenario = scenario_service.preset(args.preset, seed=args.seed)
    else:
        scenario = scenario_service.load(args.scenario)
    return scenario.with_mode(args.mode) if args.mode else scenario


def cmd_simulate(args: argparse.Namespace) -> int:
    """Simulate a case, a scenario hour or a scheduled hour and print its metrics."""
    if args.solution is not None:
        solution = scenario_service.load_solution(args.solution)
        hours = {hour.hour: hour for hour in solution.hours}
        if args.hour not in hours:
            raise DomainError("hour", args.hour, f"one of the solution's {len(hours)} hours")
        trajectory = simulate_hour(solution, hours[args.hour])
    elif args.scenario is not None or args.preset is not None:
        scenario = _scenario(args)
        if args.hour not in scenario.hours:
            raise DomainError("hour", args.hour, f"[0, {scenario.periods})")
        trajectory = simulate_case(
            capability_case(scenario, args.hour),
            continuous_ramps=scenario.frequency.continuous_ramps,
        )
    else:
        if args.h_agg is None:
            raise DomainError("h_agg", None, "given with --h-agg, or a scenario source")
        freq = FrequencyConfig()
        case = FrequencyCase(
            h_agg=args.h_agg,
            d_agg=args.d_agg,
            dp_dis=args.dp_dis,
            db1=freq.db1,
            db2=freq.db2,
            t_db1=freq.t_db1,
            t_db2=freq.t_db2,
            stage1_rate=args.r1,
            stage2_rate=args.r1 + args.r2,
            total_pfr=args.total_pfr,
            f_n=freq.f_n,
        )
        trajectory = simulate_case(case)

    args.out.mkdir(parents=True, exist_ok=True)
    path = args.out / TRAJECTORY_FILE
    trajectory.to_frame().to_csv(path, index=False, lineterminator="\n")
    print(f"Nadir: {trajectory.nadir_value:.4f} Hz at {trajectory.nadir_time:.3f} s")
    print(f"Max RoCoF: {trajectory.max_rocof:.4f} Hz/s")
    print(f"QSS: {trajectory.qss:.4f} Hz")
    print(f"Trajectory: {path}")
    return EXIT_OK


def cmd_compile(args: argparse.Namespace) -> int:
    """Write the per-hour envelope audit without solving."""
    scenario = _scenario(args)
    envelopes = pipeline.compile_only(scenario, get_run_storage("csv", args.out))
    for hour in sorted(envelopes):
        envelope = envelopes[hour]
        print(
            f"Hour {hour:2d}: dP={envelope.dp_dis:.3f} MW, H>={envelope.inertia_floor:.3f}, "
            f"R>={envelope.qss_reserve_floor:.3f} MW, stage1={envelope.stage1_status.value}, "
            f"stage2={envelope.stage2_status.value}"
        )
    return EXIT_OK


def cmd_schedule(args: argparse.Namespace) -> int:
    """Schedule a scenario into a run directory and print the objective breakdown."""
    settings = get_settings()
    config = RunConfig(
        output_dir=args.out,
        scenario_path=args.scenario,
        preset=args.preset,
        mode=SchedulingMode(args.mode) if args.mode else None,
        solver=SolverConfig(
            backend=args.solver or settings.SOLVER,
            time_limit=args.time_limit if args.time_limit is not None else settings.TIME_LIMIT,
            gap=args.gap if args.gap is not None else settings.MIP_GAP,
            threads=args.threads if args.threads is not None else settings.THREADS,
        ),
        fixed_point=args.fixed_point,
        seed=args.seed,
        use_cache=not args.no_cache,
    )
    outcome = pipeline.run(config)
    print(f"Status: {outcome.result.status.value}")
    if outcome.solution is None:
        return EXIT_BACKEND if outcome.result.status is SolveStatus.ERROR else EXIT_VERIFICATION
    objective = outcome.solution.objective
    print(f"Production profit (c_ps): {objective.c_ps:.2f} CNY")
    print(f"Generator cost (c_op): {objective.c_op:.2f} CNY")
    print(f"Reserve cost (c_res): {objective.c_res:.2f} CNY")
    print(f"Net profit (c_net): {objective.c_net:.2f} CNY")
    report = outcome.solution.verification
    print(f"Verified hours: {sum(hour.passed for hour in report.hours)} of {len(report.hours)}")
    print(f"Run directory: {args.out}")
    if outcome.solution.mode is SchedulingMode.PM and not report.passed:
        return EXIT_VERIFICATION
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    """Verify a solution and write the frequency metrics; fail if a PM-mode hour fails."""
    solution = scenario_service.load_solution(args.solution)
    report = verify(solution)
    solution = solution.with_verification(report)
    storage = get_run_storage("csv", _solution_dir(args.solution, args.out))
    storage.write_frame(FREQUENCY_METRICS_FILE, frequency_metrics_frame(solution))
    for hour in report.hours:
        flag = "pass" if hour.passed else "FAIL"
        print(
            f"Hour {hour.hour:2d}: nadir={hour.nadir:.4f} Hz, RoCoF={hour.rocof:.4f} Hz/s, "
            f"QSS={hour.qss:.4f} Hz [{flag}]"
        )
    if solution.mode is SchedulingMode.PM and not report.passed:
        return EXIT_VERIFICATION
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    """Write the reserve, objective and yield tables of a solution."""
    solution = scenario_service.load_solution(args.solution)
    files = scenario_service.export_report(solution, _solution_dir(args.solution, args.out))
    for path in files.values():
        print(path)
    return EXIT_OK


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "simulate": cmd_simulate,
    "compile": cmd_compile,
    "schedule": cmd_schedule,
    "verify": cmd_verify,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    """Parse arguments, run a command and return its exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    log_level = args.log_level or get_settings().LOG_LEVEL
    if not isinstance(getattr(logging, log_level.upper(), None), int):
        print(f"Invalid log level: {log_level}")
        return EXIT_INPUT
    init_console_logging(log_level.upper())
    if args.log_file is not None:
        enable_file_logging(args.log_file, log_level.upper())

    try:
        return COMMANDS[args.command](args)
    except INPUT_ERRORS as error:
        print(getattr(error, "message", str(error)))
        return EXIT_INPUT
    except SolverNotFoundError as error:
        print(error.message)
        return EXIT_BACKEND


def run_cli() -> None:
    """Run the command-line interface for p2hsched."""
    sys.exit(main())


if __name__ == "__main__":
    run_cli()
