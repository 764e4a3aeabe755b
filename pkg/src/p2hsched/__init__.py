"""
p2hsched: frequency-secure scheduling of off-grid power-to-hydrogen systems.

This package compiles post-contingency frequency limits into linear security
rows, builds the day-ahead unit-commitment model of electrolyzers, ammonia
generators, renewables and storage, solves it with an open-source MILP
backend and verifies the schedule by simulating every hour.
"""

from p2hsched.config.constants import NOMINAL_FREQUENCY, SCHEMA_VERSION
from p2hsched.factory import PRESETS, build_preset
from p2hsched.models.frequency import FrequencyCase, FrequencyTrajectory, PfrRamp
from p2hsched.models.run_config import RunConfig, SolverConfig
from p2hsched.models.scenario import SchedulingMode, SystemScenario
from p2hsched.models.solution import ScheduleSolution, VerificationReport
from p2hsched.services.freq_dynamics import simulate
from p2hsched.services.milp_model import build
from p2hsched.services.pipeline import schedule
from p2hsched.services.scenario import export, load, load_solution, preset
from p2hsched.services.security_compiler import compile_envelopes
from p2hsched.services.solver_io import extract_schedule, solve
from p2hsched.services.verification import verify
from p2hsched.utils.helpers import get_run_storage

__all__ = [
    "NOMINAL_FREQUENCY",
    "PRESETS",
    "SCHEMA_VERSION",
    "FrequencyCase",
    "FrequencyTrajectory",
    "PfrRamp",
    "RunConfig",
    "ScheduleSolution",
    "SchedulingMode",
    "SolverConfig",
    "SystemScenario",
    "VerificationReport",
    "build",
    "build_preset",
    "compile_envelopes",
    "export",
    "extract_schedule",
    "get_run_storage",
    "load",
    "load_solution",
    "preset",
    "schedule",
    "simulate",
    "solve",
    "verify",
]
