"""Run Configuration Model."""

from dataclasses import dataclass
from pathlib import Path

from p2hsched.exceptions.errors import ContractViolationError
from p2hsched.models.scenario import SchedulingMode


@dataclass(frozen=True)
class SolverConfig:
    """Backend selection and limits for one solve."""

    backend: str = "appsi_highs"
    time_limit: float = 1800.0
    gap: float = 0.01
    threads: int = 1


@dataclass(frozen=True)
class RunConfig:
    """
    Options of one command-line scheduling run.

    Exactly one of ``scenario_path`` and ``preset`` must be given.
    """

    output_dir: Path
    scenario_path: Path | None = None
    preset: str | None = None
    mode: SchedulingMode | None = None
    solver: SolverConfig = SolverConfig()
    fixed_point: bool = False
    seed: int = 0
    use_cache: bool = True

    def __post_init__(self) -> None:
        """Check that exactly one scenario source is set and the output is writable."""
        if (self.scenario_path is None) == (self.preset is None):
            msg = "Exactly one of a scenario path and a preset name is required."
            raise ContractViolationError(msg)
        if self.output_dir.exists() and not self.output_dir.is_dir():
            msg = f"Output path {self.output_dir} is not a directory."
            raise ContractViolationError(msg)
