"""Protocol Definitions for Solver Backends."""

from typing import Any, Protocol, runtime_checkable


@runtime_checkable
class SolverResultsProtocol(Protocol):
    """Solver results as returned by a pyomo solver plugin."""

    @property
    def solver(self) -> Any:
        """Solver status block, with ``termination_condition``."""

    @property
    def problem(self) -> Any:
        """Problem block, with ``lower_bound`` and ``upper_bound``."""

    @property
    def solution(self) -> Any:
        """Sized container of returned solutions."""


@runtime_checkable
class SolverBackendProtocol(Protocol):
    """MILP solver plugin for dependency injection."""

    def available(self, exception_flag: bool = True) -> bool:  # noqa: FBT001, FBT002
        """Whether the solver can be used."""

    def solve(self, model: Any, **kwargs: Any) -> SolverResultsProtocol:
        """Solve a model, returning the raw results."""
