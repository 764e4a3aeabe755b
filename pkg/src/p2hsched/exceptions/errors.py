"""
p2hsched Errors Module.

This module defines custom exception classes for the scheduling engine.
Physical-model, dynamics and security errors come first, followed by input
validation, solver backend and persistence errors.
"""

from collections.abc import Iterable


class DomainError(Exception):
    """Exception raised for when a quantity lies outside its physical domain."""

    def __init__(self, quantity: str, value: float, expected: str) -> None:
        """Initialize the exception."""
        self.quantity = quantity
        self.value = value
        self.message = f"{quantity}={value!r} is outside its domain, expected {expected}."
        super().__init__(self.message)


class ContractViolationError(Exception):
    """Exception raised for when a caller breaks an operation's precondition."""

    def __init__(self, message: str = "Operation contract violated.") -> None:
        """Initialize the exception."""
        self.message = message
        super().__init__(self.message)


class ResolutionError(Exception):
    """Exception raised for when an integration step cannot resolve a response stage."""

    def __init__(self, step: float, stage_width: float) -> None:
        """Initialize the exception."""
        self.message = (
            f"Integration step {step:g} s is not smaller than the stage width {stage_width:g} s."
        )
        super().__init__(self.message)


class NoStage1NadirError(Exception):
    """Exception raised for when no stage-1 reserve rate exists to arrest the deviation."""

    def __init__(self, message: str = "No stage-1 nadir: stage-1 reserve rate is zero.") -> None:
        """Initialize the exception."""
        self.message = message
        super().__init__(self.message)


class UnboundedDeviationError(Exception):
    """Exception raised for when neither damping nor reserves bound the deviation."""

    def __init__(self, dp_dis: float, total_pfr: float) -> None:
        """Initialize the exception."""
        self.message = (
            f"Deviation is unbounded: zero damping and reserves {total_pfr:g} MW "
            f"below the disturbance {dp_dis:g} MW."
        )
        super().__init__(self.message)


class InfeasibleSecurityError(Exception):
    """Exception raised for when an hour's security requirements cannot be met by any schedule."""

    def __init__(self, hour: int, reason: str) -> None:
        """Initialize the exception."""
        self.hour = hour
        self.reason = reason
        self.message = f"Hour {hour}: frequency security is infeasible ({reason})."
        super().__init__(self.message)


class UnsupportedRegimeError(Exception):
    """Exception raised for when a chance constraint falls outside the exact reformulation regime."""

    def __init__(self, rho: float, n_samples: int) -> None:
        """Initialize the exception."""
        self.message = (
            f"Violation probability {rho:g} exceeds 1/N = {1 / n_samples:g} for N={n_samples}."
        )
        super().__init__(self.message)


class ScenarioValidationError(Exception):
    """Exception raised for when a scenario document fails validation."""

    def __init__(self, issues: Iterable[str]) -> None:
        """Initialize the exception."""
        self.issues = list(issues)
        listing = "\n".join(f"  - {issue}" for issue in self.issues)
        self.message = f"Scenario is invalid ({len(self.issues)} issue(s)):\n{listing}"
        super().__init__(self.message)


class EmptyFleetError(Exception):
    """Exception raised for when a scenario has nothing to schedule."""

    def __init__(self, message: str = "Model rejected: no schedulable units.") -> None:
        """Initialize the exception."""
        self.message = message
        super().__init__(self.message)


class NetworkTopologyError(Exception):
    """Exception raised for when a network is not a connected radial tree."""

    def __init__(self, reason: str) -> None:
        """Initialize the exception."""
        self.message = f"Network is not radial: {reason}."
        super().__init__(self.message)


class SolverNotFoundError(Exception):
    """Exception raised for when the configured solver backend is unavailable."""

    def __init__(self, backend: str, search_path: str) -> None:
        """Initialize the exception."""
        self.backend = backend
        self.message = f"Solver backend {backend!r} is not available (searched: {search_path})."
        super().__init__(self.message)


class SolutionParseError(Exception):
    """Exception raised for when a solver or solution file cannot be parsed."""

    def __init__(self, line: str, reason: str = "unexpected content") -> None:
        """Initialize the exception."""
        self.line = line
        self.message = f"Could not parse solution ({reason}): {line!r}"
        super().__init__(self.message)


class IntegralityError(Exception):
    """Exception raised for when a binary variable is not integral within tolerance."""

    def __init__(self, name: str, value: float) -> None:
        """Initialize the exception."""
        self.message = f"Binary variable {name} has non-integral value {value!r}."
        super().__init__(self.message)


class UnverifiedSolutionError(Exception):
    """Exception raised for when a solution is exported as secure without a verification report."""

    def __init__(self, message: str = "Solution has no verification report.") -> None:
        """Initialize the exception."""
        self.message = message
        super().__init__(self.message)


class UnknownPresetError(Exception):
    """Exception raised for when an unknown preset name is requested."""

    def __init__(self, name: str, expected: Iterable[str]) -> None:
        """Initialize the exception."""
        self.message = f"Unknown preset {name!r}, expected one of {sorted(expected)}."
        super().__init__(self.message)


class UnsupportedStorageError(Exception):
    """Exception raised for when an unsupported storage type is requested."""

    def __init__(self, storage_type: str) -> None:
        """Initialize the exception."""
        self.message = f"Unsupported storage type: {storage_type}."
        super().__init__(self.message)
