"""
p2hsched Exceptions.

Defines custom exception classes for the scheduling engine.
Each exception represents a specific failure case so that callers (and the CLI)
can map failures to structured diagnostics and stable exit codes.
"""

from p2hsched.exceptions.errors import (
    ContractViolationError,
    DomainError,
    EmptyFleetError,
    InfeasibleSecurityError,
    IntegralityError,
    NetworkTopologyError,
    NoStage1NadirError,
    ResolutionError,
    ScenarioValidationError,
    SolutionParseError,
    SolverNotFoundError,
    UnboundedDeviationError,
    UnknownPresetError,
    UnsupportedRegimeError,
    UnsupportedStorageError,
    UnverifiedSolutionError,
)

__all__ = [
    "ContractViolationError",
    "DomainError",
    "EmptyFleetError",
    "InfeasibleSecurityError",
    "IntegralityError",
    "NetworkTopologyError",
    "NoStage1NadirError",
    "ResolutionError",
    "ScenarioValidationError",
    "SolutionParseError",
    "SolverNotFoundError",
    "UnboundedDeviationError",
    "UnknownPresetError",
    "UnsupportedRegimeError",
    "UnsupportedStorageError",
    "UnverifiedSolutionError",
]
