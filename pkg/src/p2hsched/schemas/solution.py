"""JSON adapters of the solution tree, envelopes and chance-constraint audit."""

from pydantic import TypeAdapter

from p2hsched.models.envelope import JSON_CONFIG, SecurityEnvelope
from p2hsched.models.solution import DrccAudit, ScheduleSolution, VerificationReport

__all__ = [
    "JSON_CONFIG",
    "dump_drcc_audit",
    "dump_envelopes",
    "dump_report",
    "dump_solution",
    "parse_envelopes",
    "parse_report",
    "parse_solution",
]

# The dataclasses carry JSON_CONFIG themselves; pydantic rejects a second one here.
SOLUTION_ADAPTER = TypeAdapter(ScheduleSolution)
ENVELOPES_ADAPTER = TypeAdapter(tuple[SecurityEnvelope, ...])
DRCC_AUDIT_ADAPTER = TypeAdapter(tuple[DrccAudit, ...])
REPORT_ADAPTER = TypeAdapter(VerificationReport)


def dump_solution(solution: ScheduleSolution) -> bytes:
    """Serialize a solution to indented JSON."""
    return SOLUTION_ADAPTER.dump_json(solution, indent=2)


def parse_solution(document: str | bytes) -> ScheduleSolution:
    """Rebuild a solution from its JSON document."""
    return SOLUTION_ADAPTER.validate_json(document)


def dump_envelopes(envelopes: tuple[SecurityEnvelope, ...]) -> bytes:
    """Serialize compiled envelopes to indented JSON."""
    return ENVELOPES_ADAPTER.dump_json(envelopes, indent=2)


def parse_envelopes(document: str | bytes) -> tuple[SecurityEnvelope, ...]:
    """Rebuild compiled envelopes from JSON."""
    return ENVELOPES_ADAPTER.validate_json(document)


def dump_drcc_audit(audit: tuple[DrccAudit, ...]) -> bytes:
    """Serialize a chance-constraint audit to indented JSON."""
    return DRCC_AUDIT_ADAPTER.dump_json(audit, indent=2)


def dump_report(report: VerificationReport) -> bytes:
    """Serialize a verification report to indented JSON."""
    return REPORT_ADAPTER.dump_json(report, indent=2)


def parse_report(document: str | bytes) -> VerificationReport:
    """Rebuild a verification report from JSON."""
    return REPORT_ADAPTER.validate_json(document)
