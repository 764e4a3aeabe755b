"""
Solution Models.

Typed schedule produced by ``extract_schedule``: per-hour unit states,
setpoints and reserves, the objective breakdown, compiled envelopes, solver
summary, chance-constraint audit and the frequency verification report. The
whole tree round-trips through JSON via a pydantic ``TypeAdapter``; every
serialized dataclass carries ``JSON_CONFIG`` so non-finite metrics survive.
"""

from dataclasses import dataclass, field, replace
from enum import Enum

from pydantic import with_config

from p2hsched.config.constants import SCHEMA_VERSION
from p2hsched.models.envelope import JSON_CONFIG, SecurityEnvelope
from p2hsched.models.scenario import FrequencyConfig, SchedulingMode


class UnitState(str, Enum):
    """Operating state of a unit in an hour."""

    ON = "on"
    STANDBY = "standby"
    OFF = "off"


class SolveStatus(str, Enum):
    """Normalized solver outcome."""

    OPTIMAL = "optimal"
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    TIMEOUT = "timeout"
    ERROR = "error"

    @property
    def has_solution(self) -> bool:
        """Whether a primal solution is available."""
        return self in (SolveStatus.OPTIMAL, SolveStatus.FEASIBLE)


@with_config(JSON_CONFIG)
@dataclass(frozen=True)
class UnitSchedule:
    """One unit's decisions in one hour. Powers in MW, currents in kA, flows in kg/h."""

    unit_id: str
    kind: str
    state: UnitState
    power: float = 0.0
    current: float = 0.0
    temperature: float = 0.0
    hydrogen: float = 0.0
    hydrogen_true: float = 0.0
    fuel: float = 0.0
    r_pfr: float = 0.0
    r_up: float = 0.0
    r_dn: float = 0.0
    r_vi: float = 0.0
    deload: float = 0.0
    charge: float = 0.0
    discharge: float = 0.0
    soc: float = 0.0


@with_config(JSON_CONFIG)
@dataclass(frozen=True)
class HourSchedule:
    """All unit decisions of one hour plus the hour's frequency-response aggregates."""

    hour: int
    dp_dis: float
    inertia: float
    damping: float
    afg_damping: float
    delta: int | None
    units: tuple[UnitSchedule, ...]
    alpha: dict[str, float] = field(default_factory=dict)

    def unit(self, unit_id: str) -> UnitSchedule:
        """Return a unit's schedule by identifier."""
        for schedule in self.units:
            if schedule.unit_id == unit_id:
                return schedule
        raise KeyError(unit_id)

    def with_unit(self, schedule: UnitSchedule) -> "HourSchedule":
        """Return a copy with one unit's schedule replaced."""
        units = tuple(schedule if u.unit_id == schedule.unit_id else u for u in self.units)
        return replace(self, units=units)


@with_config(JSON_CONFIG)
@dataclass(frozen=True)
class ObjectiveBreakdown:
    """Net profit and its components (CNY)."""

    c_ps: float
    c_op: float
    c_res: float

    @property
    def c_net(self) -> float:
        """Net profit."""
        return self.c_ps - self.c_op - self.c_res


@with_config(JSON_CONFIG)
@dataclass(frozen=True)
class SolveSummary:
    """Solver outcome without the variable values."""

    status: SolveStatus
    objective: float | None
    gap: float | None
    runtime: float
    solver_id: str


@with_config(JSON_CONFIG)
@dataclass(frozen=True)
class DrccAudit:
    """Audit record of one chance-constraint block."""

    block: str
    hour: int
    theta: float
    rho: float
    n: int
    auxiliaries: int
    violation_rate: float


@with_config(JSON_CONFIG)
@dataclass(frozen=True)
class HourVerification:
    """Simulated metrics of one hour against the limits."""

    hour: int
    nadir: float
    nadir_time: float
    rocof: float
    qss: float
    nadir_ok: bool
    rocof_ok: bool
    qss_ok: bool

    @property
    def passed(self) -> bool:
        """Whether all three limits hold."""
        return self.nadir_ok and self.rocof_ok and self.qss_ok


@with_config(JSON_CONFIG)
@dataclass(frozen=True)
class VerificationReport:
    """Per-hour verification of a schedule."""

    mode: SchedulingMode
    tolerance: float
    hours: tuple[HourVerification, ...]

    @property
    def passed(self) -> bool:
        """Whether every hour passes."""
        return all(hour.passed for hour in self.hours)

    def failures(self) -> tuple[HourVerification, ...]:
        """Hours violating at least one limit."""
        return tuple(hour for hour in self.hours if not hour.passed)


@with_config(JSON_CONFIG)
@dataclass(frozen=True)
class ScheduleSolution:
    """Typed, serializable result of a scheduling run."""

    scenario_name: str
    mode: SchedulingMode
    dt_h: float
    frequency: FrequencyConfig
    delivery_times: dict[str, float]
    hours: tuple[HourSchedule, ...]
    objective: ObjectiveBreakdown
    solve: SolveSummary
    envelopes: tuple[SecurityEnvelope, ...] = ()
    drcc_audit: tuple[DrccAudit, ...] = ()
    verification: VerificationReport | None = None
    schema_version: str = SCHEMA_VERSION

    @property
    def is_verified(self) -> bool:
        """Whether a verification report is attached."""
        return self.verification is not None

    def with_verification(self, report: VerificationReport) -> "ScheduleSolution":
        """Return a copy carrying the given verification report."""
        return replace(self, verification=report)

    def with_hours(self, hours: tuple[HourSchedule, ...]) -> "ScheduleSolution":
        """Return a copy with replaced hourly schedules and no verification."""
        return replace(self, hours=hours, verification=None)


@dataclass(frozen=True)
class SolveResult:
    """
    Solver outcome with the variable values.

    ``values`` maps every pyomo variable name (e.g. ``el_x_st[AWE1,3]``) to its
    value; fixed variables are included. ``unset`` names the variables the
    backend returned no value for, typically ones no row or objective uses.
    """

    status: SolveStatus
    objective: float | None
    values: dict[str, float]
    gap: float | None
    runtime: float
    solver_id: str
    unset: tuple[str, ...] = ()

    def summary(self) -> SolveSummary:
        """Return the outcome without the variable values."""
        return SolveSummary(
            status=self.status,
            objective=self.objective,
            gap=self.gap,
            runtime=self.runtime,
            solver_id=self.solver_id,
        )
