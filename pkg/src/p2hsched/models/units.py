"""
Unit Models.

Frozen parameter records for every frequency-regulation resource of an
off-grid power-to-hydrogen system: electrolyzers, ammonia-fueled generators,
wind turbines, PV plants, battery storage and the downstream load. Each record
exposes ``issues()`` listing violated invariants so that a scenario loader can
report every problem at once.
"""

from dataclasses import dataclass
from enum import Enum


class Technology(str, Enum):
    """Electrolyzer technology."""

    AWE = "AWE"
    PEMEL = "PEMEL"


@dataclass(frozen=True)
class PowerFit:
    """Affine stack-power fit ``a1·I + a2·T + a3`` (MW, with I in kA and T in °C)."""

    a1: float
    a2: float
    a3: float
    max_error: float = 0.0

    def evaluate(self, current: float, temp: float) -> float:
        """Return the fitted stack power."""
        return self.a1 * current + self.a2 * temp + self.a3


@dataclass(frozen=True)
class HydrogenFit:
    """Concave piecewise-linear upper bound ``q ≤ A_k·I + B_k·x_st`` (kg/h)."""

    slopes: tuple[float, ...]
    intercepts: tuple[float, ...]
    max_gap: float = 0.0

    def evaluate(self, current: float) -> float:
        """Return the tightest bound at the given current for a running unit."""
        return min(a * current + b for a, b in zip(self.slopes, self.intercepts, strict=True))


@dataclass(frozen=True)
class ElectrolyzerUnit:
    """Alkaline or PEM electrolyzer with electrochemical, EDL, thermal and cost data."""

    id: str
    tech: Technology
    n_c: int
    area: float
    v_re: float
    v_tn: float
    r_ohm: float
    r_edl1: float
    r_edl2: float
    c_edl: float
    i_min: float
    i_max: float
    t_min: float
    t_max: float
    c_heat: float
    a_cool: float
    t_cool: float
    eta_cool: float
    k_pump: float
    p_sb: float
    p_min: float
    p_max: float
    h_virtual: float = 0.0
    r_pfr_lim: float = 0.0
    r_up_lim: float = 0.0
    r_dn_lim: float = 0.0
    cost_h2: float = 0.0
    cost_up_cold: float = 0.0
    cost_down: float = 0.0
    cost_sb: float = 0.0
    v_act: float = 0.0
    v_temp_coeff: float = 0.0
    power_fit: PowerFit | None = None
    h2_fit: HydrogenFit | None = None
    bus: str = ""
    allow_standby: bool = True
    initial_state: str = "off"
    initial_temp: float | None = None

    @property
    def theta(self) -> float:
        """EDL time constant (s)."""
        return (self.r_edl1 + self.r_edl2) * self.c_edl

    def issues(self) -> list[str]:
        """Return the violated invariants of this unit."""
        found = []
        if not 0 < self.i_min < self.i_max:
            found.append(f"{self.id}: current limits must satisfy 0 < i_min < i_max")
        if not self.t_min < self.t_max:
            found.append(f"{self.id}: temperature limits must satisfy t_min < t_max")
        if not self.p_min >= self.p_sb >= 0:
            found.append(f"{self.id}: power limits must satisfy p_min >= p_sb >= 0")
        if not self.p_max > self.p_min:
            found.append(f"{self.id}: p_max must exceed p_min")
        if self.tech is Technology.AWE and self.h_virtual != 0:
            found.append(f"{self.id}: AWE units carry no virtual inertia")
        if self.theta <= 0:
            found.append(f"{self.id}: EDL time constant must be positive")
        if self.n_c <= 0 or self.area <= 0:
            found.append(f"{self.id}: cell count and area must be positive")
        if self.initial_state not in ("on", "standby", "off"):
            found.append(f"{self.id}: initial_state must be on, standby or off")
        return found


@dataclass(frozen=True)
class AfgUnit:
    """Ammonia-fueled synchronous generator."""

    id: str
    h_g: float
    d_g: float
    p_min: float
    p_max: float
    ramp_up: float
    ramp_dn: float
    t_on: int
    t_off: int
    r_pfr_lim: float
    r_up_lim: float
    r_dn_lim: float
    eta_comb: float
    eta_steam: float
    lhv_nh3: float
    cost_nh3: float
    cost_start: float
    cost_reserve: float = 0.0
    bus: str = ""
    initial_on: bool = False

    def inertia(self, f_n: float) -> float:
        """Return the inertia contribution H_g·P̄_g/f_N in MW·s/Hz."""
        return self.h_g * self.p_max / f_n

    def issues(self) -> list[str]:
        """Return the violated invariants of this unit."""
        found = []
        if not (0 < self.eta_comb <= 1 and 0 < self.eta_steam <= 1):
            found.append(f"{self.id}: efficiencies must lie in (0, 1]")
        if not self.p_min < self.p_max:
            found.append(f"{self.id}: p_min must be below p_max")
        if self.t_on < 1 or self.t_off < 1:
            found.append(f"{self.id}: minimum up/down times must be at least 1 h")
        return found


@dataclass(frozen=True)
class RenewableUnit:
    """Forecast-following renewable plant."""

    id: str
    capacity: float
    forecast: tuple[float, ...]
    k_deload_max: float = 0.0
    t_deliver: float = 0.0
    bus: str = ""

    def issues(self) -> list[str]:
        """Return the violated invariants of this unit."""
        found = []
        if not 0 <= self.k_deload_max < 1:
            found.append(f"{self.id}: k_deload_max must lie in [0, 1)")
        found.extend(
            f"{self.id}: forecast hour {hour} = {value} outside [0, {self.capacity}]"
            for hour, value in enumerate(self.forecast)
            if not 0 <= value <= self.capacity
        )
        return found


@dataclass(frozen=True)
class WtUnit(RenewableUnit):
    """Wind turbine able to deload for primary reserve."""

    cost_reserve: float = 0.0
    pin_deload: bool = False


@dataclass(frozen=True)
class PvUnit(RenewableUnit):
    """PV plant; forecast-following, no reserve role."""


@dataclass(frozen=True)
class BesUnit:
    """Grid-forming battery energy storage."""

    id: str
    h_b: float
    d_b: float
    p_lim: float
    e_min: float
    e_max: float
    e_init: float
    eta_c: float
    eta_d: float
    self_discharge: float
    t_deliver: float
    cost_reserve: float = 0.0
    bus: str = ""

    def issues(self) -> list[str]:
        """Return the violated invariants of this unit."""
        found = []
        if not (0 < self.eta_c <= 1 and 0 < self.eta_d <= 1):
            found.append(f"{self.id}: efficiencies must lie in (0, 1]")
        if not self.e_min < self.e_max:
            found.append(f"{self.id}: e_min must be below e_max")
        if not self.e_min <= self.e_init <= self.e_max:
            found.append(f"{self.id}: e_init must lie within [e_min, e_max]")
        if not 0 <= self.self_discharge < 1:
            found.append(f"{self.id}: self-discharge must lie in [0, 1)")
        return found


@dataclass(frozen=True)
class DownstreamLoad:
    """Frequency-dependent downstream (chemical plant) load."""

    p_d: tuple[float, ...]
    d_d: float
    bus_shares: tuple[tuple[str, float], ...] = ()

    def damping(self, hour: int) -> float:
        """Return the load damping D_d·P_d in MW/Hz."""
        return self.d_d * self.p_d[hour]

    def issues(self) -> list[str]:
        """Return the violated invariants of the load."""
        found = [f"load: hour {hour} is negative" for hour, p in enumerate(self.p_d) if p < 0]
        if self.d_d < 0:
            found.append("load: d_d must be nonnegative")
        if self.bus_shares and abs(sum(share for _, share in self.bus_shares) - 1) > 1e-9:
            found.append("load: bus shares must sum to one")
        return found


@dataclass(frozen=True)
class HydrogenPlant:
    """A group of electrolyzers sharing one compressor."""

    id: str
    electrolyzers: tuple[str, ...]
    bus: str
    q_lim: float
    k_comp: float
