"""
Scenario Models.

``SystemScenario`` is the single input document of a scheduling run: the unit
fleet, network, forecasts, forecast-error samples, frequency limits,
contingency definition, chance-constraint settings and the benchmark mode.
"""

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from p2hsched.config import constants
from p2hsched.models.network import NetworkModel
from p2hsched.models.units import (
    AfgUnit,
    BesUnit,
    DownstreamLoad,
    ElectrolyzerUnit,
    HydrogenPlant,
    PvUnit,
    Technology,
    WtUnit,
)


class SchedulingMode(str, Enum):
    """Benchmark switch: no security rows, no hydrogen-plant support, or the full model."""

    CM1 = "CM1"
    CM2 = "CM2"
    PM = "PM"


class LoadBasis(str, Enum):
    """Load the contingency step is a fraction of."""

    DOWNSTREAM = "downstream"
    TOTAL = "total"


@dataclass(frozen=True, eq=False)
class SampleSet:
    """
    Empirical forecast errors of one chance-constraint source.

    ``samples`` has shape (periods, n) for a scalar source or (periods, n, dim)
    for a joint one, in MW and positive when the actual output exceeds the
    forecast. ``theta`` is the Wasserstein radius (MW) and ``rho`` the
    violation probability bound.
    """

    source: str
    samples: np.ndarray
    theta: float
    rho: float

    @property
    def n(self) -> int:
        """Number of samples per period."""
        return int(self.samples.shape[1])

    @property
    def periods(self) -> int:
        """Number of periods covered."""
        return int(self.samples.shape[0])

    @property
    def dim(self) -> int:
        """Number of error coordinates per sample."""
        return 1 if self.samples.ndim == 2 else int(self.samples.shape[2])  # noqa: PLR2004

    def points(self, hour: int) -> np.ndarray:
        """Return the samples of one period as an (n, dim) array."""
        block = self.samples[hour]
        return block.reshape(-1, 1) if block.ndim == 1 else block

    def issues(self) -> list[str]:
        """Return the violated invariants of the set."""
        found = []
        if self.samples.ndim not in (2, 3) or self.samples.shape[1] < 1:
            found.append(f"samples[{self.source}]: need a (periods, n >= 1[, dim]) array")
            return found
        if self.theta < 0:
            found.append(f"samples[{self.source}]: theta must be nonnegative")
        if not 0 < self.rho <= 1:
            found.append(f"samples[{self.source}]: rho must lie in (0, 1]")
        if not np.isfinite(self.samples).all():
            found.append(f"samples[{self.source}]: non-finite entries")
        return found


@dataclass(frozen=True)
class FrequencyConfig:
    """Nominal frequency, limits, deadbands and primary-reserve delivery times."""

    f_n: float = constants.NOMINAL_FREQUENCY
    nadir_lim: float = constants.NADIR_LIMIT
    rocof_lim: float = constants.ROCOF_LIMIT
    qss_lim: float = constants.QSS_LIMIT
    db1: float = constants.DEADBAND_STAGE1
    db2: float = constants.DEADBAND_STAGE2
    t_db1: float = constants.TIME_DEADBAND_STAGE1
    t_db2: float = constants.TIME_DEADBAND_STAGE2
    t_b: float = constants.DELIVERY_TIME_BES
    t_e: float = constants.DELIVERY_TIME_AWE
    t_w: float = constants.DELIVERY_TIME_WT
    t_g: float = constants.DELIVERY_TIME_AFG
    afg_damping: bool = False
    continuous_ramps: bool = False

    def issues(self) -> list[str]:
        """Return the violated orderings of the configuration."""
        found = []
        if not self.t_e > self.t_b > self.t_db2 - self.t_db1:
            found.append("frequency: delivery times must satisfy t_e > t_b > t_db2 - t_db1")
        if not self.t_g > self.t_w:
            found.append("frequency: delivery times must satisfy t_g > t_w")
        if not 0 <= self.t_db1 < self.t_db2:
            found.append("frequency: deadband times must satisfy 0 <= t_db1 < t_db2")
        if not 0 <= self.db1 < self.db2 < self.nadir_lim:
            found.append("frequency: deadbands must satisfy 0 <= db1 < db2 < nadir_lim")
        if min(self.rocof_lim, self.qss_lim, self.f_n) <= 0:
            found.append("frequency: limits and nominal frequency must be positive")
        return found


@dataclass(frozen=True)
class ContingencyConfig:
    """
    Load-step contingency definition.

    The step is ``load_step_fraction`` of the total load (downstream plus
    electrolyzers) unless the basis is narrowed to the downstream load.
    """

    load_step_fraction: float = constants.LOAD_STEP_FRACTION
    basis: LoadBasis = LoadBasis.TOTAL


@dataclass(frozen=True)
class PriceConfig:
    """Hydrogen price as published, with an optional override (CNY/kg)."""

    hydrogen_price: float = constants.PRICE_TABLE["cost_h2"]
    hydrogen_price_unit: str = constants.PRICE_TABLE["cost_h2_unit"]
    hydrogen_price_override: float | None = None

    @property
    def effective_hydrogen_price(self) -> float:
        """Hydrogen price applied per kg."""
        if self.hydrogen_price_override is not None:
            return self.hydrogen_price_override
        return self.hydrogen_price


@dataclass(frozen=True)
class SystemScenario:
    """Complete scheduling input."""

    name: str
    periods: int
    network: NetworkModel
    load: DownstreamLoad
    electrolyzers: tuple[ElectrolyzerUnit, ...] = ()
    plants: tuple[HydrogenPlant, ...] = ()
    afgs: tuple[AfgUnit, ...] = ()
    wts: tuple[WtUnit, ...] = ()
    pvs: tuple[PvUnit, ...] = ()
    bess: tuple[BesUnit, ...] = ()
    samples: dict[str, SampleSet] = field(default_factory=dict)
    frequency: FrequencyConfig = field(default_factory=FrequencyConfig)
    contingency: ContingencyConfig = field(default_factory=ContingencyConfig)
    prices: PriceConfig = field(default_factory=PriceConfig)
    mode: SchedulingMode = SchedulingMode.PM
    dt_h: float = constants.PERIOD_HOURS
    reserve_duration_h: float = constants.RESERVE_DURATION_HOURS
    base_mva: float = constants.PER_UNIT_BASE_MVA
    seed: int = 0

    @property
    def hours(self) -> range:
        """Period indices."""
        return range(self.periods)

    @property
    def awes(self) -> tuple[ElectrolyzerUnit, ...]:
        """Alkaline electrolyzers."""
        return tuple(e for e in self.electrolyzers if e.tech is Technology.AWE)

    @property
    def pemels(self) -> tuple[ElectrolyzerUnit, ...]:
        """PEM electrolyzers."""
        return tuple(e for e in self.electrolyzers if e.tech is Technology.PEMEL)

    @property
    def unit_count(self) -> int:
        """Number of schedulable units."""
        return sum(
            len(fleet)
            for fleet in (self.electrolyzers, self.afgs, self.wts, self.pvs, self.bess)
        )

    @property
    def forecasts(self) -> dict[str, tuple[float, ...]]:
        """Per-unit renewable forecasts (MW)."""
        return {unit.id: unit.forecast for unit in (*self.wts, *self.pvs)}

    def wind_forecast(self, hour: int) -> float:
        """Total wind forecast of an hour (MW)."""
        return sum(unit.forecast[hour] for unit in self.wts)

    def solar_forecast(self, hour: int) -> float:
        """Total PV forecast of an hour (MW)."""
        return sum(unit.forecast[hour] for unit in self.pvs)

    def hydrogen_price(self, unit: ElectrolyzerUnit) -> float:
        """Hydrogen price applied to a unit (CNY/kg)."""
        if self.prices.hydrogen_price_override is not None:
            return self.prices.hydrogen_price_override
        return unit.cost_h2

    def with_mode(self, mode: SchedulingMode | str) -> "SystemScenario":
        """Return the scenario under another benchmark mode."""
        return replace(self, mode=SchedulingMode(mode))

    def with_changes(self, **changes: object) -> "SystemScenario":
        """Return a copy with the given fields replaced."""
        return replace(self, **changes)
