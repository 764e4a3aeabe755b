"""Pydantic documents of the scenario JSON format."""

from pydantic import BaseModel, ConfigDict, Field

from p2hsched.config.constants import SCHEMA_VERSION
from p2hsched.models.network import Branch, Bus
from p2hsched.models.scenario import (
    ContingencyConfig,
    FrequencyConfig,
    PriceConfig,
    SchedulingMode,
)
from p2hsched.models.units import (
    AfgUnit,
    BesUnit,
    ElectrolyzerUnit,
    HydrogenPlant,
    PvUnit,
    WtUnit,
)


class NetworkDocument(BaseModel):
    """Radial network section."""

    model_config = ConfigDict(extra="forbid")

    root: str = Field(..., description="Root (slack) bus identifier")
    buses: list[Bus] = Field(..., description="Buses with voltage bounds (p.u.)")
    branches: list[Branch] = Field(default_factory=list, description="Parent-to-child branches")


class LoadDocument(BaseModel):
    """Downstream load section."""

    model_config = ConfigDict(extra="forbid")

    p_d: list[float] = Field(..., description="Hourly downstream load (MW)")
    d_d: float = Field(..., description="Load damping per MW of load (MW/Hz per MW)")
    bus_shares: dict[str, float] = Field(
        default_factory=dict, description="Share of the load at each bus; root when empty"
    )


class SampleDocument(BaseModel):
    """
    Forecast-error samples of one chance-constraint source.

    Attributes
    ----------
    theta : float
        Wasserstein radius (MW).
    rho : float
        Violation probability bound.
    csv : str | None
        Sidecar CSV relative to the scenario file, columns ``hour``, ``sample``
        and one column per error coordinate.
    values : list | None
        Inline samples shaped (periods, n) or (periods, n, dim).
    """

    model_config = ConfigDict(extra="forbid")

    theta: float = Field(..., ge=0, description="Wasserstein radius (MW)")
    rho: float = Field(..., gt=0, le=1, description="Violation probability bound")
    csv: str | None = Field(None, description="Sidecar CSV path")
    values: list | None = Field(None, description="Inline samples")


class ScenarioDocument(BaseModel):
    """
    A complete scenario document.

    Forecasts may be given inline per unit or through ``forecasts_csv``, a
    sidecar with an ``hour`` column and one column per renewable unit, which
    replaces the inline series of the units it names.
    """

    model_config = ConfigDict(extra="forbid")

    schema_version: str = Field(SCHEMA_VERSION, description="Document schema version")
    name: str = Field(..., description="Scenario name")
    periods: int = Field(..., ge=0, description="Number of scheduling periods")
    dt_h: float = Field(1.0, gt=0, description="Period length (h)")
    mode: SchedulingMode = Field(SchedulingMode.PM, description="Benchmark mode")
    seed: int = Field(0, description="Seed used to generate synthetic data")
    reserve_duration_h: float = Field(0.25, ge=0, description="Energy backing of BES reserve (h)")
    base_mva: float = Field(10.0, gt=0, description="Per-unit power base (MVA)")
    network: NetworkDocument
    load: LoadDocument
    electrolyzers: list[ElectrolyzerUnit] = Field(default_factory=list)
    plants: list[HydrogenPlant] = Field(default_factory=list)
    afgs: list[AfgUnit] = Field(default_factory=list)
    wts: list[WtUnit] = Field(default_factory=list)
    pvs: list[PvUnit] = Field(default_factory=list)
    bess: list[BesUnit] = Field(default_factory=list)
    forecasts_csv: str | None = Field(None, description="Sidecar forecast CSV")
    samples: dict[str, SampleDocument] = Field(default_factory=dict)
    frequency: FrequencyConfig = Field(default_factory=FrequencyConfig)
    contingency: ContingencyConfig = Field(default_factory=ContingencyConfig)
    prices: PriceConfig = Field(default_factory=PriceConfig)
