"""
Frequency Models.

The per-hour frequency case fed to the dynamics and security layers, and the
sampled trajectory produced by the numeric integrator. Under-frequency events
are stored as positive deviation magnitudes.
"""

from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd

from p2hsched.config.constants import TRAJECTORY_COLUMNS
from p2hsched.exceptions.errors import DomainError


@dataclass(frozen=True)
class PfrRamp:
    """A resource's primary-reserve ramp: linear delivery of ``reserve`` over ``delivery_time``."""

    label: str
    reserve: float
    delivery_time: float
    stage: int

    @property
    def rate(self) -> float:
        """Ramp rate (MW/s)."""
        return self.reserve / self.delivery_time if self.delivery_time > 0 else 0.0


@dataclass(frozen=True)
class FrequencyCase:
    """
    One hour's aggregate frequency-response parameters.

    Attributes
    ----------
    h_agg : float
        Aggregate inertia (MW·s/Hz).
    d_agg : float
        Aggregate damping (MW/Hz).
    dp_dis : float
        Disturbance magnitude (MW, positive for a load increase).
    db1, db2 : float
        Stage-1 and stage-2 deadbands (Hz).
    t_db1, t_db2 : float
        Times at which the deadbands are reached (s).
    stage1_rate, stage2_rate : float
        Aggregate reserve ramp rates of the first and second stage (MW/s).
    total_pfr : float
        Sum of all primary reserves (MW).
    f_n : float
        Nominal frequency (Hz).
    ramps : tuple[PfrRamp, ...]
        Optional per-resource ramps; each saturates at its own reserve.
    """

    h_agg: float
    d_agg: float
    dp_dis: float
    db1: float
    db2: float
    t_db1: float
    t_db2: float
    stage1_rate: float
    stage2_rate: float
    total_pfr: float
    f_n: float = 50.0
    ramps: tuple[PfrRamp, ...] = field(default=())

    def __post_init__(self) -> None:
        """Check the case invariants."""
        if self.h_agg <= 0:
            raise DomainError("h_agg", self.h_agg, "> 0")
        if self.d_agg < 0:
            raise DomainError("d_agg", self.d_agg, ">= 0")
        if not 0 <= self.t_db1 < self.t_db2:
            raise DomainError("t_db1", self.t_db1, f"0 <= t_db1 < t_db2 = {self.t_db2}")
        if self.stage1_rate < 0 or self.stage2_rate < self.stage1_rate:
            raise DomainError(
                "stage2_rate", self.stage2_rate, f">= stage1_rate = {self.stage1_rate} >= 0"
            )
        if self.total_pfr < 0 or any(ramp.reserve < 0 for ramp in self.ramps):
            raise DomainError("total_pfr", self.total_pfr, "nonnegative reserves")

    @classmethod
    def from_ramps(  # noqa: PLR0913
        cls,
        h_agg: float,
        d_agg: float,
        dp_dis: float,
        db1: float,
        db2: float,
        t_db1: float,
        t_db2: float,
        ramps: tuple[PfrRamp, ...],
        f_n: float = 50.0,
    ) -> "FrequencyCase":
        """Build a case whose aggregate rates are derived from per-resource ramps."""
        stage1 = sum(ramp.rate for ramp in ramps if ramp.stage == 1)
        stage2 = stage1 + sum(ramp.rate for ramp in ramps if ramp.stage == 2)  # noqa: PLR2004
        return cls(
            h_agg=h_agg,
            d_agg=d_agg,
            dp_dis=dp_dis,
            db1=db1,
            db2=db2,
            t_db1=t_db1,
            t_db2=t_db2,
            stage1_rate=stage1,
            stage2_rate=stage2,
            total_pfr=sum(ramp.reserve for ramp in ramps),
            f_n=f_n,
            ramps=tuple(ramps),
        )

    @property
    def stage_width(self) -> float:
        """Duration of the first response stage (s)."""
        return self.t_db2 - self.t_db1

    def with_changes(self, **changes: float) -> "FrequencyCase":
        """Return a copy with the given fields replaced."""
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class FrequencyTrajectory:
    """Sampled post-contingency deviation with its extracted metrics."""

    times: np.ndarray
    deviations: np.ndarray
    nadir: tuple[float, float]
    max_rocof: float
    qss: float

    @property
    def nadir_time(self) -> float:
        """Time of the extreme deviation (s)."""
        return self.nadir[0]

    @property
    def nadir_value(self) -> float:
        """Extreme deviation (Hz)."""
        return self.nadir[1]

    def to_frame(self) -> pd.DataFrame:
        """Return the trajectory as a ``time_s``/``deviation_hz`` dataframe."""
        return pd.DataFrame(
            {TRAJECTORY_COLUMNS[0]: self.times, TRAJECTORY_COLUMNS[1]: self.deviations}
        )
