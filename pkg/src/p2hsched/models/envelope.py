"""Security Envelope Models."""

from dataclasses import dataclass, field
from enum import Enum

from pydantic import ConfigDict, with_config

# Infinite metrics (an hour without inertia) are written as JSON Infinity.
JSON_CONFIG = ConfigDict(ser_json_inf_nan="constants")


class ThresholdStatus(str, Enum):
    """Outcome of solving a nadir threshold equation."""

    SOLVED = "solved"
    TRIVIAL = "trivially_satisfied"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class NadirThreshold:
    """Root of the nadir threshold equation, or the reason no root is needed or possible."""

    status: ThresholdStatus
    value: float | None
    rhs: float
    residual: float = 0.0


@with_config(JSON_CONFIG)
@dataclass(frozen=True)
class SecurityEnvelope:
    """
    Compiled per-hour frequency-security coefficients.

    Attributes
    ----------
    hour : int
        Period index.
    inertia_floor : float
        Minimum aggregate inertia (MW·s/Hz) from the RoCoF limit.
    qss_reserve_floor : float
        Minimum total primary reserve (MW) from the quasi-steady-state limit.
    x1_star, x2_star : float | None
        Nadir thresholds on the inertia-weighted reserve rate (MW²/Hz); None
        when the stage needs no constraint or cannot be secured.
    stage1_status, stage2_status : ThresholdStatus
        Threshold outcomes per stage.
    r1_lo, r1_hi : float
        Stage-1 rate thresholds (MW/s) at the lower and upper inertia bound.
    mu_margin, mu_estimate : float
        Exact and second-order time margin (s).
    big_m : dict[str, float]
        Per-row big-M values.
    nadir_lim, rocof_lim, qss_lim : float
        Frequency limits (Hz, Hz/s, Hz).
    dp_dis : float
        Disturbance (MW).
    d_agg : float
        Aggregate damping used for compilation (MW/Hz).
    h_bounds : tuple[float, float]
        Lower and upper aggregate inertia bound (MW·s/Hz).
    """

    hour: int
    inertia_floor: float
    qss_reserve_floor: float
    x1_star: float | None
    x2_star: float | None
    stage1_status: ThresholdStatus
    stage2_status: ThresholdStatus
    r1_lo: float
    r1_hi: float
    mu_margin: float
    mu_estimate: float
    nadir_lim: float
    rocof_lim: float
    qss_lim: float
    dp_dis: float
    d_agg: float
    h_bounds: tuple[float, float]
    big_m: dict[str, float] = field(default_factory=dict)

    @property
    def needs_nadir_rows(self) -> bool:
        """Whether the nadir binary rows must be emitted for this hour."""
        return not (
            self.stage1_status is ThresholdStatus.TRIVIAL
            and self.stage2_status is ThresholdStatus.TRIVIAL
        )

    @property
    def fixed_branch(self) -> int | None:
        """Forced value of the nadir branch binary, if one stage cannot be secured."""
        if self.stage1_status is ThresholdStatus.INFEASIBLE:
            return 0
        if self.stage2_status is ThresholdStatus.INFEASIBLE:
            return 1
        return None
