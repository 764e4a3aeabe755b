"""Forecast and Sample CSV Parser Module."""

from pathlib import Path

import numpy as np
import pandas as pd

from p2hsched.exceptions.errors import ScenarioValidationError

HOUR_COLUMN = "hour"
SAMPLE_COLUMN = "sample"


def _read(path: Path, required: tuple[str, ...]) -> pd.DataFrame:
    if not path.exists():
        raise ScenarioValidationError([f"{path.name}: file not found"])
    frame = pd.read_csv(path)
    missing = [column for column in required if column not in frame.columns]
    if missing:
        raise ScenarioValidationError([f"{path.name}: missing columns {missing}"])
    return frame


def parse_forecasts(path: str | Path) -> dict[str, tuple[float, ...]]:
    """
    Read a forecast CSV with an ``hour`` column and one column per unit (MW).

    Returns
    -------
    dict[str, tuple[float, ...]]
        Series per unit, ordered by hour.
    """
    path = Path(path)
    frame = _read(path, (HOUR_COLUMN,)).sort_values(HOUR_COLUMN)
    hours = frame[HOUR_COLUMN].to_numpy()
    if not np.array_equal(hours, np.arange(len(hours))):
        raise ScenarioValidationError([f"{path.name}: hours must run 0..{len(hours) - 1} without gaps"])
    return {
        column: tuple(float(v) for v in frame[column].to_numpy(dtype=float))
        for column in frame.columns
        if column != HOUR_COLUMN
    }


def parse_samples(path: str | Path) -> np.ndarray:
    """
    Read a long-format sample CSV into an array.

    Columns are ``hour``, ``sample`` and one column per error coordinate.
    One coordinate gives shape (periods, n); several give (periods, n, dim)
    in column order.
    """
    path = Path(path)
    frame = _read(path, (HOUR_COLUMN, SAMPLE_COLUMN)).sort_values([HOUR_COLUMN, SAMPLE_COLUMN])
    coordinates = [c for c in frame.columns if c not in (HOUR_COLUMN, SAMPLE_COLUMN)]
    if not coordinates:
        raise ScenarioValidationError([f"{path.name}: no error coordinate columns"])
    counts = frame.groupby(HOUR_COLUMN).size()
    if counts.nunique() != 1:
        raise ScenarioValidationError([f"{path.name}: every hour needs the same sample count"])
    periods, n = len(counts), int(counts.iloc[0])
    values = frame[coordinates].to_numpy(dtype=float).reshape(periods, n, len(coordinates))
    return values[:, :, 0] if len(coordinates) == 1 else values


def samples_frame(samples: np.ndarray, coordinates: tuple[str, ...]) -> pd.DataFrame:
    """Return samples in the long CSV layout read by ``parse_samples``."""
    values = samples[:, :, None] if samples.ndim == 2 else samples  # noqa: PLR2004
    periods, n, dim = values.shape
    hours, draws = np.meshgrid(np.arange(periods), np.arange(n), indexing="ij")
    frame = pd.DataFrame({HOUR_COLUMN: hours.ravel(), SAMPLE_COLUMN: draws.ravel()})
    for j in range(dim):
        frame[coordinates[j]] = values[:, :, j].ravel()
    return frame
