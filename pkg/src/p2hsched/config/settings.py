"""Solver and runtime configuration from a config file and environment variables."""

import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from functools import lru_cache
from pathlib import Path
from typing import Any

TRUTHY = ("true", "1", "yes")

ENV_PREFIX = "P2HSCHED_"
CONFIG_SECTION = "solver"


def _env_bool(name: str, default: bool) -> bool:  # noqa: FBT001
    raw = os.getenv(name)
    if raw is None:
        return default
    return raw.lower() in TRUTHY


class Settings:
    """
    Runtime settings for the scheduling engine.

    Values come from, in increasing priority, the built-in defaults, the
    ``[solver]`` section of an optional TOML config file and the ``P2HSCHED_*``
    environment variables.

    Attributes
    ----------
    SOLVER : str
        Pyomo solver plugin name (``appsi_highs``, ``highs``, ``cbc`` or ``glpk``).
    TIME_LIMIT : float
        Wall-clock limit per solve in seconds.
    MIP_GAP : float
        Relative MIP gap tolerance.
    THREADS : int
        Solver thread count.
    CACHE_PATH : str
        Base directory of the on-disk solution cache.
    CACHE_MEMORY_SIZE : int
        Number of solutions kept in memory.
    CACHE_TTL : int
        Lifetime of in-memory cache entries in seconds.
    STRICT_DRCC : bool
        Raise instead of warn when a chance constraint has rho > 1/N.
    LOG_LEVEL : str
        Default log level of the command-line interface.
    """

    DEFAULTS: dict[str, Any] = {  # noqa: RUF012
        "SOLVER": "appsi_highs",
        "TIME_LIMIT": 1800.0,
        "MIP_GAP": 0.01,
        "THREADS": 1,
        "CACHE_PATH": ".p2hsched-cache",
        "CACHE_MEMORY_SIZE": 32,
        "CACHE_TTL": 3600,
        "STRICT_DRCC": False,
        "LOG_LEVEL": "WARNING",
    }

    def __init__(self, config_file: str | Path | None = None) -> None:
        """Initialize settings, reading the config file before the environment."""
        values = dict(self.DEFAULTS)
        config_file = config_file or os.getenv(f"{ENV_PREFIX}CONFIG")
        if config_file:
            values.update(self._read_config_file(Path(config_file)))

        self.SOLVER: str = os.getenv(f"{ENV_PREFIX}SOLVER", str(values["SOLVER"]))
        self.TIME_LIMIT: float = float(
            os.getenv(f"{ENV_PREFIX}TIME_LIMIT", str(values["TIME_LIMIT"]))
        )
        self.MIP_GAP: float = float(os.getenv(f"{ENV_PREFIX}MIP_GAP", str(values["MIP_GAP"])))
        self.THREADS: int = int(os.getenv(f"{ENV_PREFIX}THREADS", str(values["THREADS"])))
        self.CACHE_PATH: str = os.getenv(f"{ENV_PREFIX}CACHE_PATH", str(values["CACHE_PATH"]))
        self.CACHE_MEMORY_SIZE: int = int(
            os.getenv(f"{ENV_PREFIX}CACHE_MEMORY_SIZE", str(values["CACHE_MEMORY_SIZE"]))
        )
        self.CACHE_TTL: int = int(os.getenv(f"{ENV_PREFIX}CACHE_TTL", str(values["CACHE_TTL"])))
        self.STRICT_DRCC: bool = _env_bool(f"{ENV_PREFIX}STRICT_DRCC", bool(values["STRICT_DRCC"]))
        self.LOG_LEVEL: str = os.getenv(f"{ENV_PREFIX}LOG_LEVEL", str(values["LOG_LEVEL"]))

    @staticmethod
    def _read_config_file(path: Path) -> dict[str, Any]:
        with path.open("rb") as f:
            document = tomllib.load(f)
        section = document.get(CONFIG_SECTION, {})
        return {key.upper(): value for key, value in section.items()}

    def __repr__(self) -> str:
        """Return string representation of settings."""
        return (
            f"Settings(SOLVER={self.SOLVER!r}, TIME_LIMIT={self.TIME_LIMIT}, "
            f"MIP_GAP={self.MIP_GAP}, THREADS={self.THREADS}, CACHE_PATH={self.CACHE_PATH!r})"
        )


@lru_cache
def get_settings() -> Settings:
    """
    Get cached settings instance.

    Returns
    -------
    Settings
        Settings loaded from the environment (and ``P2HSCHED_CONFIG`` if set).

    Notes
    -----
    Call ``get_settings.cache_clear()`` after changing the environment.
    """
    return Settings()
