"""Two-level solution cache: an in-memory TTL layer in front of a disk layer."""

import hashlib
import json
from dataclasses import asdict
from pathlib import Path

from cachetools import TTLCache
from diskcache import Cache as DiskCache

from p2hsched.config.settings import get_settings
from p2hsched.models.run_config import SolverConfig
from p2hsched.models.solution import SolveResult
from p2hsched.utils.logging_config import logger

DISK_SIZE_LIMIT = 1_073_741_824


def cache_key(model_text: str | bytes, config: SolverConfig) -> str:
    """
    Return the cache key of a model file and solver configuration.

    Examples
    --------
    >>> len(cache_key("max: x;", SolverConfig()))
    64
    """
    if isinstance(model_text, str):
        model_text = model_text.encode()
    digest = hashlib.sha256(model_text)
    digest.update(json.dumps(asdict(config), sort_keys=True).encode())
    return digest.hexdigest()


class SolutionCache:
    """
    Cache of solve results keyed by model digest.

    Attributes
    ----------
    memory : TTLCache
        Recently used results, expiring after ``ttl`` seconds.
    disk : DiskCache
        Persistent results under ``<path>/solutions``.
    stats : dict
        Hit and miss counters.
    """

    def __init__(
        self,
        path: str | Path | None = None,
        memory_size: int | None = None,
        ttl: int | None = None,
    ) -> None:
        """Open the cache, defaulting location and sizes to the settings."""
        settings = get_settings()
        directory = Path(path or settings.CACHE_PATH) / "solutions"
        directory.mkdir(parents=True, exist_ok=True)
        self.memory: TTLCache = TTLCache(
            maxsize=memory_size or settings.CACHE_MEMORY_SIZE,
            ttl=ttl or settings.CACHE_TTL,
        )
        self.disk = DiskCache(str(directory), size_limit=DISK_SIZE_LIMIT)
        self.stats = {"memory_hits": 0, "disk_hits": 0, "misses": 0, "sets": 0, "skipped": 0}

    def get(self, key: str) -> SolveResult | None:
        """Return a cached result, promoting disk hits to memory."""
        if key in self.memory:
            self.stats["memory_hits"] += 1
            logger.debug("Solution cache memory hit: %s", key[:12])
            return self.memory[key]
        value = self.disk.get(key)
        if value is not None:
            self.stats["disk_hits"] += 1
            logger.debug("Solution cache disk hit: %s", key[:12])
            self.memory[key] = value
            return value
        self.stats["misses"] += 1
        return None

    def set(self, key: str, result: SolveResult) -> bool:
        """Store a result if it carries a primal solution; return whether it was stored."""
        if not result.status.has_solution:
            self.stats["skipped"] += 1
            return False
        self.memory[key] = result
        self.disk.set(key, result)
        self.stats["sets"] += 1
        return True

    def clear(self) -> None:
        """Drop every entry from both layers."""
        self.memory.clear()
        self.disk.clear()

    def close(self) -> None:
        """Close the disk layer."""
        self.disk.close()

    def __enter__(self) -> "SolutionCache":
        """Return the open cache."""
        return self

    def __exit__(self, *exc_info: object) -> None:
        """Close the cache on exit."""
        self.close()
