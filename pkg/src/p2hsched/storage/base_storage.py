"""Base Storage Manager for run artefacts."""

from abc import ABC, abstractmethod
from pathlib import Path

import pandas as pd


class BaseRunStorage(ABC):
    """Base storage of one run directory."""

    @abstractmethod
    def __init__(self, run_dir: Path) -> None:
        """Initialize the storage manager."""

    @abstractmethod
    def write_bytes(self, name: str, content: bytes) -> Path:
        """Write a file and record its checksum."""

    @abstractmethod
    def write_frame(self, name: str, frame: pd.DataFrame) -> Path:
        """Write a table and record its checksum."""

    @abstractmethod
    def read_bytes(self, name: str) -> bytes:
        """Read a file of the run."""

    @abstractmethod
    def read_frame(self, name: str) -> pd.DataFrame:
        """Read a table of the run."""

    @abstractmethod
    def manifest(self) -> dict[str, str]:
        """Return file name → sha256 of every recorded artefact."""
