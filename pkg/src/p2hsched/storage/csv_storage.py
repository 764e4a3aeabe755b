"""CSV run-directory storage."""

import hashlib
import json
import shutil
from pathlib import Path
from tempfile import NamedTemporaryFile

import pandas as pd

from p2hsched.config.constants import MANIFEST_FILE
from p2hsched.storage.base_storage import BaseRunStorage


class CSVRunStorage(BaseRunStorage):
    """
    Run directory holding JSON documents and CSV tables.

    Every file is written to a temporary file in the same directory and then
    moved into place; ``manifest.json`` maps file names to their sha256.
    """

    def __init__(self, run_dir: Path) -> None:
        """Create the run directory if needed."""
        self.run_dir = Path(run_dir)
        self.run_dir.mkdir(parents=True, exist_ok=True)
        self.manifest_path = self.run_dir / MANIFEST_FILE

    def _move_into_place(self, name: str, content: bytes) -> Path:
        target = self.run_dir / name
        target.parent.mkdir(parents=True, exist_ok=True)
        with NamedTemporaryFile("wb", delete=False, dir=target.parent) as temp_file:
            temp_file.write(content)
        shutil.move(temp_file.name, target)
        return target

    def _record(self, name: str, content: bytes) -> None:
        entries = self.manifest()
        entries[name] = hashlib.sha256(content).hexdigest()
        document = json.dumps(dict(sorted(entries.items())), indent=2) + "\n"
        self._move_into_place(MANIFEST_FILE, document.encode())

    def write_bytes(self, name: str, content: bytes) -> Path:
        """Atomically write a file and record its checksum."""
        path = self._move_into_place(name, content)
        self._record(name, content)
        return path

    def write_frame(self, name: str, frame: pd.DataFrame) -> Path:
        """Write a dataframe as CSV without the index."""
        return self.write_bytes(name, frame.to_csv(index=False, lineterminator="\n").encode())

    def read_bytes(self, name: str) -> bytes:
        """Read a file of the run."""
        return (self.run_dir / name).read_bytes()

    def read_frame(self, name: str) -> pd.DataFrame:
        """Read a CSV table of the run."""
        return pd.read_csv(self.run_dir / name)

    def manifest(self) -> dict[str, str]:
        """Return the recorded checksums."""
        if not self.manifest_path.exists():
            return {}
        return json.loads(self.manifest_path.read_text())

    def stale_files(self) -> list[str]:
        """Return recorded files that are missing or whose content changed."""
        stale = []
        for name, digest in self.manifest().items():
            path = self.run_dir / name
            if not path.exists() or hashlib.sha256(path.read_bytes()).hexdigest() != digest:
                stale.append(name)
        return stale
