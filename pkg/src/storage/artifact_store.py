"""
Artifact storage management.
Handles JSON and CSV artifacts produced by the command line pipeline.
Follows Single Responsibility Principle: Only manages artifact files.
Follows DRY Principle: Centralizes JSON and CSV operations.
"""

import csv
import json
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Sequence

from src.models.graph import TransitionMatrix
from src.models.spectrum import StochasticSnapshot
from src.utils.logger import get_logger


def format_cell(value: Any) -> str:
    """CSV cell text; floats use 17 significant digits so they reload exactly."""
    if isinstance(value, bool) or value is None:
        return "" if value is None else str(value).lower()
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


class ArtifactStore:
    """
    Reads and writes experiment artifacts.
    Every write goes to a temporary file first and is then renamed into place.
    """

    def __init__(self, base_path: Path):
        """
        Initialize artifact store.

        Args:
            base_path: Default directory for artifacts written without an explicit path
        """
        self.base_path = Path(base_path)
        self.logger = get_logger(__name__)

    def default_path(self, filename: str) -> Path:
        """Path of a named artifact under the base directory."""
        return self.base_path / filename

    def _atomic_write(self, path: Path, write) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        temp_path = path.with_suffix(path.suffix + '.tmp')
        try:
            with open(temp_path, 'w', encoding='utf-8', newline='') as f:
                write(f)
            temp_path.replace(path)
        except OSError as e:
            self.logger.error(f"Failed to write {path}: {e}")
            if temp_path.exists():
                temp_path.unlink()
            raise
        return path

    def save_json(self, path: Path, data: Dict[str, Any]) -> Path:
        """
        Write a JSON artifact (indent 2, shortest round-trip float repr).

        Args:
            path: Destination file
            data: JSON-serializable dictionary

        Returns:
            The written path

        Raises:
            OSError: If the file cannot be written
        """
        written = self._atomic_write(path, lambda f: json.dump(data, f, indent=2, ensure_ascii=False))
        self.logger.debug(f"Saved JSON artifact: {written}")
        return written

    def load_json(self, path: Path) -> Dict[str, Any]:
        """
        Load a JSON artifact.

        Raises:
            FileNotFoundError: If the file does not exist
            json.JSONDecodeError: If the file is malformed
        """
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Artifact not found: {path}")
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)

    def save_matrix(self, path: Path, matrix: TransitionMatrix) -> Path:
        return self.save_json(path, matrix.to_dict())

    def load_matrix(self, path: Path) -> TransitionMatrix:
        """Load a transition matrix; invariants are re-checked on construction."""
        return TransitionMatrix.from_dict(self.load_json(path))

    def save_snapshot(self, path: Path, snapshot: StochasticSnapshot) -> Path:
        return self.save_json(path, snapshot.to_dict())

    def load_snapshot(self, path: Path) -> StochasticSnapshot:
        return StochasticSnapshot.from_dict(self.load_json(path))

    def save_text(self, path: Path, text: str) -> Path:
        """Write a text artifact such as a Markdown report."""
        return self._atomic_write(path, lambda f: f.write(text))

    def write_csv(self, path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        """
        Write a CSV table with a header row.

        Raises:
            OSError: If the file cannot be written
        """
        def write(f):
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_cell(value) for value in row])

        written = self._atomic_write(path, write)
        self.logger.debug(f"Saved CSV artifact: {written}")
        return written

    def get_statistics(self, directory: Optional[Path] = None) -> dict:
        """
        Get artifact storage statistics.

        Returns:
            Dictionary with statistics
        """
        directory = Path(directory or self.base_path)
        files = [f for f in directory.glob('*') if f.is_file()] if directory.exists() else []
        total_size = sum(f.stat().st_size for f in files)
        return {
            'total_artifacts': len(files),
            'total_size_bytes': total_size,
            'total_size_kb': round(total_size / 1024, 2),
            'base_path': str(directory)
        }
