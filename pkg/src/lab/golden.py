"""
Committed golden tables for the conjecture lab.
Follows Single Responsibility Principle: Only reads golden files.
"""

from pathlib import Path
from typing import Dict

from src.storage.artifact_store import ArtifactStore
from src.utils.logger import get_logger


class GoldenTables:
    """Access to the golden floors and residual bounds under one directory."""

    TORUS_FLOOR_FILE = "torus_floor.json"
    PERIODICITY_FILE = "periodicity.json"

    def __init__(self, golden_dir: Path):
        self.golden_dir = Path(golden_dir)
        self.store = ArtifactStore(self.golden_dir)
        self.logger = get_logger(__name__)

    def torus_floors(self) -> Dict[int, float]:
        """
        Floor on N * min Pi per torus dimension.

        Raises:
            FileNotFoundError: If the golden file is missing
        """
        data = self.store.load_json(self.store.default_path(self.TORUS_FLOOR_FILE))
        return {int(d): float(floor) for d, floor in data['floors'].items()}

    def torus_floor(self, d: int) -> float:
        floors = self.torus_floors()
        if d not in floors:
            raise KeyError(f"No golden torus floor recorded for d={d} in {self.golden_dir}")
        return floors[d]

    def periodicity_cases(self) -> Dict[str, dict]:
        data = self.store.load_json(self.store.default_path(self.PERIODICITY_FILE))
        return data['cases']
