"""
Hamiltonian decomposition model for product-formula simulation.
Follows Single Responsibility Principle: Only defines data structures.
"""

from typing import Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from src.utils.errors import InvariantViolation


Edge = Tuple[int, int]


class HamiltonianParts(BaseModel):
    """
    Edge-colored decomposition H = sum_j H_j of a transition matrix.

    Each part is supported on a matching (plus diagonal entries), so its
    exponential splits into independent 2x2 blocks.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    parts: List[np.ndarray]
    coloring: Dict[Edge, int]
    source_label: str = ""
    tolerance: float = 1e-12

    @model_validator(mode='after')
    def validate_parts(self) -> "HamiltonianParts":
        frozen = []
        for index, part in enumerate(self.parts):
            part = np.array(part, dtype=float)
            if part.ndim != 2 or part.shape[0] != part.shape[1]:
                raise InvariantViolation("part-shape", f"part {index} has shape {part.shape}")
            if np.abs(part - part.T).max() > self.tolerance:
                raise InvariantViolation("part-symmetric", f"part {index} is not symmetric")
            off_diagonal = part - np.diag(np.diag(part))
            if (np.abs(off_diagonal) > 0).sum(axis=0).max(initial=0) > 1:
                raise InvariantViolation("part-matching", f"part {index} is not supported on a matching")
            part.setflags(write=False)
            frozen.append(part)
        for (x, y), color in self.coloring.items():
            if not 0 <= color < len(frozen):
                raise InvariantViolation("coloring-range", f"edge ({x}, {y}) has color {color}")
            if frozen[color][x, y] == 0:
                raise InvariantViolation("coloring-support", f"edge ({x}, {y}) missing from part {color}")
        object.__setattr__(self, 'parts', frozen)
        return self

    @property
    def r(self) -> int:
        return len(self.parts)

    def total(self) -> np.ndarray:
        """Sum of all parts."""
        return np.sum(self.parts, axis=0)

    def matchings(self) -> List[List[Edge]]:
        """Edges of each part, grouped by color."""
        grouped: List[List[Edge]] = [[] for _ in self.parts]
        for edge, color in sorted(self.coloring.items()):
            grouped[color].append(edge)
        return grouped
