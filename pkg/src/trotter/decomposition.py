"""
Edge-coloring decomposition of abelian Cayley walks into matchings.
Follows Single Responsibility Principle: Only splits P into colored parts.
"""

from typing import Dict, List, Optional, Tuple

import numpy as np

from config.settings import ToleranceConfig
from src.graphs.graph_models import torus_digits, torus_shift
from src.models.graph import GraphFamily, TransitionMatrix
from src.models.hamiltonian import Edge, HamiltonianParts
from src.utils.errors import InvariantViolation
from src.utils.logger import get_logger

logger = get_logger(__name__)


def _torus_shape(matrix: TransitionMatrix) -> Tuple[int, int]:
    spec = matrix.spec
    if matrix.lazy:
        raise InvariantViolation("decomposition-family", f"{matrix.label} has self-loops; decompose the non-lazy walk")
    if spec.family is GraphFamily.CYCLE:
        return spec.n, 1
    if spec.family is GraphFamily.TORUS:
        return spec.p, spec.d
    if spec.family is GraphFamily.HYPERCUBE:
        return 2, spec.n
    raise InvariantViolation(
        "decomposition-family", f"{matrix.label} is not a cycle, torus or hypercube walk"
    )


def direction_colors(p: int) -> int:
    """Colors needed for one torus direction: 1 for p = 2, 2 for even p, 3 for odd p."""
    if p == 2:
        return 1
    return 2 if p % 2 == 0 else 3


def _edge_color(step_start: int, p: int) -> int:
    """Color of the edge (c, c + 1) of a length-p cycle, c being its lower endpoint."""
    if p == 2:
        return 0
    if p % 2 == 1 and step_start == p - 1:
        return 2
    return step_start % 2


def edge_color_decompose(matrix: TransitionMatrix, tolerances: Optional[ToleranceConfig] = None) -> HamiltonianParts:
    """
    Split the walk on Z_p^d into matchings H_j with sum_j H_j = P.

    Every direction contributes its own color classes: alternating edges
    (k_a even / k_a odd) along the direction, plus a third class holding the
    wrap-around edge when p is odd.

    Args:
        matrix: Walk on a cycle, torus or hypercube
        tolerances: Numeric tolerances (defaults used when omitted)

    Returns:
        HamiltonianParts ordered by direction, then color

    Raises:
        InvariantViolation: If the family is unsupported or the parts do not reassemble P
    """
    tolerances = tolerances or ToleranceConfig()
    p, d = _torus_shape(matrix)
    n_states = matrix.n_states
    digits = torus_digits(p, d)
    per_direction = direction_colors(p)

    parts: List[np.ndarray] = [np.zeros((n_states, n_states)) for _ in range(per_direction * d)]
    coloring: Dict[Edge, int] = {}
    index = np.arange(n_states)
    for axis in range(d):
        neighbors = torus_shift(p, d, axis, 1)
        starts = digits[:, axis]
        for x, y, start in zip(index, neighbors, starts):
            if p == 2 and start == 1:
                continue
            color = axis * per_direction + _edge_color(int(start), p)
            weight = matrix.entries[y, x]
            parts[color][x, y] = weight
            parts[color][y, x] = weight
            coloring[(int(min(x, y)), int(max(x, y)))] = color

    decomposition = HamiltonianParts(
        parts=parts, coloring=coloring, source_label=matrix.label, tolerance=tolerances.stochasticity
    )
    residual = float(np.abs(decomposition.total() - matrix.entries).max())
    if residual > tolerances.stochasticity:
        raise InvariantViolation("parts-reassemble", f"sum of parts differs from P by {residual:.3e}")
    logger.debug(f"Decomposed {matrix.label} into {decomposition.r} matchings")
    return decomposition
