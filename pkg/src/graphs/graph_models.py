"""
Transition matrix construction for the supported graph families.
Follows Factory Pattern: one builder per family behind build_transition.
"""

from typing import Callable, Dict, Optional, Tuple

import numpy as np
from scipy.sparse.csgraph import shortest_path

from config.settings import ToleranceConfig
from src.models.graph import GraphFamily, GraphSpec, TransitionMatrix
from src.utils.errors import InvariantViolation
from src.utils.logger import get_logger
from src.utils.validators import is_connected

logger = get_logger(__name__)


def torus_digits(p: int, d: int) -> np.ndarray:
    """
    Coordinates of every vertex of Z_p^d in mixed-radix little-endian order.

    Returns:
        (p**d, d) integer array; row v holds (k_0, ..., k_{d-1}) with v = sum k_i p^i
    """
    index = np.arange(p ** d)
    return (index[:, None] // (p ** np.arange(d))) % p


def torus_shift(p: int, d: int, axis: int, step: int) -> np.ndarray:
    """Image of every vertex under k -> k + step*e_axis."""
    digits = torus_digits(p, d)
    index = np.arange(p ** d)
    moved = (digits[:, axis] + step) % p
    return index + (moved - digits[:, axis]) * p ** axis


def _torus_entries(p: int, d: int) -> Tuple[np.ndarray, int]:
    n_states = p ** d
    entries = np.zeros((n_states, n_states))
    index = np.arange(n_states)
    for axis in range(d):
        for step in (1, -1):
            # p = 2 sends both steps to the same neighbor, which then carries weight 1/d
            np.add.at(entries, (torus_shift(p, d, axis, step), index), 1.0 / (2 * d))
    degree = d if p == 2 else 2 * d
    return entries, degree


def _build_cycle(spec: GraphSpec) -> Tuple[np.ndarray, int]:
    return _torus_entries(spec.n, 1)


def _build_torus(spec: GraphSpec) -> Tuple[np.ndarray, int]:
    return _torus_entries(spec.p, spec.d)


def _build_hypercube(spec: GraphSpec) -> Tuple[np.ndarray, int]:
    # bit i of the vertex index is coordinate i, i.e. the little-endian Z_2^n order
    return _torus_entries(2, spec.n)


def _build_complete(spec: GraphSpec) -> Tuple[np.ndarray, int]:
    size = spec.size
    if spec.with_self_loops:
        return np.full((size, size), 1.0 / size), size
    entries = (np.ones((size, size)) - np.eye(size)) / (size - 1)
    return entries, size - 1


def _build_custom(spec: GraphSpec) -> Tuple[np.ndarray, int]:
    weights = np.array(spec.adjacency, dtype=float)
    if not is_connected(weights):
        raise InvariantViolation("irreducible", "custom adjacency has disconnected support")
    degrees = weights.sum(axis=0)
    max_degree = degrees.max()
    if np.allclose(degrees, max_degree, rtol=0, atol=1e-12):
        regular_degree = int(round(max_degree)) if float(max_degree).is_integer() else None
        return weights / max_degree, regular_degree
    # Max-degree walk: symmetric and doubly stochastic for any weighted graph
    logger.info(f"Custom adjacency is not regular; using the max-degree walk (d_max={max_degree:g})")
    entries = weights / max_degree + np.diag(1.0 - degrees / max_degree)
    return entries, None


_BUILDERS: Dict[GraphFamily, Callable[[GraphSpec], Tuple[np.ndarray, int]]] = {
    GraphFamily.CYCLE: _build_cycle,
    GraphFamily.TORUS: _build_torus,
    GraphFamily.HYPERCUBE: _build_hypercube,
    GraphFamily.COMPLETE: _build_complete,
    GraphFamily.CUSTOM: _build_custom,
}


def build_transition(spec: GraphSpec, tolerances: Optional[ToleranceConfig] = None) -> TransitionMatrix:
    """
    Build the standard transition matrix P = A/deg of a graph family instance.

    Args:
        spec: Validated graph description
        tolerances: Numeric tolerances (defaults used when omitted)

    Returns:
        Immutable TransitionMatrix

    Raises:
        InvariantViolation: If the resulting matrix violates a transition invariant
    """
    tolerances = tolerances or ToleranceConfig()
    entries, degree = _BUILDERS[spec.family](spec)
    matrix = TransitionMatrix(
        n_states=spec.n_states,
        entries=entries,
        spec=spec,
        degree=degree,
        stochastic_tol=tolerances.stochasticity,
    )
    logger.debug(f"Built transition matrix for {spec.label} (N={matrix.n_states}, degree={degree})")
    return matrix


def lazy(matrix: TransitionMatrix) -> TransitionMatrix:
    """Return the lazy chain (I + P) / 2; its eigenvalues are all nonnegative."""
    entries = (np.eye(matrix.n_states) + matrix.entries) / 2.0
    return TransitionMatrix(
        n_states=matrix.n_states,
        entries=entries,
        spec=matrix.spec,
        degree=matrix.degree,
        lazy=True,
        stochastic_tol=matrix.stochastic_tol,
    )


def vertex_transitive_rows(matrix: TransitionMatrix, tol: float = 1e-12) -> bool:
    """True when every row of P is a permutation of the first row."""
    rows = np.sort(matrix.entries, axis=1)
    return bool(np.abs(rows - rows[0]).max() <= tol)


def graph_diameter(matrix: TransitionMatrix) -> int:
    """
    Diameter of the support graph of P.

    Closed forms are used for the named families; custom graphs fall back to
    an unweighted all-pairs shortest path search.
    """
    spec = matrix.spec
    if spec.family is GraphFamily.CYCLE:
        return spec.n // 2
    if spec.family is GraphFamily.TORUS:
        return spec.d * (spec.p // 2)
    if spec.family is GraphFamily.HYPERCUBE:
        return spec.n
    if spec.family is GraphFamily.COMPLETE:
        return 1
    support = (matrix.entries > 0).astype(float)
    np.fill_diagonal(support, 0.0)
    distances = shortest_path(support, method='D', unweighted=True, directed=False)
    return int(distances.max())
