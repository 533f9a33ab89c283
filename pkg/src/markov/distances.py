"""
Total variation distances between distributions and stochastic matrices,
and the three column-distance propositions used for amplification.
"""

from typing import NamedTuple, Union

import numpy as np
from scipy.spatial.distance import pdist

from src.models.spectrum import Distribution, StochasticSnapshot
from src.utils.errors import InvariantViolation
from src.utils.logger import get_logger
from src.utils.validators import validate_same_shape

logger = get_logger(__name__)

MatrixLike = Union[StochasticSnapshot, np.ndarray]


class EntryFloor(NamedTuple):
    """Measured hypothesis (beta, gamma) of the entry lower bound and the bound it yields."""
    beta: float
    gamma: float
    bound: float


def _entries(matrix: MatrixLike) -> np.ndarray:
    return matrix.entries if isinstance(matrix, StochasticSnapshot) else np.asarray(matrix, dtype=float)


def tv_distance(p: Distribution, q: Distribution) -> float:
    """
    Total variation distance 1/2 ||p - q||_1.

    Raises:
        InvariantViolation: If the distributions have different lengths
    """
    validate_same_shape(p.probs, q.probs)
    return float(0.5 * np.abs(p.probs - q.probs).sum())


def matrix_tv_distance(a: MatrixLike, b: MatrixLike) -> float:
    """
    Half the induced column-L1 norm: 1/2 max_x sum_y |A(y, x) - B(y, x)|.

    Raises:
        InvariantViolation: If the shapes differ
    """
    first, second = _entries(a), _entries(b)
    validate_same_shape(first, second)
    return float(0.5 * np.abs(first - second).sum(axis=0).max())


def max_pairwise_column_distance(q: MatrixLike) -> float:
    """Largest total variation distance between two columns of Q (0 for a single column)."""
    entries = _entries(q)
    if entries.shape[1] < 2:
        return 0.0
    return float(pdist(entries.T, metric='cityblock').max() / 2.0)


def entry_floor_bound(beta: float, gamma: float) -> float:
    """
    Column distance bound 1 - gamma (1 - 2 (1 - beta)) for a matrix whose
    columns each hold at least beta N entries of size at least gamma / N.

    Raises:
        InvariantViolation: If beta is not in (1/2, 1] or gamma not in (0, 1]
    """
    if not 0.5 < beta <= 1.0:
        raise InvariantViolation("entry-floor-beta", f"beta must lie in (1/2, 1], got {beta}")
    if not 0.0 < gamma <= 1.0:
        raise InvariantViolation("entry-floor-gamma", f"gamma must lie in (0, 1], got {gamma}")
    return 1.0 - gamma * (1.0 - 2.0 * (1.0 - beta))


def best_entry_floor(q: MatrixLike, max_candidates: int = 2048) -> EntryFloor:
    """
    Measure the (beta, gamma) pair that gives the tightest entry floor bound.

    Candidate gammas are N times the distinct entries of Q (capped at 1);
    beta(gamma) is the smallest per-column fraction of entries >= gamma / N.

    Raises:
        InvariantViolation: If no candidate satisfies beta > 1/2
    """
    entries = _entries(q)
    n_states = entries.shape[0]
    candidates = np.unique(np.round(entries.ravel() * n_states, 12))
    candidates = np.union1d(candidates[(candidates > 0) & (candidates <= 1.0)], [1.0])
    if candidates.size > max_candidates:
        candidates = np.quantile(candidates, np.linspace(0, 1, max_candidates))

    columns = np.sort(entries, axis=0)
    # rounding above may lift a candidate past the entry it came from
    thresholds = candidates / n_states * (1.0 - 1e-10)
    counts = np.stack([n_states - np.searchsorted(columns[:, x], thresholds, side='left')
                       for x in range(entries.shape[1])])
    betas = counts.min(axis=0) / n_states
    valid = betas > 0.5
    if not np.any(valid):
        raise InvariantViolation("entry-floor-beta", "no gamma leaves more than half of every column above gamma/N")
    bounds = np.where(valid, 1.0 - candidates * (2.0 * betas - 1.0), np.inf)
    best = int(np.argmin(bounds))
    return EntryFloor(beta=float(betas[best]), gamma=float(candidates[best]), bound=float(bounds[best]))


def perturbation_bound(q: MatrixLike, q_prime: MatrixLike, slack: float = 1e-10) -> float:
    """
    Bound 2 ||Q - Q'|| + alpha(Q) on the pairwise column distance of Q'.

    Raises:
        InvariantViolation: If the shapes differ or the bound fails (it never should)
    """
    bound = 2.0 * matrix_tv_distance(q, q_prime) + max_pairwise_column_distance(q)
    measured = max_pairwise_column_distance(q_prime)
    if measured > bound + slack:
        raise InvariantViolation("perturbation-bound", f"column distance {measured:.6g} exceeds bound {bound:.6g}")
    return bound
