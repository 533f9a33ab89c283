"""
Lie product approximation of U_t and its measured error.
"""

from concurrent.futures import ThreadPoolExecutor
from itertools import combinations
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from config.settings import ToleranceConfig
from src.models.hamiltonian import HamiltonianParts
from src.models.reports import TrotterRow
from src.models.spectrum import Spectrum
from src.spectral.walk import propagator
from src.utils.errors import InvariantViolation
from src.utils.logger import get_logger

logger = get_logger(__name__)


class CommutatorReport(NamedTuple):
    max_norm: float
    table: Dict[Tuple[int, int], float]


def matching_exponential(part: np.ndarray, s: float) -> np.ndarray:
    """
    exp(-i s H) for H supported on a matching plus its diagonal.

    Every edge (x, y) is a 2x2 block m I + [[h, w], [w, -h]] whose exponential
    is e^{-ism} (cos(sr) I - i sin(sr)/r [[h, w], [w, -h]]), r = sqrt(h^2 + w^2).
    Unmatched vertices only pick up the phase of their diagonal entry.
    """
    diagonal = np.diag(part)
    factor = np.diag(np.exp(-1j * s * diagonal))
    xs, ys = np.nonzero(np.triu(part, k=1))
    if xs.size == 0:
        return factor

    a, b, w = diagonal[xs], diagonal[ys], part[xs, ys]
    mean, half = (a + b) / 2.0, (a - b) / 2.0
    radius = np.hypot(half, w)
    phase = np.exp(-1j * s * mean)
    cos = np.cos(s * radius)
    sinc = np.divide(np.sin(s * radius), radius, out=np.full_like(radius, s), where=radius > 0)
    factor[xs, xs] = phase * (cos - 1j * sinc * half)
    factor[ys, ys] = phase * (cos + 1j * sinc * half)
    factor[xs, ys] = phase * (-1j * sinc * w)
    factor[ys, xs] = factor[xs, ys]
    return factor


def lie_product(
    parts: HamiltonianParts,
    t: float,
    j: int,
    tolerances: Optional[ToleranceConfig] = None
) -> np.ndarray:
    """
    (e^{-i H_1 t/j} ... e^{-i H_r t/j})^j.

    Raises:
        InvariantViolation: If j < 1 or the product is not unitary
    """
    tolerances = tolerances or ToleranceConfig()
    if j < 1:
        raise InvariantViolation("trotter-steps", f"j must be >= 1, got {j}")
    step = np.eye(parts.parts[0].shape[0], dtype=complex)
    for part in parts.parts:
        step = step @ matching_exponential(part, t / j)
    product = np.linalg.matrix_power(step, j)
    residual = float(np.abs(product.conj().T @ product - np.eye(product.shape[0])).max())
    if residual > tolerances.unitarity:
        raise InvariantViolation("unitarity", f"Lie product deviates from unitary by {residual:.3e}")
    return product


def commutator_report(parts: HamiltonianParts) -> CommutatorReport:
    """
    Spectral norms of [H_k, H_l] for every pair k < l.

    Returns:
        CommutatorReport with the maximum (0 for a single part) and the pairwise table
    """
    table = {}
    for k, l in combinations(range(parts.r), 2):
        h_k, h_l = parts.parts[k], parts.parts[l]
        table[(k, l)] = float(np.linalg.norm(h_k @ h_l - h_l @ h_k, ord=2))
    return CommutatorReport(max(table.values(), default=0.0), table)


def trotter_bound(r: int, max_commutator: float, t: float, j: int) -> float:
    """First-order bound t^2/(2j) * sum_{k<l} ||[H_k, H_l]|| with the sum bounded by r(r-1)/2 times the max."""
    return (r - 1) / 4.0 * max_commutator * r * t * t / j


def trotter_sweep(
    parts: HamiltonianParts,
    spectrum: Spectrum,
    t: float,
    j_list: Sequence[int],
    tolerances: Optional[ToleranceConfig] = None,
    max_workers: int = 4
) -> List[TrotterRow]:
    """
    Error of the Lie product against the spectral propagator for each j.

    Args:
        parts: Decomposition of P
        spectrum: Eigenpairs of the same P
        t: Walk time
        j_list: Step counts

    Returns:
        TrotterRow per j, in the order given
    """
    tolerances = tolerances or ToleranceConfig()
    exact = propagator(spectrum, t, tolerances)
    commutators = commutator_report(parts)

    def row(j: int) -> TrotterRow:
        difference = lie_product(parts, t, j, tolerances) - exact
        return TrotterRow(
            t=t,
            j=j,
            error_2norm=float(np.linalg.norm(difference, ord=2)),
            error_max_entry=float(np.abs(difference).max()),
            bound=trotter_bound(parts.r, commutators.max_norm, t, j),
        )

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        rows = list(executor.map(row, j_list))
    for entry in rows:
        if not entry.within_bound:
            logger.warning(f"Trotter error {entry.error_2norm:.3e} exceeds bound {entry.bound:.3e} at j={entry.j}")
    logger.info(f"Trotter sweep on {parts.source_label}: t={t}, j={list(j_list)}, max commutator {commutators.max_norm:.3e}")
    return rows
