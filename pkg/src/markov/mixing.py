"""
Classical mixing: spectral gap, mixing time bounds, exact mixing times by
matrix powering, threshold amplification and the Poisson/Cesaro averages.
"""

import math
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from config.settings import MarkovConfig, ToleranceConfig
from src.markov.distances import max_pairwise_column_distance
from src.models.graph import TransitionMatrix
from src.models.spectrum import SnapshotKind, Spectrum, StochasticSnapshot
from src.utils.errors import InconclusiveResult, InvariantViolation, PostconditionFailed
from src.utils.logger import get_logger
from src.utils.validators import validate_epsilon

logger = get_logger(__name__)


class GapResult(NamedTuple):
    """delta = 1 - lam, lam the largest eigenvalue magnitude below the top eigenvalue."""
    delta: float
    lam: float


class ThresholdAmplification(NamedTuple):
    tau_mix: int
    amplified: Dict[float, int]
    exact: Dict[float, int]


def spectral_gap(matrix: TransitionMatrix) -> GapResult:
    """
    Spectral gap of a symmetric irreducible chain.

    The top eigenvalue 1 is simple for an irreducible chain, so lam is the
    largest magnitude among the remaining eigenvalues. A one-state chain
    reports delta = 1 by convention.
    """
    if matrix.n_states == 1:
        return GapResult(1.0, 0.0)
    eigenvalues = np.sort(scipy.linalg.eigvalsh(matrix.entries))[::-1]
    lam = float(min(1.0, np.abs(eigenvalues[1:]).max()))
    delta = max(0.0, 1.0 - lam)
    if delta <= 1e-12:
        logger.warning(f"{matrix.label} is periodic (eigenvalue -1 present); delta = 0")
    return GapResult(delta, lam)


def footnote_assumption(matrix: TransitionMatrix) -> bool:
    """True when the second-largest eigenvalue is at least the magnitude of the smallest."""
    if matrix.n_states < 2:
        return True
    eigenvalues = np.sort(scipy.linalg.eigvalsh(matrix.entries))[::-1]
    holds = bool(eigenvalues[1] >= abs(eigenvalues[-1]) - 1e-12)
    if not holds:
        logger.warning(
            f"{matrix.label}: second eigenvalue {eigenvalues[1]:.6f} is below |lambda_min| = "
            f"{abs(eigenvalues[-1]):.6f}; the lower mixing bound may not apply"
        )
    return holds


def _require_ergodic(matrix: TransitionMatrix, gap: GapResult, tolerances: ToleranceConfig) -> None:
    if gap.delta <= tolerances.comparison_slack:
        raise InvariantViolation("aperiodic", f"{matrix.label} has spectral gap {gap.delta:.3e}; use lazy()")


def mixing_time_bounds(
    matrix: TransitionMatrix,
    eps: float,
    gap: Optional[GapResult] = None,
    tolerances: Optional[ToleranceConfig] = None
) -> Tuple[float, float]:
    """
    Spectral bounds on the mixing time tau(eps).

    lower = (lam / (2 delta)) ln(1 / (2 eps)), or 0 when eps >= 1/2
    upper = (ln N + ln(1 / eps)) / delta, since pi_min = 1/N for symmetric P

    Raises:
        InvariantViolation: If eps is outside (0, 1) or the chain is periodic
    """
    tolerances = tolerances or ToleranceConfig()
    eps = validate_epsilon(eps)
    gap = gap or spectral_gap(matrix)
    _require_ergodic(matrix, gap, tolerances)
    lower = gap.lam / (2.0 * gap.delta) * math.log(1.0 / (2.0 * eps)) if eps < 0.5 else 0.0
    upper = (math.log(matrix.n_states) + math.log(1.0 / eps)) / gap.delta
    return lower, upper


class DistanceProfile:
    """
    Lazily extended table of d(t) = 1/2 ||P^t - u 1^T|| and the pairwise
    column distance dbar(t) of P^t, for t = 0, 1, 2, ...
    """

    def __init__(self, matrix: TransitionMatrix):
        self.matrix = matrix
        self.n_states = matrix.n_states
        self._power = np.eye(self.n_states)
        self.d: List[float] = []
        self.dbar: List[float] = []
        self.logger = get_logger(__name__)
        self._record()

    def _record(self) -> None:
        self.d.append(float(0.5 * np.abs(self._power - 1.0 / self.n_states).sum(axis=0).max()))
        self.dbar.append(max_pairwise_column_distance(self._power))

    @property
    def horizon(self) -> int:
        return len(self.d) - 1

    def extend(self, horizon: int) -> None:
        while self.horizon < horizon:
            self._power = self.matrix.entries @ self._power
            self._record()

    def rows(self) -> List[Tuple[int, float, float]]:
        return [(t, self.d[t], self.dbar[t]) for t in range(len(self.d))]


def distance_profile(matrix: TransitionMatrix, horizon: int) -> List[Tuple[int, float, float]]:
    """Rows (t, d(t), dbar(t)) for t = 0..horizon."""
    profile = DistanceProfile(matrix)
    profile.extend(horizon)
    return profile.rows()


def mixing_time_exact(
    matrix: TransitionMatrix,
    eps: float,
    config: Optional[MarkovConfig] = None,
    tolerances: Optional[ToleranceConfig] = None,
    profile: Optional[DistanceProfile] = None,
    gap: Optional[GapResult] = None
) -> int:
    """
    Exact mixing time min{T : d(t) <= eps for all t >= T}.

    Powers are computed until dbar(t) <= eps. Since dbar is submultiplicative
    it is non-increasing, and d(t) <= dbar(t), so no violation can occur
    after that point. The search stops at horizon = ceil(factor * ds_upper).

    Args:
        matrix: Ergodic symmetric chain
        eps: Target distance in (0, 1)
        config: Horizon factor
        tolerances: Numeric tolerances
        profile: Shared distance profile of the same matrix
        gap: Precomputed spectral gap

    Returns:
        The mixing time tau(eps)

    Raises:
        InvariantViolation: If eps is invalid or the chain is periodic
        InconclusiveResult: If dbar stays above eps up to the horizon
    """
    config = config or MarkovConfig()
    tolerances = tolerances or ToleranceConfig()
    gap = gap or spectral_gap(matrix)
    lower, upper = mixing_time_bounds(matrix, eps, gap, tolerances)
    horizon = math.ceil(config.horizon_factor * upper)
    profile = profile or DistanceProfile(matrix)

    last_violation = -1
    t = 0
    while True:
        profile.extend(t)
        if profile.d[t] > eps:
            last_violation = t
        if profile.dbar[t] <= eps:
            break
        if t >= horizon:
            raise InconclusiveResult(
                f"dbar({horizon}) = {profile.dbar[horizon]:.3e} > eps = {eps:g} for {matrix.label}"
            )
        t += 1

    tau = last_violation + 1
    # tau is an integer, so the real upper bound only caps it at its ceiling
    if not lower - tolerances.comparison_slack <= tau <= math.ceil(upper - tolerances.comparison_slack):
        raise PostconditionFailed(
            "mixing-time-bounds",
            f"tau({eps:g}) = {tau} for {matrix.label} is outside [{lower:.4f}, {upper:.4f}]"
        )
    logger.debug(f"Computed mixing time tau({eps:g}) = {tau} for {matrix.label} (certified at t={t})")
    return tau


def threshold_and_amplify(
    matrix: TransitionMatrix,
    eps_list: Sequence[float] = (0.1, 0.01, 0.001),
    config: Optional[MarkovConfig] = None,
    tolerances: Optional[ToleranceConfig] = None,
    profile: Optional[DistanceProfile] = None
) -> ThresholdAmplification:
    """
    Threshold mixing time tau_mix = tau(threshold_eps) and the amplified bounds
    tau_mix * ceil(ln 1/eps), each checked against the exact tau(eps).

    Raises:
        InvariantViolation: If an exact mixing time exceeds its amplified bound
    """
    config = config or MarkovConfig()
    tolerances = tolerances or ToleranceConfig()
    profile = profile or DistanceProfile(matrix)
    gap = spectral_gap(matrix)
    tau_mix = mixing_time_exact(matrix, config.threshold_eps, config, tolerances, profile, gap)

    amplified: Dict[float, int] = {}
    exact: Dict[float, int] = {}
    for eps in eps_list:
        amplified[eps] = tau_mix * math.ceil(math.log(1.0 / validate_epsilon(eps)))
        exact[eps] = mixing_time_exact(matrix, eps, config, tolerances, profile, gap)
        if exact[eps] > amplified[eps]:
            raise InvariantViolation(
                "threshold-amplification", f"tau({eps:g}) = {exact[eps]} exceeds {amplified[eps]}"
            )

    if not 1.0 / gap.delta <= tau_mix + tolerances.comparison_slack:
        logger.warning(f"{matrix.label}: tau_mix = {tau_mix} is below 1/delta = {1.0 / gap.delta:.4f}")
    logger.info(f"Computed threshold mixing time tau_mix = {tau_mix} for {matrix.label}")
    return ThresholdAmplification(tau_mix, amplified, exact)


def pairwise_mixing_bound(alpha: float, eps: float) -> int:
    """
    Mixing bound ceil(log_{1/alpha} 1/eps) from the pairwise column distance alpha.

    Raises:
        ValueError: If alpha is not in [0, 1)
    """
    eps = validate_epsilon(eps)
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
    if alpha == 0.0:
        return 0
    return math.ceil(math.log(1.0 / eps) / math.log(1.0 / alpha) - 1e-10)


def poisson_average(
    spectrum: Spectrum,
    t: float,
    tolerances: Optional[ToleranceConfig] = None
) -> StochasticSnapshot:
    """Continuous-time chain exp(-(I - P) t) = sum_k exp(-(1 - lambda_k) t) |phi_k><phi_k|."""
    tolerances = tolerances or ToleranceConfig()
    if t < 0:
        raise InvariantViolation("nonnegative-time", f"t must be >= 0, got {t}")
    phi = spectrum.eigenvectors
    weights = np.exp(-(1.0 - spectrum.eigenvalues) * t)
    return StochasticSnapshot(
        entries=(phi * weights) @ phi.T,
        kind=SnapshotKind.POISSON_AVERAGE,
        parameter=float(t),
        source_label=spectrum.source_label,
        tolerance=tolerances.snapshot_stochasticity,
        negative_clamp=tolerances.negative_clamp,
    )


def classical_power(matrix: TransitionMatrix, t: int, tolerances: Optional[ToleranceConfig] = None) -> StochasticSnapshot:
    """P^t as a snapshot."""
    tolerances = tolerances or ToleranceConfig()
    return StochasticSnapshot(
        entries=np.linalg.matrix_power(matrix.entries, int(t)),
        kind=SnapshotKind.CLASSICAL_POWER,
        parameter=float(t),
        source_label=matrix.label,
        tolerance=tolerances.snapshot_stochasticity,
        negative_clamp=tolerances.negative_clamp,
    )


def classical_cesaro_average(
    matrix: TransitionMatrix,
    T: int,
    tolerances: Optional[ToleranceConfig] = None
) -> StochasticSnapshot:
    """Discrete Cesaro average (1/T) sum_{t < T} P^t."""
    tolerances = tolerances or ToleranceConfig()
    if T < 1:
        raise InvariantViolation("positive-horizon", f"T must be >= 1, got {T}")
    power = np.eye(matrix.n_states)
    total = np.zeros_like(power)
    for _ in range(T):
        total += power
        power = matrix.entries @ power
    return StochasticSnapshot(
        entries=total / T,
        kind=SnapshotKind.CLASSICAL_CESARO,
        parameter=float(T),
        source_label=matrix.label,
        tolerance=tolerances.snapshot_stochasticity,
        negative_clamp=tolerances.negative_clamp,
    )
