"""
Quantum mixing times of the Cesaro averages.

The deviation P_T-bar - Pi is a sum over unordered class pairs p = {j, l}
of 2 sinc(D_p T) F_p with F_p = E_j * E_l (entrywise). Two constants of
that expansion drive a certified search:
  - the envelope C with 1/2 ||P_T-bar - Pi||_1 <= C / T
  - a Lipschitz constant L of T -> 1/2 ||P_T-bar - Pi||_1
"""

import math
from typing import NamedTuple, Optional

import numpy as np

from config.settings import QuantumConfig, ToleranceConfig
from src.markov.distances import max_pairwise_column_distance
from src.models.spectrum import EigenvalueClasses, Spectrum
from src.spectral.walk import ClassProjector, cesaro_infinite, sinc_kernel
from src.utils.errors import InconclusiveResult
from src.utils.logger import get_logger
from src.utils.validators import validate_epsilon

logger = get_logger(__name__)

# max_u |d/du sin(u)/u|
SINC_SLOPE = 0.4362


class ThresholdResult(NamedTuple):
    """alpha, eps0 = (1 - alpha)/4, the quantum threshold mixing time and whether amplification is usable."""
    alpha: float
    eps0: float
    tau_prime_mix: float
    amplification_available: bool


class CesaroDistance:
    """
    Evaluates d'(T) = 1/2 max_x sum_y |P_T-bar(y, x) - Pi(y, x)| and its bounds.

    Reuses one ClassProjector so repeated evaluations during a scan only
    pay for the kernel contraction.
    """

    def __init__(self, spectrum: Spectrum, classes: EigenvalueClasses, max_workers: int = 4):
        self.projector = ClassProjector(spectrum, classes, max_workers)
        self.logger = get_logger(__name__)
        values = self.projector.values
        self.delta = np.abs(values[:, None] - values[None, :])
        upper = np.triu(np.ones_like(self.delta, dtype=bool), k=1)
        self._pair_mask = upper
        self._envelope: Optional[float] = None
        self._lipschitz: Optional[float] = None

    def _pair_weights(self) -> np.ndarray:
        """Per column x, the M x M matrix (|E_x|^T |E_x|)_{jl} = sum_y |F_{jl}(y, x)|."""
        stack = np.abs(self.projector.stack())
        return np.einsum('xyj,xyl->xjl', stack, stack)

    def _constants(self) -> None:
        if self.projector.n_classes < 2:
            self._envelope = 0.0
            self._lipschitz = 0.0
            return
        weights = self._pair_weights()[:, self._pair_mask]
        gaps = self.delta[self._pair_mask]
        self._envelope = float((weights / gaps).sum(axis=1).max())
        self._lipschitz = float((weights * (SINC_SLOPE * gaps)).sum(axis=1).max())

    @property
    def envelope_constant(self) -> float:
        if self._envelope is None:
            self._constants()
        return self._envelope

    @property
    def lipschitz_constant(self) -> float:
        if self._lipschitz is None:
            self._constants()
        return self._lipschitz

    def __call__(self, T: float) -> float:
        if self.projector.n_classes < 2:
            return 0.0
        kernel = sinc_kernel(self.projector.values, T)
        np.fill_diagonal(kernel, 0.0)
        stack = self.projector.stack()
        deviation = np.einsum('xyj,jl,xyl->xy', stack, kernel, stack, optimize=True)
        return float(0.5 * np.abs(deviation).sum(axis=1).max())


def pair_envelope_constant(spectrum: Spectrum, classes: EigenvalueClasses, max_workers: int = 4) -> float:
    """
    Constant C with 1/2 ||P_T-bar - Pi||_1 <= C / T for every T > 0.

    C = max_x sum_y sum_{pairs} |F_p(y, x)| / |D_p|, using |sinc(u)| <= 1/|u|.
    """
    return CesaroDistance(spectrum, classes, max_workers).envelope_constant


def cesaro_distance(spectrum: Spectrum, classes: EigenvalueClasses, T: float, max_workers: int = 4) -> float:
    """Closed-form 1/2 ||P_T-bar - Pi||_1."""
    return CesaroDistance(spectrum, classes, max_workers)(T)


def quantum_mixing_time(
    spectrum: Spectrum,
    classes: EigenvalueClasses,
    eps: float,
    config: Optional[QuantumConfig] = None,
    tolerances: Optional[ToleranceConfig] = None,
    max_workers: int = 4,
    distance: Optional[CesaroDistance] = None
) -> float:
    """
    Smallest T such that 1/2 ||P_T'-bar - Pi||_1 <= eps for every T' >= T.

    Beyond T* = C / eps the envelope certifies the distance. The scan walks
    down from T*; at each point with distance D <= eps the Lipschitz bound
    certifies the next (eps - D) / L of the axis, and the step never drops
    below resolution * T. The first violation found ends the scan and the
    previous grid point is returned.

    Args:
        spectrum: Eigenpairs of P
        classes: Eigenvalue classes
        eps: Target distance in (epsilon_floor, 1)
        config: Scan resolution and budget
        tolerances: Numeric tolerances (epsilon floor)
        max_workers: Column assembly workers
        distance: Reusable distance evaluator

    Returns:
        Quantum mixing time tau'(eps)

    Raises:
        InvariantViolation: If eps is outside (floor, 1)
        InconclusiveResult: If the scan exceeds its step budget
    """
    config = config or QuantumConfig()
    tolerances = tolerances or ToleranceConfig()
    eps = validate_epsilon(eps, floor=tolerances.epsilon_floor)
    distance = distance or CesaroDistance(spectrum, classes, max_workers)

    envelope = distance.envelope_constant
    if envelope == 0.0:
        return 0.0
    lipschitz = distance.lipschitz_constant
    upper = envelope / eps

    certified = upper
    T = upper
    for _ in range(config.max_scan_steps):
        current = distance(T)
        if current > eps:
            logger.debug(f"tau'({eps:g}) of {spectrum.source_label}: violation {current:.3e} at T={T:.6g}")
            return certified
        certified = T
        step = max((eps - current) / lipschitz if lipschitz > 0 else T, config.resolution * T,
                   config.absolute_step_floor)
        if T - step <= 0:
            return 0.0 if distance(config.absolute_step_floor) <= eps else certified
        T -= step
    raise InconclusiveResult(
        f"quantum mixing time scan for eps={eps:g} exceeded {config.max_scan_steps} steps"
    )


def alpha_and_threshold(
    spectrum: Spectrum,
    classes: EigenvalueClasses,
    config: Optional[QuantumConfig] = None,
    tolerances: Optional[ToleranceConfig] = None,
    max_workers: int = 4,
    distance: Optional[CesaroDistance] = None
) -> ThresholdResult:
    """
    alpha = max pairwise column distance of Pi, eps0 = (1 - alpha) / 4 and tau'(eps0).

    When alpha >= 1 - margin amplification is unavailable; a warning is
    logged and tau' is still computed at max(eps0, epsilon_floor).
    """
    tolerances = tolerances or ToleranceConfig()
    distance = distance or CesaroDistance(spectrum, classes, max_workers)
    limit = cesaro_infinite(spectrum, classes, tolerances, max_workers, projector=distance.projector)
    alpha = max_pairwise_column_distance(limit)
    eps0 = (1.0 - alpha) / 4.0
    available = alpha < 1.0 - tolerances.amplification_alpha_margin
    if not available:
        logger.warning(
            f"Amplification fails numerically for {spectrum.source_label} (alpha={alpha:.12f}); "
            "use the single loop with a large T"
        )
    target = max(eps0, tolerances.epsilon_floor)
    tau_prime_mix = quantum_mixing_time(
        spectrum, classes, target, config, tolerances, max_workers, distance=distance
    )
    logger.info(
        f"Quantum threshold for {spectrum.source_label}: alpha={alpha:.6f}, eps0={eps0:.6f}, "
        f"tau'_mix={tau_prime_mix:.6g}"
    )
    return ThresholdResult(alpha, eps0, tau_prime_mix, available)


def amplification_rounds(alpha: float, eps: float, slack: float = 1e-10) -> int:
    """
    Outer rounds T' = ceil(log_{2/(1+alpha)} 1/eps).

    Raises:
        InvariantViolation: If eps is outside (0, 1)
        ValueError: If alpha is not below 1
    """
    eps = validate_epsilon(eps)
    if not 0 <= alpha < 1:
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
    return max(1, math.ceil(math.log(1.0 / eps) / math.log(2.0 / (1.0 + alpha)) - slack))
