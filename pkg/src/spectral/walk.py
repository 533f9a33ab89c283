"""
Continuous-time quantum walk U_t = exp(-iPt) and its stochastic snapshots.

Every snapshot is assembled from the class projections E_j = sum_{k in C_j} |phi_k><phi_k|.
Column x of E_j is all that is needed for column x of P_t, the finite Cesaro
average P_T-bar and its limit Pi, so assembly runs column by column in a
thread pool and each column is computed with a fixed summation order.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional

import numpy as np

from config.settings import ToleranceConfig
from src.models.spectrum import EigenvalueClasses, SnapshotKind, Spectrum, StochasticSnapshot
from src.utils.errors import InvariantViolation, PostconditionFailed
from src.utils.logger import get_logger

logger = get_logger(__name__)

# Above this many stored floats the projected columns are recomputed on demand
STACK_LIMIT = 50_000_000


def sinc_kernel(class_values: np.ndarray, T: float) -> np.ndarray:
    """
    K_jl = Re (1/T) int_0^T exp(i (mu_l - mu_j) t) dt = sin(D T) / (D T).

    The imaginary part is antisymmetric in (j, l) and cancels in every
    entry of P_T-bar, so only the real kernel is kept.
    """
    delta = class_values[None, :] - class_values[:, None]
    return np.sinc(delta * T / np.pi)


class ClassProjector:
    """
    Column access to the class projections of a spectrum.

    projected(x) is the N x M matrix whose column j is E_j[:, x].
    """

    def __init__(self, spectrum: Spectrum, classes: EigenvalueClasses, max_workers: int = 4):
        self.spectrum = spectrum
        self.classes = classes
        self.max_workers = max_workers
        self.n_states = spectrum.n_states
        self.values = np.array(classes.class_values, dtype=float)
        self.indicator = classes.indicator(self.n_states)
        self.logger = get_logger(__name__)
        self._stack: Optional[np.ndarray] = None

        if len(classes.classes) and sum(classes.sizes) != self.n_states:
            raise InvariantViolation("class-partition", "classes do not cover the spectrum")

    @property
    def n_classes(self) -> int:
        return self.values.size

    def projected(self, x: int) -> np.ndarray:
        if self._stack is not None:
            return self._stack[x]
        phi = self.spectrum.eigenvectors
        return phi @ (phi[x, :][:, None] * self.indicator)

    def stack(self) -> np.ndarray:
        """All projected columns as an (N, N, M) array, cached when it fits STACK_LIMIT."""
        if self._stack is not None:
            return self._stack
        stack = np.stack([self.projected(x) for x in range(self.n_states)])
        if stack.size <= STACK_LIMIT:
            stack.setflags(write=False)
            self._stack = stack
        return stack

    def assemble(self, column: Callable[[int], np.ndarray]) -> np.ndarray:
        """Assemble an N x N matrix column by column in a worker pool."""
        entries = np.empty((self.n_states, self.n_states))
        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            for x, values in enumerate(executor.map(column, range(self.n_states))):
                entries[:, x] = values
        return entries

    def cesaro_column(self, x: int, kernel: np.ndarray) -> np.ndarray:
        ex = self.projected(x)
        return ((ex @ kernel) * ex).sum(axis=1)

    def limit_column(self, x: int) -> np.ndarray:
        ex = self.projected(x)
        return (ex * ex).sum(axis=1)


def propagator(spectrum: Spectrum, t: float, tolerances: Optional[ToleranceConfig] = None) -> np.ndarray:
    """
    Unitary U_t = sum_k exp(-i lambda_k t) |phi_k><phi_k|.

    Args:
        spectrum: Eigenpairs of P
        t: Walk time

    Returns:
        Complex N x N unitary matrix

    Raises:
        InvariantViolation: If t is not finite or U_t misses the unitarity tolerance
    """
    tolerances = tolerances or ToleranceConfig()
    if not np.isfinite(t):
        raise InvariantViolation("finite-time", f"walk time must be finite, got {t}")
    phi = spectrum.eigenvectors
    phases = np.exp(-1j * spectrum.eigenvalues * t)
    unitary = (phi * phases) @ phi.T
    residual = float(np.abs(unitary.conj().T @ unitary - np.eye(spectrum.n_states)).max())
    if residual > tolerances.unitarity:
        raise InvariantViolation("unitarity", f"U_t deviates from unitary by {residual:.3e} at t={t}")
    return unitary


def measurement_matrix(
    spectrum: Spectrum,
    t: float,
    tolerances: Optional[ToleranceConfig] = None
) -> StochasticSnapshot:
    """Measurement matrix P_t(y, x) = |<y|U_t|x>|^2."""
    tolerances = tolerances or ToleranceConfig()
    unitary = propagator(spectrum, t, tolerances)
    return StochasticSnapshot(
        entries=np.abs(unitary) ** 2,
        kind=SnapshotKind.MEASUREMENT,
        parameter=float(t),
        source_label=spectrum.source_label,
        tolerance=tolerances.snapshot_stochasticity,
        negative_clamp=tolerances.negative_clamp,
    )


def cesaro_finite(
    spectrum: Spectrum,
    classes: EigenvalueClasses,
    T: float,
    tolerances: Optional[ToleranceConfig] = None,
    max_workers: int = 4,
    projector: Optional[ClassProjector] = None
) -> StochasticSnapshot:
    """
    Finite-time Cesaro matrix P_T-bar = (1/T) int_0^T P_t dt in closed form.

    Args:
        spectrum: Eigenpairs of P
        classes: Eigenvalue classes of the spectrum
        T: Averaging horizon (> 0)
        tolerances: Numeric tolerances (defaults used when omitted)
        max_workers: Column assembly workers
        projector: Reusable projector for repeated evaluations

    Returns:
        CesaroFinite snapshot

    Raises:
        InvariantViolation: If T is not positive and finite
    """
    tolerances = tolerances or ToleranceConfig()
    if not (np.isfinite(T) and T > 0):
        raise InvariantViolation("positive-horizon", f"T must be positive and finite, got {T}")
    projector = projector or ClassProjector(spectrum, classes, max_workers)
    kernel = sinc_kernel(projector.values, T)
    entries = projector.assemble(lambda x: projector.cesaro_column(x, kernel))
    logger.debug(f"Assembled Cesaro matrix of {spectrum.source_label} at T={T:g}")
    return StochasticSnapshot(
        entries=entries,
        kind=SnapshotKind.CESARO_FINITE,
        parameter=float(T),
        source_label=spectrum.source_label,
        tolerance=tolerances.snapshot_stochasticity,
        negative_clamp=tolerances.negative_clamp,
    )


def cesaro_infinite(
    spectrum: Spectrum,
    classes: EigenvalueClasses,
    tolerances: Optional[ToleranceConfig] = None,
    max_workers: int = 4,
    projector: Optional[ClassProjector] = None,
    enforce_floor: bool = True
) -> StochasticSnapshot:
    """
    Limit Pi(y, x) = sum_j E_j(y, x)^2 of the Cesaro matrices.

    Raises:
        PostconditionFailed: If enforce_floor is set and an entry falls below 1/N^2
    """
    tolerances = tolerances or ToleranceConfig()
    projector = projector or ClassProjector(spectrum, classes, max_workers)
    entries = projector.assemble(projector.limit_column)
    floor = 1.0 / spectrum.n_states ** 2
    if enforce_floor and entries.min() < floor - tolerances.negative_clamp:
        raise PostconditionFailed(
            "pi-entry-floor",
            f"Pi of {spectrum.source_label} has entry {entries.min():.3e} below 1/N^2 = {floor:.3e}"
        )
    return StochasticSnapshot(
        entries=entries,
        kind=SnapshotKind.CESARO_INFINITE,
        source_label=spectrum.source_label,
        tolerance=tolerances.snapshot_stochasticity,
        negative_clamp=tolerances.negative_clamp,
    )
