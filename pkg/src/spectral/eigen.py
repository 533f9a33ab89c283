"""
Symmetric eigendecomposition and eigenvalue class grouping.
Uses tenacity to retry the decomposition across LAPACK drivers.
"""

from typing import Optional

import numpy as np
import scipy.linalg
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from config.settings import ToleranceConfig
from src.models.graph import TransitionMatrix
from src.models.spectrum import EigenvalueClasses, Spectrum
from src.utils.errors import EigenSolverError, InseparableEigenvalues, InvariantViolation
from src.utils.logger import get_logger

logger = get_logger(__name__)

DRIVERS = ("evr", "evd", "ev")


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry of every eigenvector positive (first one on ties)."""
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _solve(entries: np.ndarray, driver: str, tolerances: ToleranceConfig):
    values, vectors = scipy.linalg.eigh(entries, driver=driver, check_finite=True)
    order = np.argsort(-values, kind='stable')
    values = values[order]
    vectors = _fix_signs(vectors[:, order])

    n_states = entries.shape[0]
    orthonormality = float(np.abs(vectors.T @ vectors - np.eye(n_states)).max())
    if orthonormality > tolerances.orthonormality:
        raise EigenSolverError(f"driver '{driver}' returned non-orthonormal eigenvectors", orthonormality)
    reconstruction = float(np.abs(entries - (vectors * values) @ vectors.T).max())
    if reconstruction > tolerances.eigen_residual:
        raise EigenSolverError(f"driver '{driver}' failed to reconstruct the matrix", reconstruction)
    return values, vectors, orthonormality, reconstruction


def eigendecompose(matrix: TransitionMatrix, tolerances: Optional[ToleranceConfig] = None) -> Spectrum:
    """
    Orthonormal eigendecomposition of a symmetric transition matrix.

    Eigenvalues come back descending and each eigenvector has its
    largest-magnitude entry positive, so the output is deterministic.

    Args:
        matrix: Symmetric transition matrix
        tolerances: Residual tolerances (defaults used when omitted)

    Returns:
        Spectrum satisfying the orthonormality and reconstruction residuals

    Raises:
        EigenSolverError: If every LAPACK driver fails or misses the residuals
    """
    tolerances = tolerances or ToleranceConfig()
    entries = np.asarray(matrix.entries)
    try:
        for attempt in Retrying(
            stop=stop_after_attempt(len(DRIVERS)),
            retry=retry_if_exception_type((np.linalg.LinAlgError, EigenSolverError)),
            reraise=True,
        ):
            with attempt:
                driver = DRIVERS[attempt.retry_state.attempt_number - 1]
                if attempt.retry_state.attempt_number > 1:
                    logger.warning(f"Retrying eigendecomposition of {matrix.label} with driver '{driver}'")
                values, vectors, orthonormality, reconstruction = _solve(entries, driver, tolerances)
    except np.linalg.LinAlgError as e:
        raise EigenSolverError(f"eigendecomposition of {matrix.label} did not converge: {e}")

    logger.debug(
        f"Eigendecomposed {matrix.label}: N={entries.shape[0]}, "
        f"orthonormality={orthonormality:.2e}, reconstruction={reconstruction:.2e}"
    )
    return Spectrum(
        eigenvalues=values,
        eigenvectors=vectors,
        source=matrix.spec,
        source_label=matrix.label,
        orthonormality_residual=orthonormality,
        reconstruction_residual=reconstruction,
    )


def default_class_tolerance(spectrum: Spectrum, tolerances: Optional[ToleranceConfig] = None) -> float:
    """Relative tolerance scaled by the spread of the spectrum."""
    tolerances = tolerances or ToleranceConfig()
    spread = float(spectrum.eigenvalues[0] - spectrum.eigenvalues[-1])
    return tolerances.class_relative * (spread if spread > 0 else 1.0)


def group_eigenvalues(
    spectrum: Spectrum,
    tol: Optional[float] = None,
    tolerances: Optional[ToleranceConfig] = None
) -> EigenvalueClasses:
    """
    Group spectrum indices into classes of equal eigenvalues.

    Adjacent sorted eigenvalues closer than `tol` share a class. Gaps that
    are neither clearly small nor clearly large are rejected instead of
    silently merged or split.

    Args:
        spectrum: Eigenpairs with descending eigenvalues
        tol: Class tolerance; defaults to class_relative * (lambda_max - lambda_min)
        tolerances: Numeric tolerances (defaults used when omitted)

    Returns:
        EigenvalueClasses partitioning 0..N-1

    Raises:
        InseparableEigenvalues: If a gap lies in (tol, factor * tol]
        InvariantViolation: If a chained class spans more than tol
    """
    tolerances = tolerances or ToleranceConfig()
    if tol is None:
        tol = default_class_tolerance(spectrum, tolerances)
    if tol <= 0:
        raise InvariantViolation("class-tolerance", f"tolerance must be positive, got {tol}")

    values = spectrum.eigenvalues
    factor = tolerances.class_separation_factor
    gaps = values[:-1] - values[1:]
    ambiguous = np.nonzero((gaps > tol) & (gaps <= factor * tol))[0]
    if ambiguous.size:
        gap = float(gaps[ambiguous[0]])
        raise InseparableEigenvalues(gap, tol, factor)

    boundaries = np.nonzero(gaps > tol)[0] + 1
    blocks = np.split(np.arange(values.size), boundaries)
    classes = []
    class_values = []
    for block in blocks:
        span = float(values[block[0]] - values[block[-1]])
        if span > tol:
            raise InvariantViolation(
                "class-span", f"class starting at index {block[0]} spans {span:.3e} > {tol:.3e}; choose a smaller tolerance"
            )
        classes.append(tuple(int(i) for i in block))
        class_values.append(float(values[block].mean()))

    logger.debug(f"Grouped {values.size} eigenvalues of {spectrum.source_label} into {len(classes)} classes")
    return EigenvalueClasses(classes=classes, class_values=class_values, tolerance=tol)
