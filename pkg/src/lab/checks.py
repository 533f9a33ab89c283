"""
Numerical checks of the uniform-limit, amplification, cancellation,
periodicity and complete-graph results.

Asymptotic statements are checked as finite facts: floors recorded in
golden tables, exact closed forms, and evidence tables.
"""

import math
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from config.settings import Settings
from src.graphs.graph_models import build_transition, graph_diameter
from src.markov.distances import best_entry_floor, max_pairwise_column_distance
from src.markov.mixing import spectral_gap
from src.models.graph import GraphFamily, GraphSpec, TransitionMatrix
from src.models.spectrum import EigenvalueClasses, Spectrum
from src.spectral.eigen import eigendecompose, group_eigenvalues
from src.spectral.orbits import (
    check_orbit_preconditions,
    enumerate_orbits,
    torus_orbit_classes,
)
from src.spectral.quantum_mixing import CesaroDistance, alpha_and_threshold
from src.spectral.walk import cesaro_infinite, propagator
from src.utils.errors import InvariantViolation
from src.utils.logger import get_logger

logger = get_logger(__name__)


class PiFloor(NamedTuple):
    min_entry: float
    scaled_min_entry: float
    passes: bool


class ClassCheck(NamedTuple):
    """Outcome of comparing numerical classes with signed-permutation orbits."""
    matches: bool
    orbit_sizes: List[int]
    mismatch: Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]


class PeriodicityResult(NamedTuple):
    deviation: float
    phase: float


class CompleteGraphReport(NamedTuple):
    rows: List[Dict[str, float]]
    alpha: float
    alpha_expected: float
    amplification_degenerate: bool
    passes: bool


def pi_floor_report(
    matrix: TransitionMatrix,
    settings: Optional[Settings] = None,
    classes: Optional[EigenvalueClasses] = None,
    spectrum: Optional[Spectrum] = None
) -> PiFloor:
    """
    Smallest entry of Pi, its N-scaled value and whether it reaches 1/N^2.
    """
    settings = settings or Settings()
    tolerances = settings.tolerances
    spectrum = spectrum or eigendecompose(matrix, tolerances)
    classes = classes or group_eigenvalues(spectrum, tolerances=tolerances)
    limit = cesaro_infinite(spectrum, classes, tolerances, settings.concurrency.max_workers, enforce_floor=False)
    min_entry = float(limit.entries.min())
    n_states = matrix.n_states
    passes = min_entry >= 1.0 / n_states ** 2 - tolerances.negative_clamp
    logger.info(f"Pi floor for {matrix.label}: min={min_entry:.6e}, N*min={n_states * min_entry:.6f}")
    return PiFloor(min_entry, n_states * min_entry, passes)


def analytic_floor(p: int, d: int) -> float:
    """
    Lower bound on N * min Pi implied by the cancellation count and the orbit
    class sizes: (p / (8d)^d)^d / (2^d d!) classes each contribute at least 1/N^2.
    Informational only; it is far below measured values at small p.
    """
    classes_reached = (p / (8 * d) ** d) ** d / (2 ** d * math.factorial(d))
    return classes_reached / p ** d


def torus_amplification_report(
    p_list: Sequence[int],
    d: int,
    floor: float,
    settings: Optional[Settings] = None
) -> List[Dict[str, float]]:
    """
    Evidence table of N * min Pi on torus(p, d) using symbolic orbit classes.

    Args:
        p_list: Prime side lengths
        d: Dimension
        floor: Golden floor for N * min Pi at this d

    Returns:
        Rows (p, d, N, n_min_entry, floor, analytic_floor, alpha, max_class_size,
        class_size_bound, beta, gamma, entry_floor_alpha_bound, passes)

    Raises:
        InvariantViolation: If some p is not prime
    """
    settings = settings or Settings()
    tolerances = settings.tolerances
    rows = []
    for p in p_list:
        check_orbit_preconditions(p, d)
        matrix = build_transition(GraphSpec(family=GraphFamily.TORUS, p=p, d=d), tolerances)
        spectrum = eigendecompose(matrix, tolerances)
        classes = torus_orbit_classes(spectrum, p, d, tolerances=tolerances)
        limit = cesaro_infinite(spectrum, classes, tolerances, settings.concurrency.max_workers)
        n_states = matrix.n_states
        scaled = float(n_states * limit.entries.min())
        alpha = max_pairwise_column_distance(limit)
        entry_floor = best_entry_floor(limit)
        class_bound = 2 ** d * math.factorial(d)
        max_class = max(classes.sizes)
        passes = (
            scaled >= floor
            and max_class <= class_bound
            and alpha < 1.0
            and alpha <= entry_floor.bound + tolerances.comparison_slack
        )
        rows.append({
            'p': p,
            'd': d,
            'N': n_states,
            'n_min_entry': scaled,
            'floor': floor,
            'analytic_floor': analytic_floor(p, d),
            'alpha': alpha,
            'max_class_size': max_class,
            'class_size_bound': class_bound,
            'beta': entry_floor.beta,
            'gamma': entry_floor.gamma,
            'entry_floor_alpha_bound': entry_floor.bound,
            'passes': passes,
        })
        logger.info(f"torus({p},{d}): N*min Pi = {scaled:.6f} (floor {floor}), alpha = {alpha:.6f}")
    return rows


def multiplicity_class_check(p: int, d: int, settings: Optional[Settings] = None) -> ClassCheck:
    """
    Compare the numerical eigenvalue classes of torus(p, d) with the
    signed-permutation orbits of Z_p^d.

    The match is exact when every numerical class is one orbit. Otherwise
    the first pair of orbits sharing a numerical class is reported.

    Raises:
        InvariantViolation: If p is not prime
    """
    settings = settings or Settings()
    tolerances = settings.tolerances
    check_orbit_preconditions(p, d)
    matrix = build_transition(GraphSpec(family=GraphFamily.TORUS, p=p, d=d), tolerances)
    spectrum = eigendecompose(matrix, tolerances)
    classes = group_eigenvalues(spectrum, tolerances=tolerances)
    orbits = enumerate_orbits(p, d)
    orbit_sizes = [orbit.size for orbit in orbits]

    tol = classes.tolerance
    numerical = list(zip(classes.class_values, classes.sizes))
    orbit_iter = iter(orbits)
    for value, size in numerical:
        covered = 0
        first = None
        while covered < size:
            orbit = next(orbit_iter, None)
            if orbit is None or abs(orbit.eigenvalue - value) > max(tol, 1e-9):
                logger.error(f"torus({p},{d}): numerical class at {value:.12f} does not match the orbits")
                return ClassCheck(False, orbit_sizes, None)
            if first is not None:
                logger.error(f"torus({p},{d}): orbits {first.key} and {orbit.key} share one eigenvalue class")
                return ClassCheck(False, orbit_sizes, (first.key, orbit.key))
            first = orbit
            covered += orbit.size
        if covered != size:
            return ClassCheck(False, orbit_sizes, None)
    return ClassCheck(True, orbit_sizes, None)


def centered_residue(values: np.ndarray, n: int) -> np.ndarray:
    """Representatives in (-n/2, n/2]."""
    residues = np.mod(values, n)
    return np.where(residues > n / 2, residues - n, residues)


def cancellation_count(n: int, d: int, y: Sequence[int]) -> int:
    """
    Number of x in Z_n with x * y_i mod n in [-n/8d, n/8d] for every i.

    Raises:
        InvariantViolation: If n < 2, y has the wrong length, or the count
            falls below n / (8d)^d
    """
    if n < 2:
        raise InvariantViolation("cancellation-modulus", f"n must be >= 2, got {n}")
    y = np.asarray(y, dtype=np.int64)
    if y.shape != (d,):
        raise InvariantViolation("cancellation-dimension", f"y has shape {y.shape}, expected ({d},)")
    x = np.arange(n, dtype=np.int64)
    residues = centered_residue(np.outer(x, y % n), n)
    count = int(np.all(np.abs(residues) <= n / (8 * d), axis=1).sum())
    floor = n / (8 * d) ** d
    if count < floor:
        raise InvariantViolation("cancellation-count", f"count {count} < n/(8d)^d = {floor:.3f} for y={y.tolist()}")
    return count


def periodicity_check(spectrum: Spectrum, T: float, settings: Optional[Settings] = None) -> PeriodicityResult:
    """
    Distance of U_T from the nearest global phase e^{i theta} I (max-entry norm).

    A residual near zero means U is periodic with period T, hence the finite
    Cesaro matrix at T equals Pi.
    """
    settings = settings or Settings()
    if T <= 0:
        raise InvariantViolation("positive-horizon", f"T must be positive, got {T}")
    unitary = propagator(spectrum, T, settings.tolerances)
    identity = np.eye(spectrum.n_states)

    def residual(theta: float) -> float:
        return float(np.abs(unitary - np.exp(1j * theta) * identity).max())

    start = float(np.angle(np.trace(unitary)))
    fit = minimize_scalar(residual, bounds=(start - 0.5, start + 0.5), method='bounded',
                          options={'xatol': 1e-12})
    theta, deviation = (float(fit.x), float(fit.fun)) if fit.fun < residual(start) else (start, residual(start))
    theta = float(np.angle(np.exp(1j * theta)))
    logger.debug(f"Periodicity of {spectrum.source_label} at T={T:.6g}: residual {deviation:.3e}")
    return PeriodicityResult(deviation, theta)


def complete_graph_negative_result(
    size: int,
    t_list: Sequence[float],
    settings: Optional[Settings] = None
) -> CompleteGraphReport:
    """
    Closed-form checks on complete(N, self_loops): U_t = I + P(e^{-it} - 1),
    off-diagonal |U_t(y, x)|^2 <= 4/N^2 and alpha(Pi) = 1 - 2/N.
    """
    settings = settings or Settings()
    tolerances = settings.tolerances
    matrix = build_transition(GraphSpec(family=GraphFamily.COMPLETE, size=size, with_self_loops=True), tolerances)
    spectrum = eigendecompose(matrix, tolerances)
    classes = group_eigenvalues(spectrum, tolerances=tolerances)
    identity = np.eye(size)

    rows = []
    all_pass = True
    for t in t_list:
        unitary = propagator(spectrum, t, tolerances)
        closed_form = identity + matrix.entries * (np.exp(-1j * t) - 1.0)
        deviation = float(np.abs(unitary - closed_form).max())
        off_diagonal = np.abs(unitary[~np.eye(size, dtype=bool)]) ** 2
        max_off = float(off_diagonal.max()) if off_diagonal.size else 0.0
        passes = deviation <= tolerances.unitarity and max_off <= 4.0 / size ** 2 + tolerances.negative_clamp
        all_pass = all_pass and passes
        rows.append({
            't': float(t),
            'closed_form_deviation': deviation,
            'max_off_diagonal_probability': max_off,
            'off_diagonal_bound': 4.0 / size ** 2,
            'phase_gap': float(abs(np.exp(-1j * t) - 1.0)),
            'passes': passes,
        })

    limit = cesaro_infinite(spectrum, classes, tolerances, settings.concurrency.max_workers)
    alpha = max_pairwise_column_distance(limit)
    expected = 1.0 - 2.0 / size
    alpha_ok = abs(alpha - expected) <= 1e-9
    degenerate = size > 2 and alpha >= expected - 1e-9
    if degenerate:
        logger.warning(f"complete({size}) has alpha = {alpha:.12f} = 1 - 2/N; amplification degrades as N grows")
    return CompleteGraphReport(rows, alpha, expected, degenerate, all_pass and alpha_ok)


def diameter_bound_report(matrix: TransitionMatrix, settings: Optional[Settings] = None) -> Dict[str, float]:
    """
    Evidence row (diameter, gap^{-1/2} log N, tau'_mix) for scaling plots.

    The gap used is 1 - lambda_2 with lambda_2 the second-largest signed
    eigenvalue, which stays positive for periodic chains.
    """
    settings = settings or Settings()
    tolerances = settings.tolerances
    workers = settings.concurrency.max_workers
    spectrum = eigendecompose(matrix, tolerances)
    classes = group_eigenvalues(spectrum, tolerances=tolerances)
    distance = CesaroDistance(spectrum, classes, workers)
    threshold = alpha_and_threshold(spectrum, classes, settings.quantum, tolerances, workers, distance)
    n_states = matrix.n_states
    second = float(spectrum.eigenvalues[1]) if n_states > 1 else 0.0
    gap = max(1.0 - second, 1e-300)
    diameter = graph_diameter(matrix)
    return {
        'graph': matrix.label,
        'N': n_states,
        'diameter': diameter,
        'delta': spectral_gap(matrix).delta,
        'gap_scale': gap ** -0.5 * math.log(n_states) if n_states > 1 else 0.0,
        'tau_prime_mix': threshold.tau_prime_mix,
        'ratio_to_diameter': threshold.tau_prime_mix / diameter if diameter else 0.0,
    }
