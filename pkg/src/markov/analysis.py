"""
Full mixing analysis of one chain: classical figures from matrix powers and
quantum figures from the Cesaro averages of the walk.
"""

from typing import Optional, Sequence

from config.settings import Settings
from src.markov.mixing import (
    DistanceProfile,
    footnote_assumption,
    mixing_time_bounds,
    mixing_time_exact,
    spectral_gap,
    threshold_and_amplify,
)
from src.models.graph import TransitionMatrix
from src.models.reports import MixingReport, eps_key
from src.spectral.eigen import eigendecompose, group_eigenvalues
from src.spectral.quantum_mixing import CesaroDistance, alpha_and_threshold, quantum_mixing_time
from src.utils.logger import get_logger

logger = get_logger(__name__)


def analyze_chain(
    matrix: TransitionMatrix,
    eps_list: Sequence[float],
    settings: Optional[Settings] = None,
    class_tol: Optional[float] = None,
    include_quantum: bool = True
) -> MixingReport:
    """
    Build the MixingReport of a chain.

    Periodic chains (delta = 0) get no classical mixing times; their quantum
    figures are still computed since the Cesaro averages exist regardless.

    Args:
        matrix: Symmetric irreducible chain
        eps_list: Accuracies to tabulate
        settings: Loaded settings (defaults when omitted)
        class_tol: Explicit eigenvalue class tolerance
        include_quantum: Also compute alpha, eps0 and the quantum mixing times

    Returns:
        MixingReport
    """
    settings = settings or Settings()
    tolerances = settings.tolerances
    gap = spectral_gap(matrix)
    aperiodic = gap.delta > tolerances.comparison_slack

    report = {
        'graph': matrix.label,
        'n_states': matrix.n_states,
        'lazy': matrix.lazy,
        'aperiodic': aperiodic,
        'spectral_gap': gap.delta,
        'second_eigenvalue': gap.lam,
        'footnote_assumption_holds': footnote_assumption(matrix),
    }

    if aperiodic:
        profile = DistanceProfile(matrix)
        threshold = threshold_and_amplify(matrix, eps_list, settings.markov, tolerances, profile)
        report['tau_mix'] = threshold.tau_mix
        report['amplified'] = {eps_key(eps): bound for eps, bound in threshold.amplified.items()}
        report['tau_eps'] = {}
        report['ds_lower'] = {}
        report['ds_upper'] = {}
        for eps in eps_list:
            lower, upper = mixing_time_bounds(matrix, eps, gap, tolerances)
            report['tau_eps'][eps_key(eps)] = mixing_time_exact(
                matrix, eps, settings.markov, tolerances, profile, gap
            )
            report['ds_lower'][eps_key(eps)] = lower
            report['ds_upper'][eps_key(eps)] = upper
    else:
        logger.warning(f"{matrix.label} is periodic; classical mixing times are skipped")

    if include_quantum:
        workers = settings.concurrency.max_workers
        spectrum = eigendecompose(matrix, tolerances)
        classes = group_eigenvalues(spectrum, class_tol, tolerances)
        distance = CesaroDistance(spectrum, classes, workers)
        threshold = alpha_and_threshold(spectrum, classes, settings.quantum, tolerances, workers, distance)
        report['alpha'] = threshold.alpha
        report['eps0'] = threshold.eps0
        report['tau_prime_mix'] = threshold.tau_prime_mix
        report['amplification_available'] = threshold.amplification_available
        report['tau_prime_eps'] = {
            eps_key(eps): quantum_mixing_time(
                spectrum, classes, eps, settings.quantum, tolerances, workers, distance
            )
            for eps in eps_list
            if eps >= tolerances.epsilon_floor
        }

    logger.info(f"Analyzed {matrix.label}: delta={gap.delta:.6f}, tau_mix={report.get('tau_mix')}")
    return MixingReport(**report)
