"""
Quantum-walk samplers: the single loop (one measurement of U_t at a uniform
random t in [0, T]) and the double loop (T' chained single loops), simulated
trial by trial and computed exactly from the Cesaro matrix.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from config.settings import QuantumConfig, SamplingConfig, ToleranceConfig
from src.models.reports import SampleTrace
from src.models.spectrum import Distribution, EigenvalueClasses, Spectrum
from src.sampling.rng import sample_columns, trial_uniforms
from src.spectral.quantum_mixing import alpha_and_threshold, amplification_rounds
from src.spectral.walk import ClassProjector, cesaro_finite
from src.utils.errors import AmplificationUnavailable, InvariantViolation
from src.utils.logger import get_logger
from src.utils.validators import validate_epsilon, validate_state

logger = get_logger(__name__)


class TrialBatch(NamedTuple):
    """Outcome of a batch of trials: final states plus the per-round times and states."""
    trial_ids: np.ndarray
    final_states: np.ndarray
    times: np.ndarray
    states: np.ndarray


class MonteCarloResult(NamedTuple):
    counts: np.ndarray
    traces: List[SampleTrace]


def _validate_horizon(T: float, rounds: int) -> None:
    if not (np.isfinite(T) and T > 0):
        raise InvariantViolation("positive-horizon", f"T must be positive and finite, got {T}")
    if rounds < 1:
        raise InvariantViolation("positive-rounds", f"T' must be >= 1, got {rounds}")


def simulate_trials(
    projector: ClassProjector,
    T: float,
    rounds: int,
    x0: int,
    seed: int,
    trial_ids: Sequence[int],
    tolerances: Optional[ToleranceConfig] = None
) -> TrialBatch:
    """
    Run `rounds` chained single loops for each trial.

    Each round draws (u0, u1) from the trial's stream, measures the walk at
    t = T * u0 from the current state and picks the outcome by inverse CDF
    with u1. Trials sharing a current state are evaluated together:
    column x of U_t is sum_j exp(-i mu_j t) E_j[:, x].

    Args:
        projector: Class projections of the spectrum
        T: Averaging horizon
        rounds: Number of chained measurements T'
        x0: Initial state
        seed: Run seed
        trial_ids: Trial identifiers

    Returns:
        TrialBatch with (K,) final states and (K, rounds) times and states
    """
    tolerances = tolerances or ToleranceConfig()
    _validate_horizon(T, rounds)
    validate_state(x0, projector.n_states)

    trial_ids = np.asarray(trial_ids, dtype=np.int64)
    draws = trial_uniforms(seed, trial_ids, rounds, width=2)
    times = T * draws[:, :, 0]
    states = np.empty((trial_ids.size, rounds), dtype=np.int64)
    current = np.full(trial_ids.size, x0, dtype=np.int64)

    for round_index in range(rounds):
        next_states = np.empty_like(current)
        for x in np.unique(current):
            members = np.nonzero(current == x)[0]
            phases = np.outer(projector.values, times[members, round_index])
            ex = projector.projected(int(x))
            real = ex @ np.cos(phases)
            imag = ex @ np.sin(phases)
            probabilities = real * real + imag * imag
            next_states[members] = sample_columns(
                probabilities, draws[members, round_index, 1], tolerances.negative_clamp
            )
        current = next_states
        states[:, round_index] = current

    return TrialBatch(trial_ids, current.copy(), times, states)


def _trace(batch: TrialBatch, row: int, seed: int, x0: int) -> SampleTrace:
    rounds = [(float(t), int(s)) for t, s in zip(batch.times[row], batch.states[row])]
    return SampleTrace(
        seed=seed,
        trial_id=int(batch.trial_ids[row]),
        initial_state=x0,
        rounds=rounds,
        final_state=int(batch.final_states[row]),
    )


def single_loop(
    spectrum: Spectrum,
    classes: EigenvalueClasses,
    T: float,
    x0: int,
    seed: int,
    trial_id: int = 0,
    projector: Optional[ClassProjector] = None
) -> Tuple[int, SampleTrace]:
    """
    Measure the walk from x0 at a uniform random time in [0, T].

    The output law, averaged over t, is column x0 of the finite Cesaro matrix.

    Raises:
        InvariantViolation: If x0 is out of range or T is not positive
    """
    return double_loop(spectrum, classes, T, 1, x0, seed, trial_id, projector)


def double_loop(
    spectrum: Spectrum,
    classes: EigenvalueClasses,
    T: float,
    rounds: int,
    x0: int,
    seed: int,
    trial_id: int = 0,
    projector: Optional[ClassProjector] = None
) -> Tuple[int, SampleTrace]:
    """
    Chain T' single loops, each starting from the previously measured state.

    The final state's law is column x0 of (P_T-bar)^T'.
    """
    projector = projector or ClassProjector(spectrum, classes)
    batch = simulate_trials(projector, T, rounds, x0, seed, [trial_id])
    return int(batch.final_states[0]), _trace(batch, 0, seed, x0)


def exact_output_law(
    spectrum: Spectrum,
    classes: EigenvalueClasses,
    T: float,
    rounds: int,
    x0: int,
    tolerances: Optional[ToleranceConfig] = None,
    max_workers: int = 4
) -> Distribution:
    """
    Column x0 of (P_T-bar)^T'; T' = 0 gives the point mass at x0.

    Raises:
        InvariantViolation: If x0 is out of range or T' is negative
    """
    tolerances = tolerances or ToleranceConfig()
    validate_state(x0, spectrum.n_states)
    if rounds < 0:
        raise InvariantViolation("nonnegative-rounds", f"T' must be >= 0, got {rounds}")
    law = np.zeros(spectrum.n_states)
    law[x0] = 1.0
    if rounds:
        cesaro = cesaro_finite(spectrum, classes, T, tolerances, max_workers).entries
        for _ in range(rounds):
            law = cesaro @ law
    return Distribution(probs=law / law.sum(), tolerance=1e-10)


def convergence_params(
    spectrum: Spectrum,
    classes: EigenvalueClasses,
    eps: float,
    config: Optional[QuantumConfig] = None,
    tolerances: Optional[ToleranceConfig] = None,
    max_workers: int = 4
) -> Tuple[float, int]:
    """
    Double loop parameters (T, T') reaching eps-closeness to uniform.

    T = tau'_mix and T' = ceil(log_{2/(1+alpha)} 1/eps).

    Raises:
        AmplificationUnavailable: If alpha >= 1 - margin
    """
    tolerances = tolerances or ToleranceConfig()
    eps = validate_epsilon(eps)
    threshold = alpha_and_threshold(spectrum, classes, config, tolerances, max_workers)
    if not threshold.amplification_available:
        raise AmplificationUnavailable(threshold.alpha)
    rounds = amplification_rounds(threshold.alpha, eps)
    logger.info(f"Convergence parameters for {spectrum.source_label}: T={threshold.tau_prime_mix:.6g}, T'={rounds}")
    return threshold.tau_prime_mix, rounds


def run_monte_carlo(
    spectrum: Spectrum,
    classes: EigenvalueClasses,
    T: float,
    rounds: int,
    x0: int,
    config: Optional[SamplingConfig] = None,
    max_workers: int = 4,
    record_traces: bool = False,
    tolerances: Optional[ToleranceConfig] = None
) -> MonteCarloResult:
    """
    Run config.trials independent double loops in chunks on a worker pool.

    Counts are summed over chunks, so the result does not depend on the
    schedule. Traces, when requested, are returned in trial order.
    """
    config = config or SamplingConfig()
    projector = ClassProjector(spectrum, classes, max_workers)
    projector.stack()
    chunks = [
        np.arange(start, min(start + config.chunk_size, config.trials))
        for start in range(0, config.trials, config.chunk_size)
    ]

    def run_chunk(trial_ids: np.ndarray) -> TrialBatch:
        return simulate_trials(projector, T, rounds, x0, config.seed, trial_ids, tolerances)

    counts = np.zeros(spectrum.n_states, dtype=np.int64)
    traces: List[SampleTrace] = []
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        for batch in executor.map(run_chunk, chunks):
            counts += np.bincount(batch.final_states, minlength=spectrum.n_states)
            if record_traces:
                traces.extend(_trace(batch, row, config.seed, x0) for row in range(batch.trial_ids.size))

    logger.info(f"Monte Carlo on {spectrum.source_label}: {config.trials} trials, T={T:.6g}, T'={rounds}")
    return MonteCarloResult(counts, traces)
