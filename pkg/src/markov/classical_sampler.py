"""
Classical sampling by simulating the chain: fixed step counts, the
continuous-time (Poisson-timed) walk, and the amplified double loop.
"""

import math
from typing import List, Sequence, Tuple

import numpy as np

from src.models.graph import TransitionMatrix
from src.models.reports import SampleTrace
from src.sampling.rng import sample_columns, trial_generator, trial_uniforms
from src.utils.errors import InvariantViolation
from src.utils.logger import get_logger
from src.utils.validators import validate_epsilon, validate_state

logger = get_logger(__name__)


def _walk(matrix: TransitionMatrix, states: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """Advance every trial by one step per column of uniforms; returns the (K, steps) path."""
    path = np.empty(uniforms.shape, dtype=np.int64)
    for step in range(uniforms.shape[1]):
        states = sample_columns(matrix.entries[:, states], uniforms[:, step])
        path[:, step] = states
    return path


def classical_trials(
    matrix: TransitionMatrix,
    steps: int,
    x0: int,
    seed: int,
    trial_ids: Sequence[int]
) -> np.ndarray:
    """
    Final states of many independent runs of `steps` chain steps from x0.

    Returns:
        Length-K integer array
    """
    validate_state(x0, matrix.n_states)
    if steps < 0:
        raise InvariantViolation("nonnegative-steps", f"steps must be >= 0, got {steps}")
    states = np.full(len(trial_ids), x0, dtype=np.int64)
    if steps == 0:
        return states
    uniforms = trial_uniforms(seed, trial_ids, steps)[:, :, 0]
    return _walk(matrix, states, uniforms)[:, -1]


def classical_sample(
    matrix: TransitionMatrix,
    steps: int,
    x0: int,
    seed: int,
    trial_id: int = 0
) -> Tuple[int, SampleTrace]:
    """
    Apply P to the current state `steps` times.

    Args:
        matrix: Transition matrix
        steps: Number of chain steps (>= 0)
        x0: Initial state
        seed: Run seed
        trial_id: Stream index

    Returns:
        Final state and the trace of (step, state) rounds

    Raises:
        InvariantViolation: If x0 is out of range or steps is negative
    """
    validate_state(x0, matrix.n_states)
    if steps < 0:
        raise InvariantViolation("nonnegative-steps", f"steps must be >= 0, got {steps}")
    rounds: List[Tuple[float, int]] = []
    if steps:
        uniforms = trial_uniforms(seed, [trial_id], steps)[:, :, 0]
        path = _walk(matrix, np.array([x0]), uniforms)[0]
        rounds = [(float(step + 1), int(state)) for step, state in enumerate(path)]
    final = rounds[-1][1] if rounds else x0
    trace = SampleTrace(seed=seed, trial_id=trial_id, initial_state=x0, rounds=rounds, final_state=final)
    return final, trace


def classical_continuous_sample(
    matrix: TransitionMatrix,
    t: float,
    x0: int,
    seed: int,
    trial_id: int = 0
) -> Tuple[int, SampleTrace]:
    """Continuous-time walk: a Poisson(t) number of chain steps, whose law is exp(-(I - P) t)."""
    validate_state(x0, matrix.n_states)
    if t < 0:
        raise InvariantViolation("nonnegative-time", f"t must be >= 0, got {t}")
    rng = trial_generator(seed, trial_id)
    steps = int(rng.poisson(t))
    states = np.array([x0])
    rounds: List[Tuple[float, int]] = []
    for step in range(steps):
        states = sample_columns(matrix.entries[:, states], rng.random(1))
        rounds.append((float(step + 1), int(states[0])))
    final = rounds[-1][1] if rounds else x0
    return final, SampleTrace(seed=seed, trial_id=trial_id, initial_state=x0, rounds=rounds, final_state=final)


def classical_double_loop(
    matrix: TransitionMatrix,
    tau_mix: int,
    eps: float,
    x0: int,
    seed: int,
    trial_id: int = 0
) -> Tuple[int, SampleTrace]:
    """
    Amplified sampler: ceil(ln 1/eps) outer rounds of tau_mix chain steps.

    The trace holds one entry per outer round: (cumulative steps, state).
    """
    validate_state(x0, matrix.n_states)
    eps = validate_epsilon(eps)
    if tau_mix < 1:
        raise InvariantViolation("positive-threshold", f"tau_mix must be >= 1, got {tau_mix}")
    outer = math.ceil(math.log(1.0 / eps))
    uniforms = trial_uniforms(seed, [trial_id], outer * tau_mix)[:, :, 0]
    path = _walk(matrix, np.array([x0]), uniforms)[0]
    rounds = [
        (float((index + 1) * tau_mix), int(path[(index + 1) * tau_mix - 1]))
        for index in range(outer)
    ]
    final = rounds[-1][1] if rounds else x0
    logger.debug(f"Classical double loop on {matrix.label}: {outer} rounds of {tau_mix} steps")
    return final, SampleTrace(seed=seed, trial_id=trial_id, initial_state=x0, rounds=rounds, final_state=final)
