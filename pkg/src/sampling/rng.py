"""
Counter-based random streams and inverse-CDF sampling.

Every trial owns an independent Philox stream keyed by (seed, trial_id),
so results do not depend on how trials are split across workers.
"""

from typing import Sequence

import numpy as np


def trial_generator(seed: int, trial_id: int) -> np.random.Generator:
    """Independent generator for one (seed, trial_id) pair."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(trial_id)])))


def trial_uniforms(seed: int, trial_ids: Sequence[int], count: int, width: int = 1) -> np.ndarray:
    """
    Pre-draw the uniforms of each trial.

    Args:
        seed: Run seed
        trial_ids: Trial identifiers
        count: Draws per trial (rounds or steps)
        width: Uniforms per draw

    Returns:
        Array of shape (len(trial_ids), count, width)
    """
    draws = np.empty((len(trial_ids), count, width))
    for row, trial_id in enumerate(trial_ids):
        draws[row] = trial_generator(seed, trial_id).random((count, width))
    return draws


def sample_columns(probabilities: np.ndarray, uniforms: np.ndarray, negative_clamp: float = 1e-12) -> np.ndarray:
    """
    Draw one state per column of `probabilities` by inverse CDF over the fixed state order.

    Entries down to -negative_clamp are clamped to zero and each column is
    renormalized before the draw.

    Args:
        probabilities: N x K array, column k is the law of trial k
        uniforms: Length-K uniforms in [0, 1)

    Returns:
        Length-K integer array of sampled states

    Raises:
        ValueError: If a column has an entry below -negative_clamp
    """
    if probabilities.size and probabilities.min() < -negative_clamp:
        raise ValueError(f"probability {probabilities.min():.3e} is below the clamp tolerance")
    clamped = np.clip(probabilities, 0.0, None)
    cumulative = np.cumsum(clamped, axis=0)
    targets = uniforms * cumulative[-1]
    states = (cumulative <= targets[None, :]).sum(axis=0)
    return np.minimum(states, probabilities.shape[0] - 1)
