"""
Input validation utilities.
Provides reusable validation functions following DRY principle.
"""

from typing import Dict, Union

import numpy as np
from scipy.sparse.csgraph import connected_components

from src.utils.errors import InvariantViolation


def validate_epsilon(eps: float, floor: float = 0.0) -> float:
    """
    Validate an accuracy parameter.

    Args:
        eps: Target distance
        floor: Smallest accepted value

    Returns:
        eps as float

    Raises:
        InvariantViolation: If eps is not in (floor, 1)
    """
    eps = float(eps)
    if not 0 < eps < 1:
        raise InvariantViolation("epsilon-range", f"epsilon must lie in (0, 1), got {eps}")
    if eps < floor:
        raise InvariantViolation("epsilon-floor", f"epsilon {eps:.3e} is below the numerical floor {floor:.1e}")
    return eps


def validate_state(index: int, n_states: int) -> int:
    """
    Validate a state index.

    Raises:
        InvariantViolation: If index is outside 0..n_states-1
    """
    if not 0 <= int(index) < n_states:
        raise InvariantViolation("state-range", f"state {index} is outside 0..{n_states - 1}")
    return int(index)


def validate_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    """
    Validate that two arrays share a shape.

    Raises:
        InvariantViolation: On mismatch
    """
    if a.shape != b.shape:
        raise InvariantViolation("shape-match", f"shapes {a.shape} and {b.shape} differ")


def check_column_stochastic(matrix: np.ndarray, tol: float, name: str = "matrix") -> None:
    """
    Check nonnegativity (up to tol) and unit column sums.

    Raises:
        InvariantViolation: If the matrix is not column stochastic
    """
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvariantViolation("square", f"{name} has shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise InvariantViolation("finite-entries", f"{name} has non-finite entries")
    if matrix.size and matrix.min() < -tol:
        raise InvariantViolation("nonnegative-entries", f"{name} has entry {matrix.min():.3e}")
    deviation = np.abs(matrix.sum(axis=0) - 1.0).max() if matrix.size else 0.0
    if deviation > tol:
        raise InvariantViolation("column-sums", f"{name} column sums deviate from 1 by {deviation:.3e}")


def check_symmetric(matrix: np.ndarray, tol: float, name: str = "matrix") -> None:
    """
    Check entrywise symmetry.

    Raises:
        InvariantViolation: If |M - M^T| exceeds tol anywhere
    """
    asymmetry = np.abs(matrix - matrix.T).max() if matrix.size else 0.0
    if asymmetry > tol:
        raise InvariantViolation("symmetric", f"{name} asymmetry {asymmetry:.3e}")


def is_connected(weights: np.ndarray) -> bool:
    """Return True when the support graph of a square matrix is connected."""
    n_components, _ = connected_components((np.abs(weights) > 0).astype(np.int8), directed=False)
    return n_components == 1


FLAG_PARAMS = ("self_loops", "with_self_loops", "lazy")


def parse_params(text: str) -> Dict[str, Union[int, bool]]:
    """
    Parse a `k=v,k=v` parameter string from the command line.

    Args:
        text: Parameter string such as "p=5,d=2" or "N=8,self_loops=true"

    Returns:
        Dictionary of integer or boolean values

    Raises:
        ValueError: If an entry is malformed
    """
    params: Dict[str, Union[int, bool]] = {}
    if not text:
        return params
    for item in text.split(','):
        if '=' not in item:
            raise ValueError(f"Malformed parameter '{item}'. Expected format: key=value")
        key, value = (part.strip() for part in item.split('=', 1))
        lowered = value.lower()
        if lowered in ("true", "yes", "1") and key in FLAG_PARAMS:
            params[key] = True
        elif lowered in ("false", "no", "0") and key in FLAG_PARAMS:
            params[key] = False
        else:
            try:
                params[key] = int(value)
            except ValueError:
                raise ValueError(f"Parameter '{key}' must be an integer, got '{value}'")
    return params


def is_prime(n: int) -> bool:
    """Trial-division primality test for the small moduli used here."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True
