"""
Spectral data models: eigenpairs, eigenvalue classes, stochastic snapshots
and distributions.
Follows Single Responsibility Principle: Only defines data structures.
"""

from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.models.graph import GraphSpec
from src.utils.errors import InvariantViolation
from src.utils.validators import check_column_stochastic, check_symmetric


def _freeze(array: np.ndarray, dtype=float) -> np.ndarray:
    frozen = np.array(array, dtype=dtype)
    frozen.setflags(write=False)
    return frozen


class Spectrum(BaseModel):
    """
    Orthonormal eigenpairs of a symmetric matrix, eigenvalues descending.
    Column k of `eigenvectors` is the eigenvector of `eigenvalues[k]`.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source: GraphSpec
    source_label: str
    orthonormality_residual: float = 0.0
    reconstruction_residual: float = 0.0

    @model_validator(mode='after')
    def freeze_arrays(self) -> "Spectrum":
        values = _freeze(self.eigenvalues)
        vectors = _freeze(self.eigenvectors)
        if vectors.shape != (values.size, values.size):
            raise InvariantViolation("spectrum-shape", f"{vectors.shape} vs {values.size} eigenvalues")
        if np.any(np.diff(values) > 0):
            raise InvariantViolation("spectrum-order", "eigenvalues must be sorted descending")
        object.__setattr__(self, 'eigenvalues', values)
        object.__setattr__(self, 'eigenvectors', vectors)
        return self

    @property
    def n_states(self) -> int:
        return int(self.eigenvalues.size)


class EigenvalueClasses(BaseModel):
    """Partition of spectrum indices into groups of (numerically) equal eigenvalues."""
    model_config = ConfigDict(frozen=True)

    classes: List[Tuple[int, ...]]
    class_values: List[float]
    tolerance: float = Field(..., gt=0)
    symbolic: bool = False

    @model_validator(mode='after')
    def validate_partition(self) -> "EigenvalueClasses":
        if len(self.classes) != len(self.class_values):
            raise InvariantViolation("class-values", "one representative value per class is required")
        indices = sorted(i for cls in self.classes for i in cls)
        if indices != list(range(len(indices))):
            raise InvariantViolation("class-partition", "classes must partition 0..N-1")
        return self

    @property
    def sizes(self) -> List[int]:
        return [len(cls) for cls in self.classes]

    def indicator(self, n_states: int) -> np.ndarray:
        """N x M 0/1 matrix with G[k, j] = 1 iff index k is in class j."""
        matrix = np.zeros((n_states, len(self.classes)))
        for j, members in enumerate(self.classes):
            matrix[list(members), j] = 1.0
        return matrix


class SnapshotKind(str, Enum):
    """Construction tag of a stochastic snapshot."""
    MEASUREMENT = "P_t"
    CESARO_FINITE = "CesaroFinite"
    CESARO_INFINITE = "CesaroInfinite"
    CLASSICAL_POWER = "ClassicalPower"
    POISSON_AVERAGE = "PoissonAverage"
    CLASSICAL_CESARO = "ClassicalCesaro"


class StochasticSnapshot(BaseModel):
    """
    Dense doubly stochastic matrix tagged with its construction.
    Tiny negative round-off entries are clamped to zero on construction.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    entries: np.ndarray
    kind: SnapshotKind
    parameter: Optional[float] = None
    source_label: str = ""
    tolerance: float = 1e-10
    negative_clamp: float = 1e-12

    @model_validator(mode='after')
    def validate_entries(self) -> "StochasticSnapshot":
        entries = np.array(self.entries, dtype=float)
        if entries.size and entries.min() < -self.negative_clamp:
            raise InvariantViolation("snapshot-nonnegative", f"entry {entries.min():.3e} below clamp")
        entries = np.clip(entries, 0.0, None)
        check_column_stochastic(entries, self.tolerance, f"{self.kind.value} snapshot")
        check_symmetric(entries, self.tolerance, f"{self.kind.value} snapshot")
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)
        return self

    @property
    def n_states(self) -> int:
        return int(self.entries.shape[0])

    def column(self, x: int) -> np.ndarray:
        return self.entries[:, x]

    def to_dict(self) -> dict:
        """Snapshot JSON schema: matrix schema plus kind and parameter."""
        return {
            'n': self.n_states,
            'kind': self.kind.value,
            'parameter': self.parameter,
            'source': self.source_label,
            'rows': self.entries.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StochasticSnapshot":
        return cls(
            entries=np.array(data['rows'], dtype=float),
            kind=SnapshotKind(data['kind']),
            parameter=data.get('parameter'),
            source_label=data.get('source', ""),
        )


class Distribution(BaseModel):
    """Probability vector over the state space."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    probs: np.ndarray
    tolerance: float = 1e-12

    @model_validator(mode='after')
    def validate_probs(self) -> "Distribution":
        probs = np.array(self.probs, dtype=float)
        if probs.ndim != 1:
            raise InvariantViolation("distribution-shape", f"expected a vector, got shape {probs.shape}")
        if probs.size and probs.min() < -self.tolerance:
            raise InvariantViolation("distribution-nonnegative", f"entry {probs.min():.3e}")
        if abs(probs.sum() - 1.0) > max(self.tolerance, 1e-12 * probs.size):
            raise InvariantViolation("distribution-sum", f"entries sum to {probs.sum():.15f}")
        probs = np.clip(probs, 0.0, None)
        probs.setflags(write=False)
        object.__setattr__(self, 'probs', probs)
        return self

    @classmethod
    def uniform(cls, n_states: int) -> "Distribution":
        return cls(probs=np.full(n_states, 1.0 / n_states))

    @classmethod
    def point_mass(cls, n_states: int, x: int) -> "Distribution":
        probs = np.zeros(n_states)
        probs[x] = 1.0
        return cls(probs=probs)

    @property
    def n_states(self) -> int:
        return int(self.probs.size)
