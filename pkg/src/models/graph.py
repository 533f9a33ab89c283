"""
Graph and transition matrix models with Pydantic validation.
Follows Single Responsibility Principle: Only defines data structures.
"""

from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.utils.errors import InvariantViolation
from src.utils.validators import check_column_stochastic, check_symmetric, is_connected


class GraphFamily(str, Enum):
    """Supported graph families."""
    CYCLE = "cycle"
    TORUS = "torus"
    HYPERCUBE = "hypercube"
    COMPLETE = "complete"
    CUSTOM = "custom"


class GraphSpec(BaseModel):
    """
    Description of a graph family instance.
    Only the parameters of the selected family are meaningful.
    """
    model_config = ConfigDict(frozen=True)

    family: GraphFamily
    n: Optional[int] = Field(default=None, description="cycle length or hypercube dimension")
    p: Optional[int] = Field(default=None, description="torus side length")
    d: Optional[int] = Field(default=None, description="torus dimension")
    size: Optional[int] = Field(default=None, description="number of vertices of the complete graph")
    with_self_loops: bool = False
    adjacency: Optional[List[List[float]]] = None

    @field_validator('n', 'p', 'd', 'size')
    @classmethod
    def validate_positive(cls, v: Optional[int]) -> Optional[int]:
        """Every family parameter is a positive integer."""
        if v is not None and v < 1:
            raise ValueError(f"graph parameters must be positive integers, got {v}")
        return v

    @model_validator(mode='after')
    def validate_family_parameters(self) -> "GraphSpec":
        """Check the per-family size requirements."""
        family = self.family
        if family is GraphFamily.CYCLE and (self.n is None or self.n < 3):
            raise ValueError("cycle requires n >= 3")
        if family is GraphFamily.TORUS and (self.p is None or self.p < 2 or self.d is None or self.d < 1):
            raise ValueError("torus requires p >= 2 and d >= 1")
        if family is GraphFamily.HYPERCUBE and (self.n is None or self.n < 1):
            raise ValueError("hypercube requires n >= 1")
        if family is GraphFamily.COMPLETE and (self.size is None or self.size < 2):
            raise ValueError("complete requires N >= 2")
        if family is GraphFamily.CUSTOM:
            if self.adjacency is None:
                raise ValueError("custom family requires an adjacency matrix")
            rows = self.adjacency
            if not rows or any(len(row) != len(rows) for row in rows):
                raise ValueError("custom adjacency must be square")
            weights = np.array(rows, dtype=float)
            if not np.all(np.isfinite(weights)) or weights.min() < 0:
                raise ValueError("custom adjacency must have finite nonnegative weights")
            if np.abs(weights - weights.T).max() > 0:
                raise ValueError("custom adjacency must be symmetric")
        return self

    @property
    def label(self) -> str:
        """Short human-readable name, e.g. 'torus(5,2)'."""
        if self.family is GraphFamily.CYCLE:
            return f"cycle({self.n})"
        if self.family is GraphFamily.TORUS:
            return f"torus({self.p},{self.d})"
        if self.family is GraphFamily.HYPERCUBE:
            return f"hypercube({self.n})"
        if self.family is GraphFamily.COMPLETE:
            suffix = ",self_loops" if self.with_self_loops else ""
            return f"complete({self.size}{suffix})"
        return f"custom({len(self.adjacency)})"

    @property
    def n_states(self) -> int:
        """Number of vertices implied by the parameters."""
        if self.family is GraphFamily.CYCLE:
            return self.n
        if self.family is GraphFamily.TORUS:
            return self.p ** self.d
        if self.family is GraphFamily.HYPERCUBE:
            return 2 ** self.n
        if self.family is GraphFamily.COMPLETE:
            return self.size
        return len(self.adjacency)

    def to_dict(self) -> dict:
        """Serialize without unset parameters."""
        return self.model_dump(mode='json', exclude_none=True)


class TransitionMatrix(BaseModel):
    """
    Symmetric doubly stochastic irreducible transition matrix with graph provenance.
    The entries array is read-only once constructed.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n_states: int = Field(..., ge=1)
    entries: np.ndarray
    spec: GraphSpec
    degree: Optional[int] = None
    lazy: bool = False
    stochastic_tol: float = 1e-12

    @model_validator(mode='after')
    def validate_entries(self) -> "TransitionMatrix":
        """Symmetry, stochasticity and irreducibility are checked at construction."""
        entries = np.array(self.entries, dtype=float)
        if entries.shape != (self.n_states, self.n_states):
            raise InvariantViolation(
                "dimension", f"entries have shape {entries.shape}, expected ({self.n_states}, {self.n_states})"
            )
        tol = self.stochastic_tol
        check_symmetric(entries, tol, "transition matrix")
        check_column_stochastic(entries, tol, "transition matrix")
        if entries.max() > 1 + tol:
            raise InvariantViolation("entries-in-unit-interval", f"max entry {entries.max():.3e}")
        if not is_connected(entries):
            raise InvariantViolation("irreducible", f"support of {self.spec.label} is disconnected")
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)
        return self

    @property
    def label(self) -> str:
        """Graph label with a lazy marker."""
        return f"lazy({self.spec.label})" if self.lazy else self.spec.label

    @property
    def is_regular(self) -> bool:
        """True when P is the standard walk A/deg of a regular graph."""
        return self.degree is not None

    @property
    def aperiodic(self) -> bool:
        """True when -1 is not an eigenvalue (reported, never enforced)."""
        eigenvalues = np.linalg.eigvalsh(self.entries)
        return bool(eigenvalues.min() > -1 + 1e-9)

    def to_dict(self) -> dict:
        """Matrix JSON schema: {n, spec, lazy, rows}."""
        return {
            'n': self.n_states,
            'spec': self.spec.to_dict(),
            'lazy': self.lazy,
            'degree': self.degree,
            'rows': self.entries.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TransitionMatrix":
        """
        Rebuild a transition matrix from its JSON form.

        Raises:
            InvariantViolation: If the stored rows violate an invariant
            KeyError: If a required key is missing
        """
        return cls(
            n_states=int(data['n']),
            entries=np.array(data['rows'], dtype=float),
            spec=GraphSpec(**data['spec']),
            degree=data.get('degree'),
            lazy=bool(data.get('lazy', False)),
        )
