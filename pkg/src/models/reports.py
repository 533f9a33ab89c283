"""
Report and trace models produced by the analysis, sampling, lab and
trotter services.
Follows Single Responsibility Principle: Only defines data structures.
"""

from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.utils.errors import InvariantViolation


def eps_key(eps: float) -> str:
    """JSON object key for an epsilon value (shortest round-trip repr)."""
    return repr(float(eps))


class MixingReport(BaseModel):
    """
    Classical and quantum mixing figures for one chain.
    Maps keyed by epsilon use `eps_key` so the report serializes as flat JSON.
    """
    graph: str
    n_states: int = Field(..., ge=1)
    lazy: bool = False
    aperiodic: bool = True
    spectral_gap: float = Field(..., ge=0, le=1)
    second_eigenvalue: float = Field(..., ge=0, le=1)
    footnote_assumption_holds: bool = True
    tau_eps: Dict[str, int] = Field(default_factory=dict)
    ds_lower: Dict[str, float] = Field(default_factory=dict)
    ds_upper: Dict[str, float] = Field(default_factory=dict)
    amplified: Dict[str, int] = Field(default_factory=dict)
    tau_mix: Optional[int] = None
    alpha: Optional[float] = None
    eps0: Optional[float] = None
    tau_prime_eps: Dict[str, float] = Field(default_factory=dict)
    tau_prime_mix: Optional[float] = None
    amplification_available: bool = True
    created_at: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    @model_validator(mode='after')
    def validate_consistency(self) -> "MixingReport":
        """eps0 is tied to alpha; stored tau values sit inside the bounds."""
        if self.alpha is not None and self.eps0 is not None:
            if abs(self.eps0 - (1 - self.alpha) / 4) > 1e-12:
                raise InvariantViolation("eps0-definition", f"eps0={self.eps0} but alpha={self.alpha}")
        for key, tau in self.tau_eps.items():
            lower = self.ds_lower.get(key)
            upper = self.ds_upper.get(key)
            if lower is not None and upper is not None and not lower - 1e-9 <= tau <= upper + 1e-9:
                raise InvariantViolation(
                    "mixing-time-bounds", f"tau({key})={tau} outside [{lower:.6g}, {upper:.6g}]"
                )
        return self

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode='json')


class SampleTrace(BaseModel):
    """Record of one sampling run: every (measurement time, observed state) round."""
    model_config = ConfigDict(frozen=True)

    seed: int = Field(..., ge=0, lt=2 ** 64)
    trial_id: int = Field(default=0, ge=0)
    initial_state: int = Field(..., ge=0)
    rounds: List[Tuple[float, int]] = Field(default_factory=list)
    final_state: int = Field(..., ge=0)

    @model_validator(mode='after')
    def validate_rounds(self) -> "SampleTrace":
        """The final state is the last observed state (or the start for zero rounds)."""
        expected = self.rounds[-1][1] if self.rounds else self.initial_state
        if self.final_state != expected:
            raise InvariantViolation("trace-final-state", f"final {self.final_state} != last observed {expected}")
        return self

    @property
    def round_count(self) -> int:
        return len(self.rounds)

    def csv_rows(self) -> List[Tuple[int, int, int, int, float, int]]:
        """Rows of (trial_id, seed, initial_state, round, time, state)."""
        return [
            (self.trial_id, self.seed, self.initial_state, index, time, state)
            for index, (time, state) in enumerate(self.rounds)
        ]


class SampleSummary(BaseModel):
    """Summary written by the `sample` command."""
    graph: str
    mode: str
    T: float
    T_prime: int
    alpha: Optional[float] = None
    eps: float
    seed: int
    trials: int
    initial_state: int = 0
    tv_to_uniform_exact: float
    tv_mc_vs_exact: Optional[float] = None
    amplification_available: bool = True

    @field_validator('mode')
    @classmethod
    def validate_mode(cls, v: str) -> str:
        if v not in ("single", "double", "exact"):
            raise ValueError(f"Unknown sampling mode '{v}'")
        return v

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode='json')


class CheckResult(BaseModel):
    """Outcome of one named lab check together with its evidence rows."""
    name: str
    passed: bool
    detail: str = ""
    asserted: bool = True
    evidence: List[Dict[str, Any]] = Field(default_factory=list)


class LabReport(BaseModel):
    """Aggregated outcome of a conjecture lab suite."""
    suite: str
    checks: List[CheckResult] = Field(default_factory=list)
    created_at: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    @property
    def passed(self) -> bool:
        """Only asserted checks decide the verdict; evidence-only checks never fail a suite."""
        return all(check.passed for check in self.checks if check.asserted)

    def failed_checks(self) -> List[str]:
        return [check.name for check in self.checks if check.asserted and not check.passed]

    def to_dict(self) -> Dict[str, Any]:
        data = self.model_dump(mode='json')
        data['passed'] = self.passed
        return data


class TrotterRow(BaseModel):
    """One grid point of a Trotter error sweep."""
    model_config = ConfigDict(frozen=True)

    t: float
    j: int = Field(..., ge=1)
    error_2norm: float = Field(..., ge=0)
    error_max_entry: float = Field(..., ge=0)
    bound: float = Field(..., ge=0)

    @property
    def within_bound(self) -> bool:
        return self.error_2norm <= self.bound + 1e-12
