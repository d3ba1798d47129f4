"""stitkit Pydantic v2 data models, enums and exceptions."""

from __future__ import annotations

from enum import Enum
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

# ── Custom Exceptions ──────────────────────────────────────────────


class StitkitError(Exception):
    """Base class for every error raised by stitkit."""

    pass


class FormulaSyntaxError(StitkitError):
    """Raised when formula text does not match the grammar."""

    def __init__(self, text: str, offset: int, expected: list[str], detail: str = ""):
        self.text = text
        self.offset = offset
        self.expected = sorted(set(expected))
        self.detail = detail
        shown = ", ".join(self.expected) if self.expected else "end of input"
        super().__init__(f"syntax error at offset {offset}: expected one of {shown}")


class FormulaPurityError(StitkitError):
    """Raised when a formula uses an operator the operation does not accept."""

    pass


class UnknownSymbolError(StitkitError):
    """Raised for an agent, state, moment or history the structure does not know."""

    pass


class FrameValidationError(StitkitError):
    """Raised when a frame or model violates a construction invariant."""

    def __init__(self, label: str, message: str):
        self.label = label
        super().__init__(f"{label}: {message}")


class PreconditionError(StitkitError):
    """Raised when an operation is called outside its precondition."""

    pass


class SearchTimeout(StitkitError):
    """Raised when bounded search exceeds its time budget."""

    def __init__(self, explored: int, elapsed_ms: int):
        self.explored = explored
        self.elapsed_ms = elapsed_ms
        super().__init__(f"search timed out after {elapsed_ms} ms ({explored} states explored)")


class ModelFileError(StitkitError):
    """Raised when a model, BT+AC or map file is malformed."""

    pass


class UsageError(StitkitError):
    """Raised for a malformed command line."""

    pass


# ── Enums ──────────────────────────────────────────────────────────────


class AxiomTag(str, Enum):
    INCL = "Incl"
    M = "M"
    N = "N"
    D = "D"
    POS = "Pos"
    NEC_A = "NecA"
    IND = "Ind"
    K_BOX = "K□"
    T_BOX = "T□"
    FOUR_BOX = "4□"
    FIVE_BOX = "5□"
    K_EXISTS = "K∃"
    T_EXISTS = "T∃"
    FOUR_EXISTS = "4∃"
    B_EXISTS = "B∃"
    FIVE_EXISTS = "5∃"


class FrameStyle(str, Enum):
    GRID = "grid"
    PERTURBED = "perturbed"


class Verdict(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    VALID_UP_TO_BOUND = "valid_up_to_bound"
    COUNTERMODEL = "countermodel"
    TIMEOUT = "timeout"


# ── Reports ────────────────────────────────────────────────────────────


class CheckReport(BaseModel):
    """Verdict of a validator: holds, or fails with a structured witness."""

    label: str
    holds: bool
    witness: Optional[dict[str, Any]] = None
    checks: list[CheckReport] = Field(default_factory=list)
    details: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _witness_iff_failure(self):
        if self.holds and self.witness is not None:
            raise ValueError(f"{self.label}: a holding report carries no witness")
        if not self.holds and self.witness is None:
            raise ValueError(f"{self.label}: a failing report needs a witness")
        return self

    @classmethod
    def ok(cls, label: str, **details: Any) -> CheckReport:
        return cls(label=label, holds=True, details=details)

    @classmethod
    def fail(cls, label: str, witness: dict[str, Any], **details: Any) -> CheckReport:
        return cls(label=label, holds=False, witness=witness, details=details)

    @classmethod
    def conjoin(cls, label: str, checks: list[CheckReport]) -> CheckReport:
        """Aggregate sub-checks; the first failing sub-check supplies the witness."""
        for sub in checks:
            if not sub.holds:
                witness = {"check": sub.label, **(sub.witness or {})}
                return cls(label=label, holds=False, witness=witness, checks=checks)
        return cls(label=label, holds=True, checks=checks)


CheckReport.model_rebuild()


class SearchBounds(BaseModel):
    """Limits for bounded validity search."""

    max_states: int = Field(default=5, gt=0)
    agent_count: int = Field(default=1, gt=0)
    atom_count: int = Field(default=2, gt=0)
    max_seconds: float = Field(default=120.0, gt=0)


class SearchResult(BaseModel):
    """Outcome of validity_search and the fuzzers, in the CLI report schema."""

    model_config = ConfigDict(populate_by_name=True)

    verdict: Verdict
    witness: Optional[dict[str, Any]] = None
    states_explored: int = Field(default=0, alias="statesExplored")
    # None leaves elapsedMs out of the report; it is the only run-dependent field.
    elapsed_ms: Optional[int] = Field(default=0, alias="elapsedMs")

    @property
    def is_valid(self) -> bool:
        return self.verdict in (Verdict.VALID_UP_TO_BOUND, Verdict.HOLDS)

    def to_dict(self) -> dict[str, Any]:
        """Serialize with the camelCase keys of the report schema."""
        return self.model_dump(mode="json", by_alias=True, exclude_none=True)


class FuzzConfig(BaseModel):
    """Parameters of a soundness fuzz run."""

    frames: int = Field(default=500, gt=0)
    bounds: SearchBounds = Field(
        default_factory=lambda: SearchBounds(max_states=5, agent_count=3, atom_count=3)
    )
    schemas: list[AxiomTag] = Field(default_factory=lambda: list(AxiomTag))
    seed: int = 0
    depth: int = Field(default=2, ge=0)
    formulas_per_schema: int = Field(default=3, gt=0)
    workers: int = Field(default=1, gt=0)
    class_c: bool = True
