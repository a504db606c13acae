"""Pydantic models for stopping-time results.

The exact records (chains, tables, laws) carry ``Fraction`` values and stay
in-process. ``OutputRecord`` is the JSON/CSV contract of the command line:
rationals travel as decimal strings so they never overflow a JSON number.
"""

import math
from decimal import Decimal, InvalidOperation
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from exactmath import LowerTriangularMatrix
from utils import decimal_string


# ---------- Enums ----------
class Quantity(str, Enum):
    MEAN = "mean"
    PMF = "pmf"
    VARIANCE = "variance"
    BOUNDS = "bounds"
    REMAINDER = "remainder"
    EXIT_TIME = "exit_time"
    SIMULATION = "simulation"
    VERIFY = "verify"


class MeanMethod(str, Enum):
    RECURRENCE = "recurrence"
    CLOSED_FORM = "closed-form"
    MATRIX = "matrix"
    ALL = "all"


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


class ExactModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


# ---------- Exact records ----------
class TruncatedChain(ExactModel):
    """Transition matrix restricted to the transient states 2..n, with the
    one-step absorption vector. Row/column ``i`` holds state ``i + 2``."""
    n: int = Field(ge=2)
    matrix: LowerTriangularMatrix
    psi: Tuple[Fraction, ...]

    @model_validator(mode="after")
    def _check_shape(self):
        if self.matrix.dim != self.n - 1 or len(self.psi) != self.n - 1:
            raise ValueError(f"Chain for n={self.n} must have {self.n - 1} states")
        return self

    # The only place where player counts map to matrix indices.
    @staticmethod
    def index_of(state: int) -> int:
        return state - 2

    def entry(self, i: int, j: int) -> Fraction:
        """p(i, j) for states 2 <= j <= i <= n."""
        return self.matrix[self.index_of(i), self.index_of(j)]

    def psi_at(self, state: int) -> Fraction:
        return self.psi[self.index_of(state)]

    def at_initial_state(self, vector) -> Fraction:
        """Component of ``vector`` belonging to state n."""
        return vector[self.index_of(self.n)]


class MeanTable(ExactModel):
    max_n: int = Field(ge=1)
    values: List[Fraction]  # E_1 .. E_max_n

    def mean(self, n: int) -> Fraction:
        if not 1 <= n <= self.max_n:
            raise ValueError(f"n={n} is outside the table (1..{self.max_n})")
        return self.values[n - 1]


class HCoefficients(ExactModel):
    max_k: int = Field(ge=1)
    values: List[Fraction]  # h_1 .. h_max_k

    def h(self, k: int) -> Fraction:
        if not 1 <= k <= self.max_k:
            raise ValueError(f"k={k} is outside the table (1..{self.max_k})")
        return self.values[k - 1]


class StoppingTimePMF(ExactModel):
    n: int = Field(ge=2)
    probs: List[Fraction]  # p_n(1) .. p_n(k_max)
    tail_mass: Fraction

    @model_validator(mode="after")
    def _check_mass(self):
        if any(p < 0 for p in self.probs) or self.tail_mass < 0:
            raise ValueError("Probabilities must be nonnegative")
        if sum(self.probs, Fraction(0)) + self.tail_mass != 1:
            raise ValueError("Probabilities and tail mass must sum to 1")
        return self

    @property
    def k_max(self) -> int:
        return len(self.probs)


class ExitTimeLaw(ExactModel):
    n: int = Field(ge=2)
    stay_prob: Fraction
    mean: Fraction

    @model_validator(mode="after")
    def _check_law(self):
        if not 0 < self.stay_prob < 1:
            raise ValueError("Stay probability must lie in (0, 1)")
        if self.mean * (1 - self.stay_prob) != 1:
            raise ValueError("Exit-time mean must equal 1 / (1 - stay probability)")
        return self


class AsymptoticReport(ExactModel):
    n: int = Field(ge=2)
    mean: Fraction
    lower: Fraction
    upper: Fraction
    remainder_exact: Fraction
    ratio: float


# ---------- Simulation ----------
class SimulationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=2)
    trials: int = Field(ge=1)
    seed: int = Field(ge=0, lt=2 ** 64)
    rng: str
    block_size: int = Field(ge=1)
    mean: float
    variance: float
    std_error: float
    histogram: Dict[int, int]
    max_k_observed: int

    @model_validator(mode="after")
    def _check_counts(self):
        if sum(self.histogram.values()) != self.trials:
            raise ValueError("Histogram counts must add up to the number of trials")
        return self


class GoodnessOfFit(BaseModel):
    statistic: float
    p_value: float
    bins: int


# ---------- Verification ----------
class CheckResult(BaseModel):
    name: str
    passed: bool
    checked: int = 0
    detail: str = ""


class VerificationSummary(BaseModel):
    n_max: int
    values_checked: int
    checks: List[CheckResult] = []

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def first_failure(self) -> Optional[CheckResult]:
        return next((c for c in self.checks if not c.passed), None)


# ---------- Output contract ----------
class ExactValue(BaseModel):
    """A reduced rational as a pair of decimal strings."""
    model_config = ConfigDict(frozen=True)

    num: str
    den: str

    @model_validator(mode="after")
    def _check_canonical(self):
        num, den = int(self.num), int(self.den)
        if den <= 0:
            raise ValueError("Denominator must be positive")
        if math.gcd(abs(num), den) != 1:
            raise ValueError(f"{self.num}/{self.den} is not in lowest terms")
        return self

    @classmethod
    def from_fraction(cls, value: Fraction) -> "ExactValue":
        value = Fraction(value)
        return cls(num=str(value.numerator), den=str(value.denominator))

    def to_fraction(self) -> Fraction:
        return Fraction(int(self.num), int(self.den))

    def __str__(self):
        return f"{self.num}/{self.den}"


class OutputRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    quantity: Quantity
    exact: Optional[ExactValue] = None
    approx: Optional[str] = None
    metadata: Dict[str, str] = {}

    @field_validator("approx")
    @classmethod
    def _check_approx(cls, value):
        if value is not None:
            try:
                Decimal(value)
            except InvalidOperation:
                raise ValueError(f"approx must be a decimal number, got '{value}'") from None
        return value

    @classmethod
    def from_exact(cls, n: int, quantity: Quantity, value: Fraction,
                   digits: int = 15, **metadata) -> "OutputRecord":
        return cls(
            n=n,
            quantity=quantity,
            exact=ExactValue.from_fraction(value),
            approx=decimal_string(value, digits),
            metadata={k: str(v) for k, v in metadata.items()},
        )

    @classmethod
    def from_float(cls, n: int, quantity: Quantity, value: float, **metadata) -> "OutputRecord":
        return cls(
            n=n,
            quantity=quantity,
            approx=repr(float(value)),
            metadata={k: str(v) for k, v in metadata.items()},
        )
