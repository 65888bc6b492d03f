from dataclasses import dataclass, field
from typing import Optional, Tuple

__all__ = (
    "UnmixError",
    "InvalidInputError",
    "DimensionMismatch",
    "NonFiniteInput",
    "NonPositiveMu",
    "NegativeLambda",
    "NegativeDelta",
    "NegativeThreshold",
    "InvalidParameter",
    "MissingParameter",
    "ZeroSignature",
    "IncompatibleParameter",
    "InvalidSynthesisSpec",
    "OracleSizeError",
    "ParseError",
    "SolverError",
    "NotPositiveDefinite",
    "NonFinite",
    "MaxOuterIterations",
)


class UnmixError(Exception):
    pass


class InvalidInputError(UnmixError):
    parameter: Optional[str] = None


@dataclass
class DimensionMismatch(InvalidInputError):
    subject: str
    expected: Tuple[int, ...]
    actual: Tuple[int, ...]
    parameter: Optional[str] = None

    def __str__(self) -> str:
        return (
            f"Dimension mismatch for {self.subject}."
            f" Expected shape {self.expected}, got {self.actual}"
        )


@dataclass
class NonFiniteInput(InvalidInputError):
    subject: str
    parameter: Optional[str] = None

    def __str__(self) -> str:
        return f"{self.subject} contains non-finite entries (NaN or Inf)"


@dataclass
class _NegativeParameter(InvalidInputError):
    value: float

    name = "parameter"

    @property
    def parameter(self) -> str:  # type: ignore[override]
        return self.name

    def __str__(self) -> str:
        return f"{self.name} must be non-negative, got {self.value!r}"


class NegativeLambda(_NegativeParameter):
    name = "lambda"


class NegativeDelta(_NegativeParameter):
    name = "delta"


class NegativeThreshold(_NegativeParameter):
    name = "threshold"


@dataclass
class NonPositiveMu(InvalidInputError):
    value: float

    parameter = "mu"

    def __str__(self) -> str:
        return f"mu must be strictly positive, got {self.value!r}"


@dataclass
class InvalidParameter(InvalidInputError):
    parameter: str = field()  # type: ignore[assignment]
    value: object
    reason: str

    def __str__(self) -> str:
        return f"Invalid {self.parameter} {self.value!r}: {self.reason}"


@dataclass
class MissingParameter(InvalidInputError):
    parameter: str = field()  # type: ignore[assignment]
    kind: str

    def __str__(self) -> str:
        return f"Problem kind {self.kind!r} requires an explicit {self.parameter}"


@dataclass
class ZeroSignature(InvalidInputError):
    index: int

    parameter = "library"

    def __str__(self) -> str:
        return f"Library column {self.index} is entirely zero"


@dataclass
class IncompatibleParameter(InvalidInputError):
    parameter: str = field()  # type: ignore[assignment]
    value: float
    kind: str

    def __str__(self) -> str:
        return (
            f"Problem kind {self.kind!r} requires {self.parameter} = 0,"
            f" got {self.value!r}"
        )


@dataclass
class InvalidSynthesisSpec(InvalidInputError):
    parameter: str = field()  # type: ignore[assignment]
    reason: str

    def __str__(self) -> str:
        return f"Invalid synthesis parameter {self.parameter!r}: {self.reason}"


@dataclass
class OracleSizeError(InvalidInputError):
    signatures: int
    limit: int

    def __str__(self) -> str:
        return (
            f"Grid oracle supports at most {self.limit} signatures,"
            f" got {self.signatures}"
        )


@dataclass
class ParseError(InvalidInputError):
    path: str
    line: int
    reason: str

    def __str__(self) -> str:
        return f"{self.path}:{self.line}: {self.reason}"


class SolverError(UnmixError):
    pass


class NotPositiveDefinite(SolverError):
    pass


@dataclass
class NonFinite(SolverError):
    iteration: int
    magnitude: float

    def __str__(self) -> str:
        return (
            f"Iterates diverged at iteration {self.iteration}"
            f" (max magnitude {self.magnitude!r})"
        )


@dataclass
class MaxOuterIterations(SolverError):
    limit: int

    def __str__(self) -> str:
        return f"Active-set method exceeded {self.limit} outer iterations"
