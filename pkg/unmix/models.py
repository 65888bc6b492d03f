import math
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Extra, Field, validator

from .defaults import (
    DEFAULT_DELTA,
    DEFAULT_MAX_ITERS,
    DEFAULT_MU,
    DEFAULT_PRIMAL_TOL,
    DEFAULT_PROBLEM_KIND,
    DEFAULT_RETURN_ITERATE,
    DEFAULT_SPLIT_LAMBDA,
    DEFAULT_SPLIT_MU,
)
from .enums import ProblemKind, ReturnIterate
from .errors import (
    DimensionMismatch,
    IncompatibleParameter,
    InvalidParameter,
    MissingParameter,
    NegativeDelta,
    NegativeLambda,
    NonPositiveMu,
    ZeroSignature,
)
from .linalg import as_matrix
from .types import Matrix, MatrixLike, Vector

__all__ = (
    "SpectralLibrary",
    "SolverConfig",
    "SolveResult",
)


@dataclass(frozen=True)
class SpectralLibrary:
    """A read-only `k × n` library whose columns are the spectral signatures."""

    matrix: Matrix
    name: Optional[str] = None

    def __post_init__(self) -> None:
        matrix: Matrix = as_matrix(self.matrix, subject="library")

        if matrix.shape[0] < 1 or matrix.shape[1] < 1:
            raise DimensionMismatch(
                "library", expected=(1, 1), actual=matrix.shape, parameter="library"
            )

        zero_columns: np.ndarray = np.flatnonzero(~np.any(matrix != 0, axis=0))

        if zero_columns.size:
            raise ZeroSignature(int(zero_columns[0]))

        matrix.setflags(write=False)

        object.__setattr__(self, "matrix", matrix)

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(bands={self.bands}, signatures={self.signatures}"
            f", name={self.name!r})"
        )

    @classmethod
    def from_array(
        cls, matrix: MatrixLike, /, *, name: Optional[str] = None
    ) -> "SpectralLibrary":
        return cls(np.array(matrix, dtype=np.float64), name=name)

    @property
    def bands(self) -> int:
        return self.matrix.shape[0]

    @property
    def signatures(self) -> int:
        return self.matrix.shape[1]


class SolverConfig(BaseModel):
    """
    Problem variant and iteration policy for a single solve.

    Omitted `mu` and `lambda_` are resolved from `kind`; CSR requires a lambda.
    """

    kind: ProblemKind = DEFAULT_PROBLEM_KIND
    lambda_: float = Field(None, alias="lambda")
    delta: float = DEFAULT_DELTA
    mu: float = Field(None)
    enforce_asc: bool = True
    enforce_anc: bool = True
    max_iters: int = DEFAULT_MAX_ITERS
    primal_tol: float = DEFAULT_PRIMAL_TOL
    return_iterate: ReturnIterate = DEFAULT_RETURN_ITERATE

    class Config:
        allow_mutation = False
        allow_population_by_field_name = True
        extra = Extra.forbid

    @validator("lambda_", always=True)
    def check_lambda(
        cls, value: Optional[float], values: Mapping[str, Any]
    ) -> float:
        kind: ProblemKind = values.get("kind", DEFAULT_PROBLEM_KIND)

        if value is None:
            if kind is ProblemKind.CSR:
                raise MissingParameter("lambda", kind=str(kind))

            return DEFAULT_SPLIT_LAMBDA if kind.uses_split else 0.0

        if not math.isfinite(value):
            raise InvalidParameter("lambda", value, "must be finite")
        if value < 0:
            raise NegativeLambda(value)
        if kind is ProblemKind.CLS and value != 0:
            raise IncompatibleParameter("lambda", value, kind=str(kind))

        return value

    @validator("delta", always=True)
    def check_delta(cls, value: float, values: Mapping[str, Any]) -> float:
        kind: ProblemKind = values.get("kind", DEFAULT_PROBLEM_KIND)

        if not math.isfinite(value):
            raise InvalidParameter("delta", value, "must be finite")
        if value < 0:
            raise NegativeDelta(value)
        if kind is ProblemKind.CBP and value != 0:
            raise IncompatibleParameter("delta", value, kind=str(kind))

        return value

    @validator("mu", always=True)
    def check_mu(cls, value: Optional[float], values: Mapping[str, Any]) -> float:
        kind: ProblemKind = values.get("kind", DEFAULT_PROBLEM_KIND)

        if value is None:
            return DEFAULT_SPLIT_MU if kind.uses_split else DEFAULT_MU

        if not math.isfinite(value):
            raise InvalidParameter("mu", value, "must be finite")
        if value <= 0:
            raise NonPositiveMu(value)

        return value

    @validator("max_iters")
    def check_max_iters(cls, value: int) -> int:
        if value < 1:
            raise InvalidParameter("iters", value, "must be at least 1")

        return value

    @validator("primal_tol")
    def check_primal_tol(cls, value: float) -> float:
        if not value >= 0:
            raise InvalidParameter("tol", value, "must be non-negative")

        return value

    @property
    def threshold(self) -> float:
        """The soft-threshold level `λ/μ` used in the u-update."""
        return self.lambda_ / self.mu


@dataclass(frozen=True)
class SolveResult:
    kind: ProblemKind
    abundances: Vector
    x: Vector
    u: Vector
    iterations: int
    primal_residual_history: Sequence[float]
    dual_residual_history: Sequence[float]
    objective_history: Sequence[float]
    asc_violation: float
    anc_violation: float
    data_residual: float
    converged: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": str(self.kind),
            "abundances": self.abundances.tolist(),
            "iterations": self.iterations,
            "converged": self.converged,
            "asc_violation": self.asc_violation,
            "anc_violation": self.anc_violation,
            "data_residual": self.data_residual,
            "primal_residual_history": list(self.primal_residual_history),
            "dual_residual_history": list(self.dual_residual_history),
            "objective_history": list(self.objective_history),
        }
