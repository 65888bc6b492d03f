from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .defaults import DEFAULT_LAMBDA_FACTOR
from .errors import DimensionMismatch
from .linalg import as_vector
from .models import SolverConfig, SpectralLibrary
from .types import Vector, VectorLike

__all__ = (
    "Problem",
    "validate",
    "objective",
    "default_lambda",
    "violations",
)


@dataclass(frozen=True)
class Problem:
    library: SpectralLibrary
    y: Vector
    config: SolverConfig


def validate(
    library: SpectralLibrary, y: VectorLike, config: SolverConfig, /
) -> Problem:
    # `SolverConfig.construct` bypasses the field validators
    checked: SolverConfig = SolverConfig(**config.dict())
    observation: Vector = as_vector(y, subject="observation")

    if observation.shape[0] != library.bands:
        raise DimensionMismatch(
            "observation",
            expected=(library.bands,),
            actual=observation.shape,
            parameter="observation",
        )

    observation.setflags(write=False)

    return Problem(library=library, y=observation, config=checked)


def objective(
    library: SpectralLibrary, y: Vector, config: SolverConfig, x: Vector, /
) -> float:
    """`(1/2)‖Ax − y‖² + λ‖x‖₁` for CLS/CSR, `‖x‖₁` for CBP/CBPDN."""
    if x.ndim != 1 or x.shape[0] != library.signatures:
        raise DimensionMismatch(
            "abundances", expected=(library.signatures,), actual=x.shape
        )

    l1: float = float(np.sum(np.abs(x)))

    if config.kind.uses_split:
        return l1

    residual: Vector = library.matrix @ x - y

    return 0.5 * float(residual @ residual) + config.lambda_ * l1


def default_lambda(library: SpectralLibrary, y: Vector, /) -> float:
    """Relative heuristic `1e-3 · ‖Aᵀy‖∞` used when no lambda is supplied."""
    return DEFAULT_LAMBDA_FACTOR * float(np.max(np.abs(library.matrix.T @ y)))


def violations(
    library: SpectralLibrary, y: Vector, x: Vector, /
) -> Tuple[float, float, float]:
    """Return `(|1ᵀx − 1|, max(0, −min x), ‖Ax − y‖₂)`."""
    asc: float = abs(float(np.sum(x)) - 1.0)
    anc: float = max(0.0, -float(np.min(x)))
    data: float = float(np.linalg.norm(library.matrix @ x - y))

    return asc, anc, data
