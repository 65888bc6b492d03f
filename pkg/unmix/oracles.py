"""
Slow reference solvers used as ground truth and benchmark baselines.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
import scipy.linalg

from .defaults import (
    FCLS_WEIGHT_FACTOR,
    GRID_ORACLE_MAX_SIGNATURES,
    GRID_ORACLE_MAX_STEP,
    NNLS_PIVOT_FACTOR,
)
from .errors import (
    DimensionMismatch,
    InvalidParameter,
    MaxOuterIterations,
    NegativeLambda,
    OracleSizeError,
)
from .linalg import as_matrix, as_vector
from .types import Matrix, MatrixLike, Vector, VectorLike

__all__ = (
    "ActiveSetState",
    "active_set_solve",
    "nnls",
    "fcls",
    "grid_csr",
    "kkt_violation",
)

logger: logging.Logger = logging.getLogger(__name__)

KKT_TOLERANCE: float = 1e-8


@dataclass
class ActiveSetState:
    # Components outside the passive set are exactly zero
    passive: np.ndarray
    solution: Vector
    outer_iterations: int = field(default=0)

    @classmethod
    def empty(cls, signatures: int, /) -> "ActiveSetState":
        return cls(
            passive=np.zeros(signatures, dtype=bool),
            solution=np.zeros(signatures),
        )

    @property
    def active(self) -> np.ndarray:
        return ~self.passive


def _checked(matrix: MatrixLike, y: VectorLike, /) -> Tuple[Matrix, Vector]:
    a: Matrix = as_matrix(matrix, subject="library")
    b: Vector = as_vector(y, subject="observation")

    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch(
            "observation", expected=(a.shape[0],), actual=b.shape, parameter="observation"
        )

    return a, b


def _passive_least_squares(
    matrix: Matrix, y: Vector, passive: np.ndarray, /
) -> Vector:
    z: Vector = np.zeros(matrix.shape[1])

    if passive.any():
        z[passive] = scipy.linalg.lstsq(
            matrix[:, passive], y, cond=NNLS_PIVOT_FACTOR, check_finite=False
        )[0]

    return z


def active_set_solve(
    matrix: MatrixLike, y: VectorLike, /, *, max_outer: Optional[int] = None
) -> ActiveSetState:
    a, b = _checked(matrix, y)
    signatures: int = a.shape[1]
    limit: int = 3 * signatures if max_outer is None else max_outer
    # Rounding level of the gradient AᵀAx − Aᵀy
    tolerance: float = (
        10 * np.finfo(np.float64).eps * float(np.linalg.norm(a.T @ a, 1)) * signatures
    )

    state: ActiveSetState = ActiveSetState.empty(signatures)
    gradient: Vector = a.T @ b

    while state.active.any() and np.max(gradient[state.active]) > tolerance:
        state.outer_iterations += 1

        if state.outer_iterations > limit:
            raise MaxOuterIterations(limit)

        candidates: Vector = np.where(state.active, gradient, -np.inf)
        state.passive[int(np.argmax(candidates))] = True

        z: Vector = _passive_least_squares(a, b, state.passive)

        while state.passive.any() and np.min(z[state.passive]) <= 0:
            blocking: np.ndarray = state.passive & (z <= 0)
            x: Vector = state.solution
            ratios: Vector = x[blocking] / (x[blocking] - z[blocking])
            alpha: float = float(np.min(ratios))

            x = x + alpha * (z - x)
            # The blocking coordinate lands on zero up to rounding
            x[np.flatnonzero(blocking)[int(np.argmin(ratios))]] = 0.0

            state.passive &= x > 0
            x[state.active] = 0.0
            state.solution = x

            z = _passive_least_squares(a, b, state.passive)

        state.solution = z
        gradient = a.T @ (b - a @ z)

    logger.debug("Active-set solve finished after %d outer iterations", state.outer_iterations)

    return state


def kkt_violation(matrix: MatrixLike, y: VectorLike, x: Vector, /) -> float:
    """Largest violation of the nonnegative least squares KKT conditions."""
    a, b = _checked(matrix, y)
    gradient: Vector = a.T @ (a @ x - b)
    positive: np.ndarray = x > 0

    stationarity: float = float(np.max(np.abs(gradient[positive]), initial=0.0))
    sign: float = float(np.max(-gradient[~positive], initial=0.0))

    return max(stationarity, sign)


def nnls(matrix: MatrixLike, y: VectorLike, /) -> Vector:
    """Minimize `‖Ax − y‖₂` subject to `x ≥ 0`."""
    a, b = _checked(matrix, y)
    x: Vector = active_set_solve(a, b).solution
    violation: float = kkt_violation(a, b, x)
    scale: float = max(1.0, float(np.linalg.norm(a.T @ a, 1)))

    if violation > KKT_TOLERANCE * scale:
        logger.warning("NNLS solution violates optimality conditions by %.3e", violation)

    return x


def fcls(
    matrix: MatrixLike, y: VectorLike, /, asc_weight: Optional[float] = None
) -> Vector:
    """Minimize `‖Ax − y‖² + asc_weight²·(1ᵀx − 1)²` subject to `x ≥ 0`."""
    a, b = _checked(matrix, y)

    if asc_weight is None:
        asc_weight = FCLS_WEIGHT_FACTOR * float(np.max(np.abs(a)))
    elif not (math.isfinite(asc_weight) and asc_weight > 0):
        raise InvalidParameter("asc_weight", asc_weight, "must be positive")

    augmented: Matrix = np.vstack((a, np.full((1, a.shape[1]), asc_weight)))
    target: Vector = np.append(b, asc_weight)

    return nnls(augmented, target)


def _simplex_grid(signatures: int, divisions: int, /) -> Matrix:
    levels: np.ndarray = np.arange(divisions + 1)

    if signatures == 1:
        points: np.ndarray = np.array([[divisions]])
    elif signatures == 2:
        points = np.column_stack((levels, divisions - levels))
    else:
        first, second = np.meshgrid(levels, levels, indexing="ij")
        inside: np.ndarray = first + second <= divisions
        points = np.column_stack(
            (first[inside], second[inside], divisions - first[inside] - second[inside])
        )

    return points / divisions


def grid_csr(
    matrix: MatrixLike, y: VectorLike, lambda_: float, step: float, /
) -> Vector:
    """Exhaustive search for `(1/2)‖Ax − y‖² + λ‖x‖₁` over the simplex grid."""
    a, b = _checked(matrix, y)
    signatures: int = a.shape[1]

    if signatures > GRID_ORACLE_MAX_SIGNATURES:
        raise OracleSizeError(signatures, GRID_ORACLE_MAX_SIGNATURES)
    if not 0 < step <= GRID_ORACLE_MAX_STEP:
        raise InvalidParameter(
            "step", step, f"must lie in (0, {GRID_ORACLE_MAX_STEP:g}]"
        )
    if not lambda_ >= 0:
        raise NegativeLambda(lambda_)

    points: Matrix = _simplex_grid(signatures, math.ceil(1.0 / step - 1e-9))

    gram: Matrix = a.T @ a
    aty: Vector = a.T @ b
    # ‖Ax − y‖² = xᵀGx − 2bᵀx + yᵀy, and ‖x‖₁ = 1ᵀx on the simplex
    values: Vector = (
        0.5 * (np.einsum("pi,ij,pj->p", points, gram, points) - 2 * points @ aty + b @ b)
        + lambda_ * points.sum(axis=1)
    )

    return points[int(np.argmin(values))].copy()
