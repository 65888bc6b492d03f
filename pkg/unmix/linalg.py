from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NonFiniteInput, NotPositiveDefinite
from .types import Matrix, MatrixLike, Vector, VectorLike

__all__ = (
    "SpdFactorization",
    "as_matrix",
    "as_vector",
    "matvec",
    "gram_plus_diag",
    "spd_factorize",
    "spd_solve",
)


def as_matrix(value: MatrixLike, /, *, subject: str = "matrix") -> Matrix:
    matrix: Matrix = np.array(value, dtype=np.float64)

    if matrix.ndim != 2:
        raise DimensionMismatch(subject, expected=(-1, -1), actual=matrix.shape)
    if not np.all(np.isfinite(matrix)):
        raise NonFiniteInput(subject)

    return matrix


def as_vector(value: VectorLike, /, *, subject: str = "vector") -> Vector:
    vector: Vector = np.array(value, dtype=np.float64)

    if vector.ndim != 1:
        raise DimensionMismatch(subject, expected=(-1,), actual=vector.shape)
    if not np.all(np.isfinite(vector)):
        raise NonFiniteInput(subject)

    return vector


@dataclass(frozen=True)
class SpdFactorization:
    """Lower Cholesky factor `L` of a symmetric positive definite matrix."""

    factor: Matrix

    @property
    def dim(self) -> int:
        return self.factor.shape[0]

    def reconstruct(self) -> Matrix:
        return self.factor @ self.factor.T


def matvec(matrix: Matrix, vector: Vector, /) -> Vector:
    if matrix.ndim != 2 or vector.ndim != 1 or matrix.shape[1] != vector.shape[0]:
        raise DimensionMismatch(
            "matrix-vector product",
            expected=(matrix.shape[-1],),
            actual=vector.shape,
        )

    return matrix @ vector


def gram_plus_diag(matrix: Matrix, shift: float, /) -> Matrix:
    """Return `AᵀA + shift·I`, bit-exactly symmetric."""
    gram: Matrix = matrix.T @ matrix

    gram[np.diag_indices_from(gram)] += shift

    return 0.5 * (gram + gram.T)


def spd_factorize(matrix: Matrix, /) -> SpdFactorization:
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatch(
            "factorized matrix",
            expected=(matrix.shape[0], matrix.shape[0]),
            actual=matrix.shape,
        )

    try:
        factor: Matrix = scipy.linalg.cholesky(matrix, lower=True, check_finite=True)
    except np.linalg.LinAlgError as error:
        raise NotPositiveDefinite(
            "Matrix is not positive definite (is mu > 0?)"
        ) from error

    return SpdFactorization(factor)


def spd_solve(factorization: SpdFactorization, rhs: Vector, /) -> Vector:
    if rhs.ndim != 1 or rhs.shape[0] != factorization.dim:
        raise DimensionMismatch(
            "right-hand side", expected=(factorization.dim,), actual=rhs.shape
        )

    return scipy.linalg.cho_solve(
        (factorization.factor, True), rhs, check_finite=False
    )
