from typing import Sequence, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from typing_extensions import TypeAlias

__all__ = (
    "Matrix",
    "Vector",
    "MatrixLike",
    "VectorLike",
    "Seed",
)

Matrix: TypeAlias = NDArray[np.float64]
Vector: TypeAlias = NDArray[np.float64]
MatrixLike: TypeAlias = Union[ArrayLike, Sequence[Sequence[float]]]
VectorLike: TypeAlias = Union[ArrayLike, Sequence[float]]
Seed: TypeAlias = int