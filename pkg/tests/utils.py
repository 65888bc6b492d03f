from typing import Any, Tuple

import numpy as np

from unmix.datagen import gaussian_library, sparse_simplex_abundance
from unmix.models import SolverConfig, SpectralLibrary
from unmix.types import Vector

__all__ = (
    "build_library",
    "build_feasible_problem",
    "build_config",
    "random_vector",
)


def build_library(*, k: int = 20, n: int = 10, seed: int = 0) -> SpectralLibrary:
    return gaussian_library(k, n, seed)


def build_feasible_problem(
    *, k: int = 20, n: int = 10, s: int = 3, seed: int = 0
) -> Tuple[SpectralLibrary, Vector, Vector]:
    """A Gaussian library, a sparse simplex abundance and its noiseless observation."""
    library: SpectralLibrary = build_library(k=k, n=n, seed=seed)
    x_true: Vector = sparse_simplex_abundance(n, s, seed + 1)

    return library, x_true, library.matrix @ x_true


def build_config(**kwargs: Any) -> SolverConfig:
    return SolverConfig(**kwargs)


def random_vector(size: int, seed: int, /) -> Vector:
    return np.random.default_rng(seed).standard_normal(size)
