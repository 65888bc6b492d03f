"""
Synthetic unmixing problems and the plain-text matrix format.

A library file is UTF-8 text: a header line `<k> <n>` followed by `k` rows
of `n` whitespace-separated decimal numbers. Blank lines and lines starting
with `#` are ignored. Observation and abundance vectors use the same format
with a single column.
"""

import importlib.resources
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, List, Mapping, Optional, TextIO, Tuple, Union

import numpy as np
from pydantic import BaseModel, Extra, validator
from scipy.ndimage import uniform_filter1d

from .constants import BUNDLED_LIBRARY, DATA_PACKAGE
from .defaults import (
    DEFAULT_LOWPASS_WINDOW,
    DEFAULT_NOISE_KIND,
    DEFAULT_SNR_DB,
    DEFAULT_SPARSITY,
)
from .enums import NoiseKind
from .errors import DimensionMismatch, InvalidSynthesisSpec, ParseError
from .linalg import as_matrix, as_vector
from .models import SpectralLibrary
from .types import Matrix, MatrixLike, Seed, Vector, VectorLike

__all__ = (
    "SynthesisSpec",
    "SyntheticProblem",
    "derive_seeds",
    "gaussian_library",
    "sparse_simplex_abundance",
    "snr_db",
    "add_noise",
    "synthesize",
    "read_matrix",
    "load_library",
    "save_library",
    "load_vector",
    "save_vector",
    "bundled_library",
)

logger: logging.Logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class SynthesisSpec(BaseModel):
    # target_snr_db = inf produces noiseless observations
    k: int
    n: int
    s: int = DEFAULT_SPARSITY
    target_snr_db: float = DEFAULT_SNR_DB
    noise_kind: NoiseKind = DEFAULT_NOISE_KIND
    lowpass_window: int = DEFAULT_LOWPASS_WINDOW
    seed: Seed = 0

    class Config:
        allow_mutation = False
        extra = Extra.forbid

    @validator("k", "n")
    def check_size(cls, value: int, field: Any) -> int:
        if value < 1:
            raise InvalidSynthesisSpec(field.name, f"must be at least 1, got {value}")

        return value

    @validator("s")
    def check_sparsity(cls, value: int, values: Mapping[str, Any]) -> int:
        n: Optional[int] = values.get("n")

        if value < 1 or (n is not None and value > n):
            raise InvalidSynthesisSpec("s", f"must lie in [1, n], got {value}")

        return value

    @validator("target_snr_db")
    def check_snr(cls, value: float) -> float:
        if math.isnan(value) or value == -math.inf:
            raise InvalidSynthesisSpec("snr", f"must be a number of dB, got {value}")

        return value

    @validator("lowpass_window")
    def check_window(cls, value: int) -> int:
        if value < 1 or value % 2 == 0:
            raise InvalidSynthesisSpec(
                "window", f"must be odd and at least 1, got {value}"
            )

        return value

    @validator("seed")
    def check_seed(cls, value: int) -> int:
        if value < 0:
            raise InvalidSynthesisSpec("seed", f"must be non-negative, got {value}")

        return value


@dataclass(frozen=True)
class SyntheticProblem:
    library: SpectralLibrary
    x_true: Vector
    y_clean: Vector
    y_noisy: Vector
    realized_snr_db: float

    @property
    def noise_norm(self) -> float:
        return float(np.linalg.norm(self.y_noisy - self.y_clean))


def derive_seeds(seed: Seed, count: int, /) -> List[Seed]:
    state: np.ndarray = np.random.SeedSequence(seed).generate_state(
        count, dtype=np.uint64
    )

    return [int(value) for value in state]


def gaussian_library(k: int, n: int, seed: Seed, /) -> SpectralLibrary:
    if k < 1 or n < 1:
        raise InvalidSynthesisSpec("k" if k < 1 else "n", "must be at least 1")

    rng: np.random.Generator = np.random.default_rng(seed)

    return SpectralLibrary(rng.standard_normal((k, n)), name=f"gaussian-{k}x{n}")


def sparse_simplex_abundance(n: int, s: int, seed: Seed, /) -> Vector:
    """A point of the simplex with `s` flat-Dirichlet nonzeros at random positions."""
    if not 1 <= s <= n:
        raise InvalidSynthesisSpec("s", f"must lie in [1, {n}], got {s}")

    rng: np.random.Generator = np.random.default_rng(seed)
    support: np.ndarray = rng.choice(n, size=s, replace=False)
    values: Vector = rng.dirichlet(np.ones(s))
    values /= values.sum()

    x: Vector = np.zeros(n)
    x[support] = values

    return x


def snr_db(signal: VectorLike, noise: VectorLike, /) -> float:
    """`10·log₁₀(‖signal‖² / ‖noise‖²)`; infinite for zero noise."""
    signal_energy: float = float(np.sum(np.square(signal)))
    noise_energy: float = float(np.sum(np.square(noise)))

    if noise_energy == 0:
        return math.inf

    return 10.0 * math.log10(signal_energy / noise_energy)


def add_noise(
    y_clean: VectorLike, spec: SynthesisSpec, seed: Seed, /
) -> Tuple[Vector, float]:
    """Add Gaussian noise rescaled to hit `spec.target_snr_db` exactly."""
    clean: Vector = as_vector(y_clean, subject="clean observation")

    if not math.isfinite(spec.target_snr_db):
        raise InvalidSynthesisSpec("snr", "noise requires a finite target SNR")

    energy: float = float(clean @ clean)

    if energy == 0:
        raise InvalidSynthesisSpec("signal", "SNR is undefined for a zero signal")

    rng: np.random.Generator = np.random.default_rng(seed)
    noise: Vector = rng.standard_normal(clean.shape[0])

    if spec.noise_kind is NoiseKind.LOWPASS and spec.lowpass_window > 1:
        noise = uniform_filter1d(noise, size=spec.lowpass_window, mode="reflect")

    target_energy: float = energy / 10.0 ** (spec.target_snr_db / 10.0)
    noise *= math.sqrt(target_energy / float(noise @ noise))

    return clean + noise, snr_db(clean, noise)


def synthesize(
    spec: SynthesisSpec, /, library: Optional[SpectralLibrary] = None
) -> SyntheticProblem:
    """Draw one problem `y = Ax + noise`, all randomness derived from `spec.seed`."""
    library_seed, abundance_seed, noise_seed = derive_seeds(spec.seed, 3)

    if library is None:
        library = gaussian_library(spec.k, spec.n, library_seed)
    elif (library.bands, library.signatures) != (spec.k, spec.n):
        raise DimensionMismatch(
            "library",
            expected=(spec.k, spec.n),
            actual=library.matrix.shape,
            parameter="library",
        )

    x_true: Vector = sparse_simplex_abundance(spec.n, spec.s, abundance_seed)
    y_clean: Vector = library.matrix @ x_true

    y_noisy: Vector
    realized: float
    if math.isinf(spec.target_snr_db):
        y_noisy, realized = y_clean.copy(), math.inf
    else:
        y_noisy, realized = add_noise(y_clean, spec, noise_seed)

    logger.debug(
        "Synthesized %dx%d problem, s=%d, SNR %.3f dB", spec.k, spec.n, spec.s, realized
    )

    return SyntheticProblem(
        library=library,
        x_true=x_true,
        y_clean=y_clean,
        y_noisy=y_noisy,
        realized_snr_db=realized,
    )


def _parse_row(path: str, number: int, line: str, width: int, /) -> List[float]:
    fields: List[str] = line.split()

    if len(fields) != width:
        raise ParseError(path, number, f"expected {width} values, got {len(fields)}")

    try:
        values: List[float] = [float(field) for field in fields]
    except ValueError as error:
        raise ParseError(path, number, f"invalid number ({error})") from error

    if not all(math.isfinite(value) for value in values):
        raise ParseError(path, number, "non-finite value")

    return values


def _parse_header(path: str, number: int, line: str, /) -> Tuple[int, int]:
    fields: List[str] = line.split()

    try:
        k, n = (int(field) for field in fields)
    except ValueError as error:
        raise ParseError(path, number, "expected header '<k> <n>'") from error

    if k < 1 or n < 1:
        raise ParseError(path, number, f"header dimensions must be positive, got {k} {n}")

    return k, n


def read_matrix(path: PathLike, /) -> Matrix:
    name: str = str(path)
    lines: List[str] = Path(path).read_text(encoding="utf-8").splitlines()

    shape: Optional[Tuple[int, int]] = None
    rows: List[List[float]] = []

    number: int
    line: str
    for number, line in enumerate(lines, start=1):
        stripped: str = line.strip()

        if not stripped or stripped.startswith("#"):
            continue

        if shape is None:
            shape = _parse_header(name, number, stripped)
        elif len(rows) == shape[0]:
            raise ParseError(name, number, f"unexpected data after {shape[0]} rows")
        else:
            rows.append(_parse_row(name, number, stripped, shape[1]))

    if shape is None:
        raise ParseError(name, len(lines) + 1, "missing header '<k> <n>'")
    if len(rows) < shape[0]:
        raise ParseError(
            name, len(lines) + 1, f"expected {shape[0]} rows, got {len(rows)}"
        )

    return np.array(rows, dtype=np.float64)


def load_library(path: PathLike, /) -> SpectralLibrary:
    return SpectralLibrary(read_matrix(path), name=Path(path).stem)


def load_vector(path: PathLike, /, *, parameter: Optional[str] = None) -> Vector:
    matrix: Matrix = read_matrix(path)

    if matrix.shape[1] != 1:
        raise DimensionMismatch(
            f"vector file {path}",
            expected=(matrix.shape[0], 1),
            actual=matrix.shape,
            parameter=parameter,
        )

    return matrix[:, 0]


def save_library(
    library: Union[SpectralLibrary, MatrixLike], target: Union[PathLike, TextIO], /
) -> None:
    matrix: Matrix = (
        library.matrix
        if isinstance(library, SpectralLibrary)
        else as_matrix(library, subject="library")
    )

    np.savetxt(
        target,
        matrix,
        fmt="%.17g",
        header=f"{matrix.shape[0]} {matrix.shape[1]}",
        comments="",
        encoding="utf-8",
    )


def save_vector(vector: VectorLike, target: Union[PathLike, TextIO], /) -> None:
    save_library(as_vector(vector).reshape(-1, 1), target)


def bundled_library() -> SpectralLibrary:
    resource = importlib.resources.files(DATA_PACKAGE) / BUNDLED_LIBRARY

    with importlib.resources.as_file(resource) as path:
        return load_library(path)
