from typing import Final, Tuple

from .enums import NoiseKind, ProblemKind, ReturnIterate, SolverName

__all__ = (
    "DEFAULT_MU",
    "DEFAULT_SPLIT_MU",
    "DEFAULT_SPLIT_LAMBDA",
    "DEFAULT_LAMBDA_FACTOR",
    "DEFAULT_DELTA",
    "DEFAULT_MAX_ITERS",
    "DEFAULT_PRIMAL_TOL",
    "DEFAULT_RETURN_ITERATE",
    "DEFAULT_PROBLEM_KIND",
    "DIVERGENCE_BOUND",
    "RSNR_CAP_DB",
    "DEFAULT_NOISE_KIND",
    "DEFAULT_LOWPASS_WINDOW",
    "DEFAULT_LAMBDA_SWEEP",
    "DEFAULT_BENCH_SOLVERS",
    "DEFAULT_BENCH_RUNS",
    "DEFAULT_BENCH_SEED",
    "DEFAULT_SPARSITY",
    "DEFAULT_SNR_DB",
    "DEFAULT_SCALED_MU_GAIN",
    "FCLS_WEIGHT_FACTOR",
    "NNLS_PIVOT_FACTOR",
    "GRID_ORACLE_MAX_SIGNATURES",
    "GRID_ORACLE_MAX_STEP",
)

DEFAULT_MU: Final[float] = 0.01
# C-SUnSAL only sees mu through the threshold lambda/mu
DEFAULT_SPLIT_MU: Final[float] = 1.0
DEFAULT_SPLIT_LAMBDA: Final[float] = 1.0
DEFAULT_LAMBDA_FACTOR: Final[float] = 1e-3
DEFAULT_DELTA: Final[float] = 0.0
DEFAULT_MAX_ITERS: Final[int] = 200
DEFAULT_PRIMAL_TOL: Final[float] = 0.0
DEFAULT_RETURN_ITERATE: Final[ReturnIterate] = ReturnIterate.U_ITERATE
DEFAULT_PROBLEM_KIND: Final[ProblemKind] = ProblemKind.CLS

DIVERGENCE_BOUND: Final[float] = 1e12
RSNR_CAP_DB: Final[float] = 300.0

DEFAULT_NOISE_KIND: Final[NoiseKind] = NoiseKind.LOWPASS
DEFAULT_LOWPASS_WINDOW: Final[int] = 9
DEFAULT_SPARSITY: Final[int] = 5
DEFAULT_SNR_DB: Final[float] = 30.0

DEFAULT_LAMBDA_SWEEP: Final[Tuple[float, ...]] = tuple(
    10.0 ** (exponent / 2) for exponent in range(-8, 1)
)
DEFAULT_BENCH_SOLVERS: Final[Tuple[SolverName, ...]] = (
    SolverName.SUNSAL,
    SolverName.CSUNSAL,
    SolverName.NNLS,
)
DEFAULT_BENCH_RUNS: Final[int] = 10
DEFAULT_BENCH_SEED: Final[int] = 0
# Scaled policy used by the bench: mu = DEFAULT_MU + gain * lambda
DEFAULT_SCALED_MU_GAIN: Final[float] = 10.0

FCLS_WEIGHT_FACTOR: Final[float] = 1e3
NNLS_PIVOT_FACTOR: Final[float] = 1e-10
GRID_ORACLE_MAX_SIGNATURES: Final[int] = 3
GRID_ORACLE_MAX_STEP: Final[float] = 1e-3
