import logging
from typing import Any, Callable, List, Optional, Sequence, Union

from joblib import Parallel, delayed

from . import csunsal, sunsal
from .linalg import as_vector
from .models import SolveResult, SolverConfig, SpectralLibrary
from .types import Vector, VectorLike

__all__ = (
    "Workspace",
    "prepare_workspace",
    "solve",
    "solve_pixels",
)

logger: logging.Logger = logging.getLogger(__name__)

Workspace = Union[sunsal.SunsalWorkspace, csunsal.CsunsalWorkspace]


def prepare_workspace(
    library: SpectralLibrary, y: VectorLike, config: SolverConfig, /
) -> Workspace:
    if config.kind.uses_split:
        return csunsal.prepare(library, config)

    return sunsal.prepare(library, y, config)


def solve(
    library: SpectralLibrary,
    y: VectorLike,
    config: SolverConfig,
    /,
    *,
    workspace: Optional[Workspace] = None,
    u0: Any = None,
    d0: Any = None,
    callback: Optional[Callable[[int, Any], None]] = None,
) -> SolveResult:
    """Solve one unmixing problem with the solver matching `config.kind`."""
    if config.kind.uses_split:
        return csunsal.solve(
            library,
            y,
            config,
            workspace=workspace,  # type: ignore[arg-type]
            u0=u0,
            d0=d0,
            callback=callback,
        )

    return sunsal.solve(
        library,
        y,
        config,
        workspace=workspace,  # type: ignore[arg-type]
        u0=u0,
        d0=d0,
        callback=callback,
    )


def solve_pixels(
    library: SpectralLibrary,
    ys: Sequence[VectorLike],
    config: SolverConfig,
    /,
    *,
    threads: int = 1,
) -> List[SolveResult]:
    """Solve each observation in `ys`, sharing one factorization between threads."""
    if len(ys) == 0:
        return []

    observations: List[Vector] = [
        as_vector(y, subject="observation") for y in ys
    ]
    workspace: Workspace = prepare_workspace(library, observations[0], config)

    logger.info(
        "Solving %d pixels (%s) on %d thread(s)", len(observations), config.kind, threads
    )

    if threads == 1:
        return [
            solve(library, observation, config, workspace=workspace)
            for observation in observations
        ]

    return Parallel(n_jobs=threads, prefer="threads")(
        delayed(solve)(library, observation, config, workspace=workspace)
        for observation in observations
    )
