"""
Constrained sparse unmixing by variable splitting and augmented Lagrangian.

Solves the basis-pursuit problems

    min ‖x‖₁   subject to   ‖Ax − y‖₂ ≤ δ,  x ≥ 0,  1ᵀx = 1

(CBP is the case δ = 0) with the splitting `u₁ = Ax`, `u₂ = x`.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from .enums import ReturnIterate
from .errors import DimensionMismatch, InvalidParameter
from .linalg import SpdFactorization, as_vector, gram_plus_diag, spd_factorize, spd_solve
from .models import SolveResult, SolverConfig, SpectralLibrary
from .problem import Problem, objective, validate, violations
from .prox import Ball, project_ball, soft_threshold, soft_threshold_nonneg
from .sunsal import check_divergence, check_workspace_library
from .types import Matrix, Vector, VectorLike

__all__ = (
    "CsunsalWorkspace",
    "SplitIterate",
    "prepare",
    "x_update",
    "u1_update",
    "u2_update",
    "solve",
)

logger: logging.Logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CsunsalWorkspace:
    library: SpectralLibrary
    factorization: SpdFactorization
    c_vec: Vector
    enforce_asc: bool


@dataclass(frozen=True)
class SplitIterate:
    x: Vector
    u1: Vector
    d1: Vector
    u2: Vector
    d2: Vector


def prepare(library: SpectralLibrary, config: SolverConfig, /) -> CsunsalWorkspace:
    signatures: int = library.signatures

    factorization: SpdFactorization = spd_factorize(
        gram_plus_diag(library.matrix, 1.0)
    )
    binv_ones: Vector = spd_solve(factorization, np.ones(signatures))

    c_vec: Vector = (
        binv_ones / float(np.sum(binv_ones))
        if config.enforce_asc
        else np.zeros(signatures)
    )
    c_vec.setflags(write=False)

    return CsunsalWorkspace(
        library=library,
        factorization=factorization,
        c_vec=c_vec,
        enforce_asc=config.enforce_asc,
    )


def x_update(
    workspace: CsunsalWorkspace, u1: Vector, d1: Vector, u2: Vector, d2: Vector
) -> Vector:
    """Minimize `‖Ax − u₁ − d₁‖² + ‖x − u₂ − d₂‖²` subject to `1ᵀx = 1`."""
    w: Vector = workspace.library.matrix.T @ (u1 + d1) + (u2 + d2)
    z: Vector = spd_solve(workspace.factorization, w)
    x: Vector = z - workspace.c_vec * (np.sum(z) - 1.0)

    if workspace.enforce_asc:
        # Remove rounding drift along 1 so that 1ᵀx = 1 to machine precision
        x -= (np.sum(x) - 1.0) / x.shape[0]

    return x


def u1_update(
    workspace: CsunsalWorkspace,
    x: Vector,
    d1: Vector,
    y: Vector,
    delta: float,
    *,
    ax: Optional[Vector] = None,
) -> Vector:
    if ax is None:
        ax = workspace.library.matrix @ x

    return project_ball(ax - d1, Ball.around(y, delta))


def u2_update(
    x: Vector, d2: Vector, lambda_: float, mu: float, anc: bool
) -> Vector:
    nu: Vector = x - d2
    shrink: Callable[..., Vector] = soft_threshold_nonneg if anc else soft_threshold

    return shrink(nu, lambda_ / mu, out=nu)


def _initial(
    value: Optional[Tuple[VectorLike, VectorLike]],
    default: Tuple[Vector, Vector],
    /,
    *,
    subject: str,
) -> Tuple[Vector, Vector]:
    if value is None:
        return default

    first: Vector = as_vector(value[0], subject=f"{subject}[0]")
    second: Vector = as_vector(value[1], subject=f"{subject}[1]")

    if first.shape != default[0].shape:
        raise DimensionMismatch(
            f"{subject}[0]", expected=default[0].shape, actual=first.shape
        )
    if second.shape != default[1].shape:
        raise DimensionMismatch(
            f"{subject}[1]", expected=default[1].shape, actual=second.shape
        )

    return first, second


def solve(
    library: SpectralLibrary,
    y: VectorLike,
    config: SolverConfig,
    /,
    *,
    workspace: Optional[CsunsalWorkspace] = None,
    u0: Optional[Tuple[VectorLike, VectorLike]] = None,
    d0: Optional[Tuple[VectorLike, VectorLike]] = None,
    callback: Optional[Callable[[int, SplitIterate], None]] = None,
) -> SolveResult:
    problem: Problem = validate(library, y, config)
    config = problem.config
    observation: Vector = problem.y

    if not config.kind.uses_split:
        raise InvalidParameter(
            "problem", str(config.kind), "C-SUnSAL solves cbp/cbpdn"
        )

    if workspace is None:
        workspace = prepare(library, config)
    elif workspace.enforce_asc != config.enforce_asc:
        raise InvalidParameter(
            "workspace", workspace.enforce_asc, "prepared with a different ASC setting"
        )
    else:
        check_workspace_library(workspace.library, library)

    signatures: int = library.signatures
    bands: int = library.bands
    matrix: Matrix = library.matrix
    mu: float = config.mu
    tolerance: float = config.primal_tol * math.sqrt(signatures)

    u1: Vector
    u2: Vector
    d1: Vector
    d2: Vector
    u1, u2 = _initial(
        u0, (observation.copy(), np.zeros(signatures)), subject="u0"
    )
    d1, d2 = _initial(d0, (np.zeros(bands), np.zeros(signatures)), subject="d0")

    primal_history: List[float] = []
    dual_history: List[float] = []
    objective_history: List[float] = []
    converged: bool = False
    x: Vector = x_update(workspace, u1, d1, u2, d2)

    logger.info(
        "C-SUnSAL %s: bands=%d signatures=%d delta=%g lambda/mu=%g iters=%d",
        config.kind,
        bands,
        signatures,
        config.delta,
        config.threshold,
        config.max_iters,
    )

    iteration: int
    for iteration in range(1, config.max_iters + 1):
        if iteration > 1:
            x = x_update(workspace, u1, d1, u2, d2)

        ax: Vector = matrix @ x
        u1_previous: Vector = u1
        u2_previous: Vector = u2

        u1 = u1_update(workspace, x, d1, observation, config.delta, ax=ax)
        u2 = u2_update(x, d2, config.lambda_, mu, config.enforce_anc)
        d1 = d1 - (ax - u1)
        d2 = d2 - (x - u2)

        check_divergence(iteration, x, u1, u2, d1, d2)

        primal: float = max(
            float(np.linalg.norm(ax - u1)), float(np.linalg.norm(x - u2))
        )
        dual: float = mu * math.hypot(
            float(np.linalg.norm(u1 - u1_previous)),
            float(np.linalg.norm(u2 - u2_previous)),
        )
        returned: Vector = (
            u2 if config.return_iterate is ReturnIterate.U_ITERATE else x
        )
        value: float = objective(library, observation, config, returned)

        primal_history.append(primal)
        dual_history.append(dual)
        objective_history.append(value)

        logger.debug(
            "iter %4d  primal %.3e  dual %.3e  objective %.6e",
            iteration,
            primal,
            dual,
            value,
        )

        if callback is not None:
            callback(iteration, SplitIterate(x=x, u1=u1, d1=d1, u2=u2, d2=d2))

        if tolerance > 0 and primal <= tolerance:
            converged = True
            break

    abundances: Vector = u2 if config.return_iterate is ReturnIterate.U_ITERATE else x
    asc, anc, data = violations(library, observation, abundances)

    return SolveResult(
        kind=config.kind,
        abundances=abundances,
        x=x,
        u=u2,
        iterations=len(primal_history),
        primal_residual_history=primal_history,
        dual_residual_history=dual_history,
        objective_history=objective_history,
        asc_violation=asc,
        anc_violation=anc,
        data_residual=data,
        converged=converged,
    )
