"""
Sparse unmixing by variable splitting and augmented Lagrangian.

Solves the constrained sparse regression problem

    min (1/2)‖Ax − y‖² + λ‖x‖₁   subject to   x ≥ 0,  1ᵀx = 1

(CLS is the case λ = 0) with the splitting `x = u`.
"""

import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from .defaults import DIVERGENCE_BOUND
from .enums import ReturnIterate
from .errors import DimensionMismatch, InvalidParameter, NonFinite
from .linalg import SpdFactorization, as_vector, gram_plus_diag, spd_factorize, spd_solve
from .models import SolveResult, SolverConfig, SpectralLibrary
from .problem import Problem, objective, validate, violations
from .prox import soft_threshold, soft_threshold_nonneg
from .types import Vector, VectorLike

__all__ = (
    "SunsalWorkspace",
    "IterateState",
    "prepare",
    "x_update",
    "check_divergence",
    "check_workspace_library",
    "solve",
)

logger: logging.Logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SunsalWorkspace:
    library: SpectralLibrary
    factorization: SpdFactorization
    c_vec: Vector
    ones_binv_ones: float
    aty: Vector
    mu: float
    enforce_asc: bool

    def for_observation(self, y: Vector, /) -> "SunsalWorkspace":
        return dataclasses.replace(self, aty=self.library.matrix.T @ y)


@dataclass(frozen=True)
class IterateState:
    x: Vector
    u: Vector
    d: Vector


def prepare(
    library: SpectralLibrary, y: VectorLike, config: SolverConfig, /
) -> SunsalWorkspace:
    observation: Vector = as_vector(y, subject="observation")
    signatures: int = library.signatures

    factorization: SpdFactorization = spd_factorize(
        gram_plus_diag(library.matrix, config.mu)
    )
    binv_ones: Vector = spd_solve(factorization, np.ones(signatures))
    ones_binv_ones: float = float(np.sum(binv_ones))

    c_vec: Vector = (
        binv_ones / ones_binv_ones if config.enforce_asc else np.zeros(signatures)
    )
    c_vec.setflags(write=False)

    return SunsalWorkspace(
        library=library,
        factorization=factorization,
        c_vec=c_vec,
        ones_binv_ones=ones_binv_ones,
        aty=library.matrix.T @ observation,
        mu=config.mu,
        enforce_asc=config.enforce_asc,
    )


def x_update(workspace: SunsalWorkspace, u: Vector, d: Vector, mu: float) -> Vector:
    """
    Minimize `(1/2)‖Ax − y‖² + (μ/2)‖x − u − d‖²` subject to `1ᵀx = 1`.

    The solution is `B⁻¹w − C(1ᵀB⁻¹w − 1)` with `w = Aᵀy + μ(u + d)`; with
    the sum constraint off `C = 0` and this is the unconstrained minimizer.
    """
    if u.shape != workspace.aty.shape or d.shape != workspace.aty.shape:
        raise DimensionMismatch(
            "iterate", expected=workspace.aty.shape, actual=u.shape
        )

    w: Vector = workspace.aty + mu * (u + d)
    z: Vector = spd_solve(workspace.factorization, w)
    x: Vector = z - workspace.c_vec * (np.sum(z) - 1.0)

    if workspace.enforce_asc:
        # Remove rounding drift along 1 so that 1ᵀx = 1 to machine precision
        x -= (np.sum(x) - 1.0) / x.shape[0]

    return x


def check_divergence(iteration: int, *vectors: Vector) -> None:
    magnitude: float = max(float(np.max(np.abs(vector))) for vector in vectors)

    if not math.isfinite(magnitude) or magnitude > DIVERGENCE_BOUND:
        raise NonFinite(iteration, magnitude)


def check_workspace_library(
    prepared: SpectralLibrary, library: SpectralLibrary, /
) -> None:
    if prepared is library or np.array_equal(prepared.matrix, library.matrix):
        return

    raise InvalidParameter(
        "workspace",
        f"{prepared.bands}x{prepared.signatures}",
        "prepared for a different library",
    )


def _initial(
    value: Optional[VectorLike], size: int, /, *, subject: str
) -> Vector:
    if value is None:
        return np.zeros(size)

    vector: Vector = as_vector(value, subject=subject)

    if vector.shape != (size,):
        raise DimensionMismatch(subject, expected=(size,), actual=vector.shape)

    return vector


def solve(
    library: SpectralLibrary,
    y: VectorLike,
    config: SolverConfig,
    /,
    *,
    workspace: Optional[SunsalWorkspace] = None,
    u0: Optional[VectorLike] = None,
    d0: Optional[VectorLike] = None,
    callback: Optional[Callable[[int, IterateState], None]] = None,
) -> SolveResult:
    problem: Problem = validate(library, y, config)
    config = problem.config

    if config.kind.uses_split:
        raise InvalidParameter("problem", str(config.kind), "SUnSAL solves cls/csr")

    if workspace is None:
        workspace = prepare(library, problem.y, config)
    elif workspace.mu != config.mu or workspace.enforce_asc != config.enforce_asc:
        raise InvalidParameter(
            "workspace", workspace.mu, "prepared with a different mu or ASC setting"
        )
    else:
        check_workspace_library(workspace.library, library)
        workspace = workspace.for_observation(problem.y)

    signatures: int = library.signatures
    mu: float = config.mu
    threshold: float = config.threshold
    shrink: Callable[..., Vector] = (
        soft_threshold_nonneg if config.enforce_anc else soft_threshold
    )
    tolerance: float = config.primal_tol * math.sqrt(signatures)

    u: Vector = _initial(u0, signatures, subject="u0")
    d: Vector = _initial(d0, signatures, subject="d0")
    x: Vector = x_update(workspace, u, d, mu)

    primal_history: List[float] = []
    dual_history: List[float] = []
    objective_history: List[float] = []
    converged: bool = False

    logger.info(
        "SUnSAL %s: bands=%d signatures=%d lambda=%g mu=%g iters=%d",
        config.kind,
        library.bands,
        signatures,
        config.lambda_,
        mu,
        config.max_iters,
    )

    iteration: int
    for iteration in range(1, config.max_iters + 1):
        if iteration > 1:
            x = x_update(workspace, u, d, mu)

        u_previous: Vector = u
        nu: Vector = x - d
        u = shrink(nu, threshold, out=nu)
        d = d - (x - u)

        check_divergence(iteration, x, u, d)

        primal: float = float(np.linalg.norm(x - u))
        dual: float = mu * float(np.linalg.norm(u - u_previous))
        returned: Vector = u if config.return_iterate is ReturnIterate.U_ITERATE else x
        value: float = objective(library, problem.y, config, returned)

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
            callback(iteration, IterateState(x=x, u=u, d=d))

        if tolerance > 0 and primal <= tolerance:
            converged = True
            break

    abundances: Vector = u if config.return_iterate is ReturnIterate.U_ITERATE else x
    asc, anc, data = violations(library, problem.y, abundances)

    return SolveResult(
        kind=config.kind,
        abundances=abundances,
        x=x,
        u=u,
        iterations=len(primal_history),
        primal_residual_history=primal_history,
        dual_residual_history=dual_history,
        objective_history=objective_history,
        asc_violation=asc,
        anc_violation=anc,
        data_residual=data,
        converged=converged,
    )
