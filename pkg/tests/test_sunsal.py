from typing import List, Tuple

import numpy as np
import pytest

from unmix import sunsal
from unmix.enums import ProblemKind, ReturnIterate
from unmix.errors import DimensionMismatch, InvalidParameter, NonFinite
from unmix.linalg import gram_plus_diag
from unmix.models import SolveResult, SolverConfig, SpectralLibrary
from unmix.oracles import fcls, grid_csr
from unmix.types import Matrix, Vector

from . import utils


def test_prepare() -> None:
    library: SpectralLibrary = SpectralLibrary.from_array(np.eye(2))
    workspace: sunsal.SunsalWorkspace = sunsal.prepare(
        library, np.array([1.0, 0.0]), SolverConfig(mu=1.0)
    )

    np.testing.assert_allclose(workspace.factorization.reconstruct(), 2 * np.eye(2))
    np.testing.assert_allclose(workspace.c_vec, [0.5, 0.5])
    assert workspace.ones_binv_ones == pytest.approx(1.0)
    np.testing.assert_array_equal(workspace.aty, [1.0, 0.0])
    assert not workspace.c_vec.flags.writeable


def test_prepare_without_asc() -> None:
    library: SpectralLibrary = SpectralLibrary.from_array(np.eye(2))
    workspace: sunsal.SunsalWorkspace = sunsal.prepare(
        library, np.ones(2), SolverConfig(mu=1.0, enforce_asc=False)
    )

    np.testing.assert_array_equal(workspace.c_vec, [0.0, 0.0])


def test_prepare_large_mu(library: SpectralLibrary) -> None:
    workspace: sunsal.SunsalWorkspace = sunsal.prepare(
        library, np.ones(20), SolverConfig(mu=1e6)
    )

    assert np.sum(workspace.c_vec) == pytest.approx(1.0, abs=1e-10)


def test_x_update() -> None:
    library: SpectralLibrary = SpectralLibrary.from_array(np.eye(2))
    y: Vector = np.array([1.0, 0.0])
    zeros: Vector = np.zeros(2)

    with_asc: sunsal.SunsalWorkspace = sunsal.prepare(library, y, SolverConfig(mu=1.0))
    without_asc: sunsal.SunsalWorkspace = sunsal.prepare(
        library, y, SolverConfig(mu=1.0, enforce_asc=False)
    )

    np.testing.assert_allclose(sunsal.x_update(with_asc, zeros, zeros, 1.0), [0.75, 0.25])
    np.testing.assert_allclose(sunsal.x_update(without_asc, zeros, zeros, 1.0), [0.5, 0.0])

    with pytest.raises(DimensionMismatch):
        sunsal.x_update(with_asc, np.zeros(3), np.zeros(3), 1.0)


def test_x_update_kkt() -> None:
    rng: np.random.Generator = np.random.default_rng(0)

    _: int
    for _ in range(1000):
        k: int = int(rng.integers(3, 16))
        n: int = int(rng.integers(2, 11))
        mu: float = float(10 ** rng.uniform(-3, 1))
        library: SpectralLibrary = SpectralLibrary(rng.standard_normal((k, n)))
        y: Vector = rng.standard_normal(k)
        u: Vector = rng.standard_normal(n)
        d: Vector = rng.standard_normal(n)

        workspace: sunsal.SunsalWorkspace = sunsal.prepare(
            library, y, SolverConfig(mu=mu)
        )
        x: Vector = sunsal.x_update(workspace, u, d, mu)

        w: Vector = library.matrix.T @ y + mu * (u + d)
        residual: Vector = gram_plus_diag(library.matrix, mu) @ x - w

        assert np.std(residual) <= 1e-8 * (1 + np.max(np.abs(w)))
        assert abs(np.sum(x) - 1) <= 1e-12 * max(1.0, float(np.max(np.abs(x))))


def test_solve_identity_library() -> None:
    library: SpectralLibrary = SpectralLibrary.from_array(np.eye(2))

    result: SolveResult = sunsal.solve(library, np.array([0.3, 0.7]), SolverConfig())

    np.testing.assert_allclose(result.abundances, [0.3, 0.7], atol=1e-6)
    assert result.kind is ProblemKind.CLS
    assert result.iterations == 200


def test_solve_active_constraint() -> None:
    library: SpectralLibrary = SpectralLibrary.from_array(np.eye(2))

    result: SolveResult = sunsal.solve(
        library, np.array([2.0, 0.0]), SolverConfig(mu=1.0, max_iters=500)
    )

    np.testing.assert_allclose(result.abundances, [1.0, 0.0], atol=1e-6)


def test_solve_matches_fcls_small() -> None:
    library, x_true, y = utils.build_feasible_problem(k=20, n=5, s=3, seed=4)

    result: SolveResult = sunsal.solve(library, y, SolverConfig(max_iters=1000))

    np.testing.assert_allclose(result.abundances, fcls(library.matrix, y), atol=1e-4)


def test_solve_cls_matches_fcls() -> None:
    matches: int = 0

    seed: int
    for seed in range(50):
        library, _, y = utils.build_feasible_problem(k=20, n=10, s=4, seed=seed)

        result: SolveResult = sunsal.solve(
            library, y, SolverConfig(kind=ProblemKind.CLS, mu=0.01, max_iters=1000)
        )
        oracle: Vector = fcls(library.matrix, y)

        matches += int(np.max(np.abs(result.abundances - oracle)) <= 1e-4)

    assert matches >= 48


def test_solve_csr_penalty_is_constant_on_simplex() -> None:
    library, x_true, y = utils.build_feasible_problem(k=20, n=5, s=2, seed=8)

    result: SolveResult = sunsal.solve(
        library,
        y,
        SolverConfig(kind=ProblemKind.CSR, lambda_=0.5, mu=0.5, max_iters=2000),
    )

    np.testing.assert_allclose(result.abundances, x_true, atol=1e-4)


def test_solve_iterate_feasibility() -> None:
    seed: int
    for seed in range(50):
        library, _, y = utils.build_feasible_problem(k=15, n=8, s=3, seed=seed)
        noisy: Vector = y + 0.05 * utils.random_vector(15, seed)
        states: List[Tuple[int, sunsal.IterateState]] = []

        sunsal.solve(
            library,
            noisy,
            SolverConfig(kind=ProblemKind.CSR, lambda_=0.01, max_iters=50),
            callback=lambda iteration, state: states.append((iteration, state)),
        )

        assert [iteration for iteration, _ in states] == list(range(1, 51))

        state: sunsal.IterateState
        for _, state in states:
            assert abs(np.sum(state.x) - 1) <= 1e-12
            assert np.min(state.u) >= 0


def test_solve_histories(feasible_problem) -> None:
    library, _, y = feasible_problem

    result: SolveResult = sunsal.solve(library, y, SolverConfig(max_iters=30))

    assert result.iterations == 30
    assert len(result.primal_residual_history) == 30
    assert len(result.dual_residual_history) == 30
    assert len(result.objective_history) == 30
    assert np.all(np.isfinite(result.objective_history))
    assert not result.converged
    assert result.to_dict()["iterations"] == 30


def test_solve_primal_residual_vanishes() -> None:
    seed: int
    for seed in range(100):
        library, _, y = utils.build_feasible_problem(k=20, n=10, s=3, seed=seed)

        result: SolveResult = sunsal.solve(
            library, y, SolverConfig(max_iters=2000, primal_tol=1e-6 / np.sqrt(10))
        )

        assert result.converged
        assert result.primal_residual_history[-1] <= 1e-6


def test_solve_fixed_point_kkt() -> None:
    library, _, y = utils.build_feasible_problem(k=20, n=10, s=4, seed=3)
    noisy: Vector = y + 0.1 * utils.random_vector(20, 3)

    result: SolveResult = sunsal.solve(
        library, noisy, SolverConfig(mu=1.0, max_iters=20000, primal_tol=1e-10)
    )

    x: Vector = result.abundances
    gradient: Vector = library.matrix.T @ (library.matrix @ x - noisy)
    support: np.ndarray = x > 1e-6
    shifted: Vector = gradient - np.mean(gradient[support])

    assert result.converged
    assert np.all(np.abs(shifted[support]) <= 1e-4)
    assert np.all(shifted[~support] >= -1e-4)


def test_solve_return_iterate(feasible_problem) -> None:
    library, _, y = feasible_problem

    result: SolveResult = sunsal.solve(
        library, y, SolverConfig(max_iters=20, return_iterate=ReturnIterate.X_ITERATE)
    )

    np.testing.assert_array_equal(result.abundances, result.x)
    assert result.asc_violation <= 1e-12


def test_solve_warm_start_at_solution(feasible_problem) -> None:
    library, x_true, y = feasible_problem

    result: SolveResult = sunsal.solve(
        library, y, SolverConfig(max_iters=1), u0=x_true, d0=np.zeros(10)
    )

    np.testing.assert_allclose(result.abundances, x_true, atol=1e-10)


def test_solve_warm_start_dimension(feasible_problem) -> None:
    library, _, y = feasible_problem

    with pytest.raises(DimensionMismatch):
        sunsal.solve(library, y, SolverConfig(), u0=np.zeros(3))


def test_solve_shared_workspace(feasible_problem) -> None:
    library, _, y = feasible_problem
    config: SolverConfig = SolverConfig(max_iters=50)
    workspace: sunsal.SunsalWorkspace = sunsal.prepare(library, np.ones(20), config)

    shared: SolveResult = sunsal.solve(library, y, config, workspace=workspace)
    fresh: SolveResult = sunsal.solve(library, y, config)

    np.testing.assert_allclose(shared.abundances, fresh.abundances, atol=1e-12)

    with pytest.raises(InvalidParameter):
        sunsal.solve(library, y, SolverConfig(mu=0.5), workspace=workspace)


def test_solve_workspace_for_another_library(feasible_problem) -> None:
    library, _, y = feasible_problem
    config: SolverConfig = SolverConfig(max_iters=50)
    workspace: sunsal.SunsalWorkspace = sunsal.prepare(
        utils.build_library(seed=1), y, config
    )

    with pytest.raises(InvalidParameter):
        sunsal.solve(library, y, config, workspace=workspace)


def test_solve_rejects_split_kinds(feasible_problem) -> None:
    library, _, y = feasible_problem

    with pytest.raises(InvalidParameter):
        sunsal.solve(library, y, SolverConfig(kind=ProblemKind.CBP))


def test_solve_does_not_mutate_inputs(feasible_problem) -> None:
    library, _, y = feasible_problem
    original: Vector = y.copy()

    sunsal.solve(library, y, SolverConfig(max_iters=5))

    np.testing.assert_array_equal(y, original)


def test_check_divergence() -> None:
    sunsal.check_divergence(1, np.ones(2), np.full(2, 1e11))

    with pytest.raises(NonFinite) as error:
        sunsal.check_divergence(7, np.ones(2), np.array([0.0, -1e13]))

    assert error.value.iteration == 7

    with pytest.raises(NonFinite):
        sunsal.check_divergence(1, np.array([np.nan]))


def test_solve_without_anc() -> None:
    library: Matrix = np.eye(2)

    result: SolveResult = sunsal.solve(
        SpectralLibrary.from_array(library),
        np.array([2.0, -1.0]),
        SolverConfig(enforce_anc=False, mu=1.0, max_iters=300),
    )

    np.testing.assert_allclose(result.abundances, [2.0, -1.0], atol=1e-6)


def test_solve_csr_matches_grid_oracle() -> None:
    step: float = 1e-3

    seed: int
    for seed in range(100):
        rng: np.random.Generator = np.random.default_rng(seed)
        n: int = int(rng.integers(2, 4))
        library: SpectralLibrary = SpectralLibrary(rng.standard_normal((6, n)))
        y: Vector = rng.standard_normal(6)
        lambda_: float = float(rng.uniform(0, 0.5))

        result: SolveResult = sunsal.solve(
            library,
            y,
            SolverConfig(
                kind=ProblemKind.CSR,
                lambda_=lambda_,
                mu=1.0,
                max_iters=20000,
                primal_tol=1e-10,
            ),
        )
        grid: Vector = grid_csr(library.matrix, y, lambda_, step)

        matrix: Matrix = library.matrix
        lipschitz: float = (
            np.linalg.norm(matrix.T @ matrix, 2)
            + np.linalg.norm(matrix.T @ y)
            + lambda_ * np.sqrt(n)
        )
        solved: float = result.objective_history[-1]
        searched: float = 0.5 * float(np.sum((matrix @ grid - y) ** 2)) + lambda_

        assert result.converged
        assert abs(solved - searched) <= lipschitz * step * np.sqrt(n)
