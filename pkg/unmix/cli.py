"""
Command-line interface: `unmix solve`, `unmix synth` and `unmix bench`.

Results go to standard output (or the requested files); diagnostics go to
standard error. Exit status is 0 on success, 1 on invalid input or I/O
failure and 2 when a solver diverges.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Callable, Dict, List, NoReturn, Optional, Sequence

from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler

from . import api
from .bench import BenchReport, preset_grid, run_benchmark
from .constants import JSON_SCHEMA_VERSION, PACKAGE_NAME, PACKAGE_VERSION
from .datagen import (
    SynthesisSpec,
    SyntheticProblem,
    bundled_library,
    load_library,
    load_vector,
    save_library,
    save_vector,
    synthesize,
)
from .defaults import (
    DEFAULT_BENCH_RUNS,
    DEFAULT_BENCH_SEED,
    DEFAULT_BENCH_SOLVERS,
    DEFAULT_DELTA,
    DEFAULT_LAMBDA_SWEEP,
    DEFAULT_LOWPASS_WINDOW,
    DEFAULT_MAX_ITERS,
    DEFAULT_NOISE_KIND,
    DEFAULT_PRIMAL_TOL,
    DEFAULT_PROBLEM_KIND,
    DEFAULT_RETURN_ITERATE,
    DEFAULT_SNR_DB,
    DEFAULT_SPARSITY,
)
from .enums import NoiseKind, Preset, ProblemKind, ReturnIterate, SolverName
from .errors import (
    DimensionMismatch,
    InvalidInputError,
    InvalidParameter,
    NonPositiveMu,
    SolverError,
)
from .models import SolveResult, SolverConfig, SpectralLibrary
from .problem import default_lambda
from .settings import Settings
from .types import Vector

__all__ = (
    "EXIT_OK",
    "EXIT_INVALID_INPUT",
    "EXIT_SOLVER_FAILURE",
    "build_parser",
    "main",
)

logger: logging.Logger = logging.getLogger(__name__)

EXIT_OK: int = 0
EXIT_INVALID_INPUT: int = 1
EXIT_SOLVER_FAILURE: int = 2

# Error parameters that are not spelled like their flag
FLAGS: Dict[str, str] = {
    "iters": "--iters",
    "tol": "--tol",
    "snr": "--snr",
    "window": "--window",
    "lambda": "--lambda",
    "lambdas": "--lambdas",
    "library": "library file",
    "observation": "observation file",
}


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID_INPUT, f"{self.prog}: error: {message}\n")


def _choices(enum: type) -> List[str]:
    return [member.value for member in enum]  # type: ignore[attr-defined]


def _comma_list(text: str) -> List[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


def build_parser() -> argparse.ArgumentParser:
    common: argparse.ArgumentParser = _ArgumentParser(add_help=False)
    common.add_argument(
        "--verbose", action="store_true", help="log every solver iteration to stderr"
    )

    parser: argparse.ArgumentParser = _ArgumentParser(
        prog=PACKAGE_NAME,
        description="Constrained sparse regression for spectral unmixing",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {PACKAGE_VERSION}"
    )

    commands = parser.add_subparsers(dest="command", required=True)

    solve: argparse.ArgumentParser = commands.add_parser(
        "solve",
        parents=[common],
        help="unmix one observation against a library",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    solve.add_argument("library", help="library file (k x n)")
    solve.add_argument("observation", help="observation vector file (k x 1)")
    solve.add_argument(
        "--problem",
        choices=_choices(ProblemKind),
        default=str(DEFAULT_PROBLEM_KIND),
        help="problem variant",
    )
    solve.add_argument(
        "--lambda",
        dest="lambda_",
        type=float,
        default=None,
        help="sparsity weight (csr: defaults to 1e-3 * max|A^T y|)",
    )
    solve.add_argument(
        "--delta", type=float, default=DEFAULT_DELTA, help="noise ball radius (cbpdn)"
    )
    solve.add_argument(
        "--mu",
        type=float,
        default=None,
        help="augmented Lagrangian weight (0.01 for cls/csr, 1 for cbp/cbpdn)",
    )
    solve.add_argument(
        "--iters", type=int, default=DEFAULT_MAX_ITERS, help="maximum iterations"
    )
    solve.add_argument(
        "--tol",
        type=float,
        default=DEFAULT_PRIMAL_TOL,
        help="stop once the primal residual is below tol * sqrt(n); 0 disables",
    )
    solve.add_argument(
        "--no-asc", action="store_true", help="drop the sum-to-one constraint"
    )
    solve.add_argument(
        "--no-anc", action="store_true", help="drop the nonnegativity constraint"
    )
    solve.add_argument(
        "--return",
        dest="return_iterate",
        choices=_choices(ReturnIterate),
        default=str(DEFAULT_RETURN_ITERATE),
        help="iterate to return",
    )
    solve.add_argument(
        "--output", default=None, help="output file (default: standard output)"
    )
    solve.add_argument(
        "--json",
        action="store_true",
        help="write abundances, residuals and histories as JSON",
    )
    solve.set_defaults(handler=cmd_solve)

    synth: argparse.ArgumentParser = commands.add_parser(
        "synth",
        parents=[common],
        help="generate a synthetic problem",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    synth.add_argument("--k", type=int, default=200, help="number of bands")
    synth.add_argument("--n", type=int, default=400, help="number of signatures")
    synth.add_argument(
        "--s", type=int, default=DEFAULT_SPARSITY, help="number of nonzero abundances"
    )
    synth.add_argument(
        "--snr", type=float, default=DEFAULT_SNR_DB, help="target SNR in dB (inf: none)"
    )
    synth.add_argument("--seed", type=int, default=0, help="random seed")
    synth.add_argument(
        "--noise",
        choices=_choices(NoiseKind),
        default=str(DEFAULT_NOISE_KIND),
        help="noise model",
    )
    synth.add_argument(
        "--window",
        type=int,
        default=DEFAULT_LOWPASS_WINDOW,
        help="moving-average length of low-pass noise",
    )
    synth.add_argument(
        "--library",
        default=None,
        help="use this library instead of a Gaussian one (overrides --k/--n)",
    )
    synth.add_argument("--out-dir", default=".", help="directory for the three files")
    synth.set_defaults(handler=cmd_synth)

    bench: argparse.ArgumentParser = commands.add_parser(
        "bench",
        parents=[common],
        help="benchmark the solvers against the active-set baselines",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    bench.add_argument(
        "--preset", choices=_choices(Preset), default=None, help="predefined grid"
    )
    bench.add_argument(
        "--library",
        default=None,
        help="library file (default: Gaussian; table2-like: bundled example)",
    )
    bench.add_argument(
        "--snr",
        type=float,
        action="append",
        default=None,
        help=f"input SNR in dB, repeatable (without a preset: {DEFAULT_SNR_DB:g})",
    )
    bench.add_argument("--k", type=int, default=200, help="number of bands")
    bench.add_argument("--n", type=int, default=400, help="number of signatures")
    bench.add_argument(
        "--s", type=int, default=DEFAULT_SPARSITY, help="number of nonzero abundances"
    )
    bench.add_argument(
        "--runs", type=int, default=None, help="runs per cell (preset value, else 10)"
    )
    bench.add_argument(
        "--seed", type=int, default=DEFAULT_BENCH_SEED, help="base random seed"
    )
    bench.add_argument(
        "--iters", type=int, default=DEFAULT_MAX_ITERS, help="ADMM iterations"
    )
    bench.add_argument(
        "--solvers",
        default=",".join(str(solver) for solver in DEFAULT_BENCH_SOLVERS),
        help=f"comma-separated subset of {','.join(_choices(SolverName))}",
    )
    bench.add_argument(
        "--lambdas",
        default=",".join(f"{factor:g}" for factor in DEFAULT_LAMBDA_SWEEP),
        help="comma-separated lambda factors of max|A^T y| swept for sunsal",
    )
    bench.add_argument(
        "--mu", type=float, default=None, help="force mu (default: 0.01 + 10 * lambda)"
    )
    bench.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker threads (default: UNMIX_THREADS, else logical cores)",
    )
    bench.add_argument(
        "--timing", action="store_true", help="run sequentially for stable timings"
    )
    bench.add_argument("--csv", default=None, help="write the CSV report here")
    bench.add_argument("--json", default=None, help="write the JSON report here")
    bench.add_argument(
        "--noise",
        choices=_choices(NoiseKind),
        default=str(DEFAULT_NOISE_KIND),
        help="noise model",
    )
    bench.add_argument(
        "--window",
        type=int,
        default=DEFAULT_LOWPASS_WINDOW,
        help="moving-average length of low-pass noise",
    )
    bench.set_defaults(handler=cmd_bench)

    return parser


def configure_logging(verbose: bool, level: str, /) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def _write(text: str, output: Optional[str], /) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def cmd_solve(args: argparse.Namespace, settings: Settings, /) -> int:
    library: SpectralLibrary = load_library(args.library)
    y: Vector = load_vector(args.observation, parameter="observation")
    kind: ProblemKind = ProblemKind(args.problem)

    if y.shape[0] != library.bands:
        raise DimensionMismatch(
            "observation",
            expected=(library.bands,),
            actual=y.shape,
            parameter="observation",
        )

    lambda_: Optional[float] = args.lambda_

    if lambda_ is None and kind is ProblemKind.CSR:
        lambda_ = default_lambda(library, y)

        logger.info("Using lambda = %g", lambda_)

    config: SolverConfig = SolverConfig(
        kind=kind,
        lambda_=lambda_,
        delta=args.delta,
        mu=args.mu,
        max_iters=args.iters,
        primal_tol=args.tol,
        enforce_asc=not args.no_asc,
        enforce_anc=not args.no_anc,
        return_iterate=ReturnIterate(args.return_iterate),
    )
    result: SolveResult = api.solve(library, y, config)

    logger.info(
        "%d iterations, primal residual %.3e, ASC violation %.3e",
        result.iterations,
        result.primal_residual_history[-1],
        result.asc_violation,
    )

    if args.json:
        _write(
            json.dumps({"schema": JSON_SCHEMA_VERSION, **result.to_dict()}, indent=2)
            + "\n",
            args.output,
        )
    elif args.output is None:
        save_vector(result.abundances, sys.stdout)
    else:
        save_vector(result.abundances, args.output)

    return EXIT_OK


def cmd_synth(args: argparse.Namespace, settings: Settings, /) -> int:
    library: Optional[SpectralLibrary] = (
        load_library(args.library) if args.library is not None else None
    )
    spec: SynthesisSpec = SynthesisSpec(
        k=library.bands if library is not None else args.k,
        n=library.signatures if library is not None else args.n,
        s=args.s,
        target_snr_db=args.snr,
        noise_kind=NoiseKind(args.noise),
        lowpass_window=args.window,
        seed=args.seed,
    )
    problem: SyntheticProblem = synthesize(spec, library=library)

    out_dir: Path = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    save_library(problem.library, out_dir / "library.txt")
    save_vector(problem.x_true, out_dir / "x_true.txt")
    save_vector(problem.y_noisy, out_dir / "y.txt")

    logger.info("Wrote library.txt, x_true.txt and y.txt to %s", out_dir)

    sys.stdout.write(f"realized_snr_db {problem.realized_snr_db:.6f}\n")
    sys.stdout.write(f"noise_norm {problem.noise_norm:.17g}\n")

    return EXIT_OK


def _parse_solvers(text: str, /) -> List[SolverName]:
    try:
        return [SolverName(name) for name in _comma_list(text)]
    except ValueError as error:
        raise InvalidParameter("solvers", text, str(error)) from error


def _parse_lambdas(text: str, /) -> List[float]:
    try:
        return [float(factor) for factor in _comma_list(text)]
    except ValueError as error:
        raise InvalidParameter("lambdas", text, str(error)) from error


def _thread_count(args: argparse.Namespace, settings: Settings, /) -> int:
    if args.timing:
        return 1
    if args.threads is not None:
        if args.threads < 1:
            raise InvalidParameter("threads", args.threads, "must be at least 1")

        return args.threads
    if settings.threads is not None:
        return settings.threads

    return os.cpu_count() or 1


def cmd_bench(args: argparse.Namespace, settings: Settings, /) -> int:
    solvers: List[SolverName] = _parse_solvers(args.solvers)
    lambdas: List[float] = _parse_lambdas(args.lambdas)
    threads: int = _thread_count(args, settings)
    library: Optional[SpectralLibrary] = (
        load_library(args.library) if args.library is not None else None
    )
    noise_kind: NoiseKind = NoiseKind(args.noise)

    if args.mu is not None and not args.mu > 0:
        raise NonPositiveMu(args.mu)

    grid: List[SynthesisSpec]
    runs: int
    if args.preset is not None:
        preset: Preset = Preset(args.preset)

        if preset is Preset.TABLE2_LIKE and library is None:
            library = bundled_library()

        grid, runs = preset_grid(
            preset,
            library=library,
            seed=args.seed,
            runs=args.runs,
            noise_kind=noise_kind,
            lowpass_window=args.window,
        )
    else:
        k: int = library.bands if library is not None else args.k
        n: int = library.signatures if library is not None else args.n
        grid = [
            SynthesisSpec(
                k=k,
                n=n,
                s=args.s,
                target_snr_db=snr,
                noise_kind=noise_kind,
                lowpass_window=args.window,
                seed=args.seed,
            )
            for snr in (args.snr or [DEFAULT_SNR_DB])
        ]
        runs = args.runs if args.runs is not None else DEFAULT_BENCH_RUNS

    if args.preset is not None and args.snr:
        grid = [spec for spec in grid if spec.target_snr_db in args.snr]

    report: BenchReport = run_benchmark(
        grid,
        solvers,
        lambdas,
        runs,
        threads=threads,
        iters=args.iters,
        mu=args.mu,
        library=library,
    )

    report.render(Console())

    if args.csv is not None:
        with open(args.csv, "w", encoding="utf-8", newline="") as stream:
            report.to_csv(stream)
    if args.json is not None:
        Path(args.json).write_text(report.to_json() + "\n", encoding="utf-8")

    failed: int = sum(row.failed for row in report.rows)

    if failed:
        logger.warning("%d benchmark cell(s) failed", failed)

    return EXIT_OK


def _describe(error: InvalidInputError, /) -> str:
    parameter: Optional[str] = error.parameter

    if parameter is None:
        return str(error)

    return f"{FLAGS.get(parameter, '--' + parameter.replace('_', '-'))}: {error}"


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser: argparse.ArgumentParser = build_parser()
    args: argparse.Namespace = parser.parse_args(argv)

    try:
        settings: Settings = Settings()
    except (InvalidInputError, ValidationError) as error:
        configure_logging(args.verbose, "WARNING")
        logger.error("Invalid UNMIX_* environment: %s", error)

        return EXIT_INVALID_INPUT

    configure_logging(args.verbose, settings.log_level)

    handler: Callable[[argparse.Namespace, Settings], int] = args.handler

    try:
        return handler(args, settings)
    except SolverError as error:
        logger.error("Solver failed: %s", error)

        return EXIT_SOLVER_FAILURE
    except InvalidInputError as error:
        logger.error("%s", _describe(error))

        return EXIT_INVALID_INPUT
    except ValidationError as error:
        logger.error("%s", error)

        return EXIT_INVALID_INPUT
    except OSError as error:
        logger.error("%s", error)

        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())
