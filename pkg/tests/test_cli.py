import csv
import json
from pathlib import Path
from typing import Any, Dict, List

import numpy as np
import pytest

from unmix import cli, datagen
from unmix.models import SpectralLibrary
from unmix.types import Vector

SOLVE_FLAGS: List[str] = [
    "--problem",
    "--lambda",
    "--delta",
    "--mu",
    "--iters",
    "--tol",
    "--no-asc",
    "--no-anc",
    "--return",
    "--output",
    "--json",
    "--verbose",
]
SYNTH_FLAGS: List[str] = [
    "--k",
    "--n",
    "--s",
    "--snr",
    "--seed",
    "--noise",
    "--window",
    "--library",
    "--out-dir",
]
BENCH_FLAGS: List[str] = [
    "--preset",
    "--library",
    "--snr",
    "--runs",
    "--seed",
    "--iters",
    "--solvers",
    "--lambdas",
    "--mu",
    "--threads",
    "--timing",
    "--csv",
    "--json",
]


@pytest.fixture
def bundled_problem(tmp_path: Path) -> Dict[str, Path]:
    library: SpectralLibrary = datagen.bundled_library()
    x_true: Vector = datagen.sparse_simplex_abundance(library.signatures, 3, 1)

    paths: Dict[str, Path] = {
        "library": tmp_path / "library.txt",
        "y": tmp_path / "y.txt",
    }

    datagen.save_library(library, paths["library"])
    datagen.save_vector(library.matrix @ x_true, paths["y"])

    return paths


def solve_args(paths: Dict[str, Path], *flags: str) -> List[str]:
    return ["solve", str(paths["library"]), str(paths["y"]), *flags]


@pytest.mark.parametrize(
    "command, flags",
    [("solve", SOLVE_FLAGS), ("synth", SYNTH_FLAGS), ("bench", BENCH_FLAGS)],
)
def test_help_mentions_every_flag(
    capsys: pytest.CaptureFixture, command: str, flags: List[str]
) -> None:
    with pytest.raises(SystemExit) as exit_info:
        cli.main([command, "--help"])

    assert exit_info.value.code == 0

    output: str = capsys.readouterr().out

    flag: str
    for flag in flags:
        assert flag in output


def test_solve(capsys: pytest.CaptureFixture, bundled_problem: Dict[str, Path]) -> None:
    code: int = cli.main(solve_args(bundled_problem, "--problem", "cls", "--iters", "2000"))

    assert code == cli.EXIT_OK

    lines: List[str] = capsys.readouterr().out.splitlines()
    values: Vector = np.array([float(line) for line in lines[1:]])

    assert lines[0] == "20 1"
    assert abs(np.sum(values) - 1) <= 1e-4


def test_solve_json(
    capsys: pytest.CaptureFixture, tmp_path: Path, bundled_problem: Dict[str, Path]
) -> None:
    output: Path = tmp_path / "result.json"

    code: int = cli.main(
        solve_args(
            bundled_problem, "--problem", "csr", "--json", "--output", str(output)
        )
    )
    document: Dict[str, Any] = json.loads(output.read_text(encoding="utf-8"))

    assert code == cli.EXIT_OK
    assert capsys.readouterr().out == ""
    assert document["schema"] == 1
    assert document["kind"] == "csr"
    assert len(document["abundances"]) == 20
    assert len(document["primal_residual_history"]) == 200


def test_solve_output_file(tmp_path: Path, bundled_problem: Dict[str, Path]) -> None:
    output: Path = tmp_path / "x.txt"

    code: int = cli.main(
        solve_args(bundled_problem, "--problem", "cbp", "--iters", "50", "--output", str(output))
    )

    assert code == cli.EXIT_OK
    assert datagen.load_vector(output).shape == (20,)


def test_solve_invalid_mu(
    capsys: pytest.CaptureFixture, bundled_problem: Dict[str, Path]
) -> None:
    assert cli.main(solve_args(bundled_problem, "--mu", "0")) == cli.EXIT_INVALID_INPUT

    captured = capsys.readouterr()

    assert "--mu" in captured.err
    assert captured.out == ""


def test_solve_cbp_with_delta(
    capsys: pytest.CaptureFixture, bundled_problem: Dict[str, Path]
) -> None:
    code: int = cli.main(solve_args(bundled_problem, "--problem", "cbp", "--delta", "0.1"))

    assert code == cli.EXIT_INVALID_INPUT
    assert "--delta" in capsys.readouterr().err


def test_solve_missing_file(capsys: pytest.CaptureFixture, tmp_path: Path) -> None:
    code: int = cli.main(
        ["solve", str(tmp_path / "missing.txt"), str(tmp_path / "y.txt")]
    )

    assert code == cli.EXIT_INVALID_INPUT
    assert capsys.readouterr().out == ""


def test_solve_dimension_mismatch(
    capsys: pytest.CaptureFixture, tmp_path: Path, bundled_problem: Dict[str, Path]
) -> None:
    short: Path = tmp_path / "short.txt"
    datagen.save_vector(np.ones(3), short)

    code: int = cli.main(["solve", str(bundled_problem["library"]), str(short)])

    assert code == cli.EXIT_INVALID_INPUT
    assert "observation file" in capsys.readouterr().err


def test_solve_divergence(
    monkeypatch: pytest.MonkeyPatch,
    capsys: pytest.CaptureFixture,
    bundled_problem: Dict[str, Path],
) -> None:
    monkeypatch.setattr("unmix.sunsal.DIVERGENCE_BOUND", 1e-3)

    code: int = cli.main(solve_args(bundled_problem))

    assert code == cli.EXIT_SOLVER_FAILURE
    assert "diverged" in capsys.readouterr().err


def test_synth(capsys: pytest.CaptureFixture, tmp_path: Path) -> None:
    flags: List[str] = ["--k", "200", "--n", "400", "--s", "5", "--snr", "30", "--seed", "7"]
    first: Path = tmp_path / "first"
    second: Path = tmp_path / "second"

    assert cli.main(["synth", *flags, "--out-dir", str(first)]) == cli.EXIT_OK
    assert cli.main(["synth", *flags, "--out-dir", str(second)]) == cli.EXIT_OK

    name: str
    for name in ("library.txt", "x_true.txt", "y.txt"):
        assert (first / name).read_bytes() == (second / name).read_bytes()

    output: str = capsys.readouterr().out
    realized: float = float(output.splitlines()[0].split()[1])

    assert realized == pytest.approx(30.0, abs=1e-6)
    assert np.count_nonzero(datagen.load_vector(first / "x_true.txt")) == 5


def test_synth_with_library(tmp_path: Path, bundled_problem: Dict[str, Path]) -> None:
    code: int = cli.main(
        [
            "synth",
            "--library",
            str(bundled_problem["library"]),
            "--s",
            "2",
            "--out-dir",
            str(tmp_path / "out"),
        ]
    )

    assert code == cli.EXIT_OK
    assert datagen.load_library(tmp_path / "out" / "library.txt").matrix.shape == (10, 20)


def test_synth_invalid_sparsity(capsys: pytest.CaptureFixture, tmp_path: Path) -> None:
    code: int = cli.main(["synth", "--s", "0", "--out-dir", str(tmp_path)])

    assert code == cli.EXIT_INVALID_INPUT
    assert "--s" in capsys.readouterr().err


def bench_rsnr(path: Path) -> List[str]:
    with open(path, encoding="utf-8", newline="") as stream:
        return [row["rsnr_db"] for row in csv.DictReader(stream)]


def test_bench(capsys: pytest.CaptureFixture, tmp_path: Path) -> None:
    flags: List[str] = [
        "bench",
        "--k", "30",
        "--n", "15",
        "--s", "3",
        "--snr", "30",
        "--runs", "1",
        "--seed", "9",
        "--iters", "50",
        "--lambdas", "0.001,0.01",
        "--threads", "1",
    ]
    first: Path = tmp_path / "first.csv"
    second: Path = tmp_path / "second.csv"
    report: Path = tmp_path / "report.json"

    assert cli.main([*flags, "--csv", str(first), "--json", str(report)]) == cli.EXIT_OK
    assert cli.main([*flags, "--csv", str(second)]) == cli.EXIT_OK

    assert bench_rsnr(first) == bench_rsnr(second)
    assert len(bench_rsnr(first)) == 3
    assert json.loads(report.read_text(encoding="utf-8"))["schema"] == 1
    assert "sunsal" in capsys.readouterr().out


def test_bench_preset_snr_filter(tmp_path: Path) -> None:
    output: Path = tmp_path / "table2.csv"

    code: int = cli.main(
        [
            "bench",
            "--preset", "table2-like",
            "--snr", "40",
            "--runs", "1",
            "--iters", "20",
            "--solvers", "csunsal,fcls",
            "--timing",
            "--csv", str(output),
        ]
    )

    with open(output, encoding="utf-8", newline="") as stream:
        rows: List[Dict[str, str]] = list(csv.DictReader(stream))

    assert code == cli.EXIT_OK
    assert [(row["solver"], float(row["snr_db"])) for row in rows] == [
        ("csunsal", 40.0),
        ("fcls", 40.0),
    ]


@pytest.mark.parametrize(
    "flags, name",
    [
        (["--solvers", "sunsal,lasso"], "--solvers"),
        (["--lambdas", "0.1,abc"], "--lambdas"),
        (["--mu", "0"], "--mu"),
        (["--threads", "0"], "--threads"),
        (["--runs", "0"], "--runs"),
    ],
)
def test_bench_invalid_flags(
    capsys: pytest.CaptureFixture, flags: List[str], name: str
) -> None:
    code: int = cli.main(["bench", "--k", "10", "--n", "5", "--s", "2", *flags])

    assert code == cli.EXIT_INVALID_INPUT
    assert name in capsys.readouterr().err


def test_invalid_environment(
    monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture, tmp_path: Path
) -> None:
    monkeypatch.setenv("UNMIX_THREADS", "0")

    assert cli.main(["synth", "--out-dir", str(tmp_path)]) == cli.EXIT_INVALID_INPUT
    assert "UNMIX_" in capsys.readouterr().err



@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "library.txt", "y.txt", "--bogus"],
        ["solve", "library.txt", "y.txt", "--problem", "lasso"],
        ["solve", "library.txt", "y.txt", "--mu", "abc"],
        ["solve", "library.txt"],
        ["synth", "--unknown"],
        ["bench", "--runs", "two"],
        ["frobnicate"],
        [],
    ],
)
def test_usage_error(capsys: pytest.CaptureFixture, argv: List[str]) -> None:
    with pytest.raises(SystemExit) as exit_info:
        cli.main(argv)

    assert exit_info.value.code == cli.EXIT_INVALID_INPUT
    assert "error:" in capsys.readouterr().err
