import csv
import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from filtered_lrd.main import main

SMALL_SCALING = [
    "--set",
    "experiment.radii=[8.0, 16.0, 32.0]",
    "--set",
    "experiment.replicates=30",
    "--set",
    "experiment.t_grid=[0.5, 1.0]",
]


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


def test_synth_is_reproducible(runner: CliRunner, tmp_path: Path):
    dumps = []
    for name in ("a", "b"):
        out = tmp_path / name
        result = runner.invoke(
            main, ["synth", "--seed", "7", "--out", str(out), "--set", "synth.shape=[1024]"]
        )
        assert result.exit_code == 0, result.output
        header = (out / "field.header.toml").read_text()
        assert "seed = 7" in header
        assert "alpha = 0.4" in header
        assert "shape = [1024]" in header
        assert (out / "resolved_config.json").exists()
        dumps.append((out / "field.bin").read_bytes())
    assert len(dumps[0]) == 1024 * 8
    assert dumps[0] == dumps[1]


def test_synth_rejects_alpha_above_dimension(runner: CliRunner, tmp_path: Path):
    result = runner.invoke(main, ["synth", "--out", str(tmp_path), "--set", "params.alpha=1.5"])
    assert result.exit_code == 2
    assert not (tmp_path / "field.bin").exists()


def test_unknown_config_key(runner: CliRunner, tmp_path: Path):
    result = runner.invoke(main, ["synth", "--out", str(tmp_path), "--set", "params.gamma=1"])
    assert result.exit_code == 2
    assert "Invalid configuration" in result.output


def test_scaling_writes_report(runner: CliRunner, tmp_path: Path):
    result = runner.invoke(main, ["scaling", "--seed", "3", "--out", str(tmp_path), *SMALL_SCALING])
    assert result.exit_code == 0, result.output
    report = json.loads((tmp_path / "report.json").read_text())
    estimate = report["hurst_estimate"]
    assert estimate["ci_low"] <= estimate["value"] <= estimate["ci_high"]
    assert report["provenance"]["validity_mode"] == "window"
    assert report["provenance"]["base_seed"] == 3
    for name in ("cells.csv", "plot_data.csv", "plot_data.fit.json", "resolved_config.json"):
        assert (tmp_path / name).exists()


def test_theorem_mode_rejection(runner: CliRunner, tmp_path: Path):
    args = ["--set", "params.alpha=0.5", "--set", "params.beta=0.4", *SMALL_SCALING]
    result = runner.invoke(
        main, ["scaling", "--validity-mode", "theorem", "--out", str(tmp_path / "t"), *args]
    )
    assert result.exit_code == 2
    assert "alpha in (0, (n - 2 beta)/kappa) = (0, 0.2)" in result.output

    result = runner.invoke(main, ["scaling", "--out", str(tmp_path / "w"), *args])
    assert result.exit_code == 0, result.output
    report = json.loads((tmp_path / "w" / "report.json").read_text())
    assert report["provenance"]["validity_mode"] == "window"
    assert report["target_hurst"] == pytest.approx(0.35)


def test_limit_sample_rank_three(runner: CliRunner, tmp_path: Path):
    result = runner.invoke(
        main, ["limit-sample", "--out", str(tmp_path), "--set", "params.kappa=3", "--set", "params.alpha=0.2"]
    )
    assert result.exit_code == 2
    assert "kappa" in result.output


def test_limit_sample_summary(runner: CliRunner, tmp_path: Path):
    result = runner.invoke(
        main,
        [
            "limit-sample",
            "--seed",
            "5",
            "--out",
            str(tmp_path),
            "--set",
            "limit.t_grid=[0.5, 1.0]",
            "--set",
            "limit.count=4000",
            "--set",
            "limit.covariance_samples=100000",
        ],
    )
    assert result.exit_code == 0, result.output
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["hurst"] == pytest.approx(0.8)
    for row in summary["per_t"]:
        gap = abs(row["variance"] - row["limit_covariance"])
        assert gap < 5 * (row["variance_stderr"] + row["limit_covariance_stderr"]) + 0.01 * row[
            "limit_covariance"
        ]
    with open(tmp_path / "samples.csv", newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["t=0.5", "t=1"]
    assert len(rows) == 4001


def test_integrability_sweep(runner: CliRunner, tmp_path: Path):
    result = runner.invoke(
        main,
        [
            "integrability",
            "--out",
            str(tmp_path),
            "--set",
            'integrability.windows=[{kind = "ball", n = 2}]',
            "--set",
            "integrability.exponents=[-0.1, 2.5, 3.0, 3.2]",
        ],
    )
    assert result.exit_code == 0, result.output
    with open(tmp_path / "integrability.csv", newline="") as f:
        rows = list(csv.DictReader(f))
    assert [row["classification"] for row in rows] == [
        "divergent-at-origin",
        "convergent",
        "boundary",
        "divergent-at-infinity",
    ]
    assert all(row["window"] == "ball(n=2)" for row in rows)
    assert float(rows[2]["hurst"]) == pytest.approx(0.25)


def test_unwritable_output(runner: CliRunner, tmp_path: Path):
    blocker = tmp_path / "blocker"
    blocker.write_text("", encoding="utf-8")
    result = runner.invoke(main, ["synth", "--out", str(blocker / "out"), "--set", "synth.shape=[64]"])
    assert result.exit_code == 4
