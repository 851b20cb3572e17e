import json
from pathlib import Path

import pytest

from filtered_lrd.config import (
    DEFAULT_RADII,
    RESOLVED_CONFIG_NAME,
    load_config,
    parse_override,
    write_resolved_config,
)
from filtered_lrd.errors import ConfigError, ContractError
from filtered_lrd.experiments.config import FunctionalKind
from filtered_lrd.experiments.report import config_hash
from filtered_lrd.limit.params import ValidityMode
from filtered_lrd.windows import WindowKind


def test_defaults():
    cfg = load_config()
    assert cfg.params.alpha == 0.4
    assert cfg.run.validity_mode == ValidityMode.WINDOW
    experiment = cfg.scaling_experiment()
    assert list(experiment.radii) == DEFAULT_RADII[1]
    assert experiment.convention == "isometric"
    assert experiment.limit_comparison is None


def test_toml_tables_and_dotted_keys(tmp_path: Path):
    path = tmp_path / "run.toml"
    path.write_text(
        "params.n = 2\n"
        "params.kappa = 2\n"
        "params.alpha = 0.3\n"
        "[window]\n"
        'kind = "ball"\n'
        "[experiment]\n"
        "radii = [8, 16, 32]\n"
        "replicates = 30\n",
        encoding="utf-8",
    )
    cfg = load_config(path, overrides=["params.alpha=0.25"])
    p = cfg.scaling_params()
    assert p.window.kind == WindowKind.BALL
    assert p.window.n == 2
    assert p.alpha == 0.25
    assert cfg.scaling_experiment().radii == (8.0, 16.0, 32.0)


def test_parse_override():
    assert parse_override("experiment.radii=[8, 16]") == (["experiment", "radii"], [8, 16])
    assert parse_override("run.out=results/a") == (["run", "out"], "results/a")
    assert parse_override("window.kind=\"box\"") == (["window", "kind"], "box")
    with pytest.raises(ConfigError):
        parse_override("params.alpha")


def test_run_overrides_take_precedence():
    cfg = load_config(overrides=["run.seed=3"], run_overrides={"seed": 9, "threads": None})
    assert cfg.run.seed == 9
    assert cfg.run.threads == 1


@pytest.mark.parametrize(
    "override",
    ["params.gamma=1", "run.threads=0", "window.kind=\"triangle\"", "params.alpha.x=1"],
)
def test_invalid_settings(override: str):
    with pytest.raises(ConfigError):
        load_config(overrides=[override])


def test_unparseable_file(tmp_path: Path):
    path = tmp_path / "bad.toml"
    path.write_text("params = [", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(path)


def test_polynomial_functional():
    cfg = load_config(overrides=["functional.kind=\"polynomial\"", "functional.coefficients=[0, 1, 0, 1]"])
    spec = cfg.functional_spec()
    assert spec.kind == FunctionalKind.POLYNOMIAL
    assert spec.rank == 1
    wrong = load_config(overrides=["functional.kind=\"polynomial\"", "functional.coefficients=[0, 0, 1]"])
    with pytest.raises(ContractError):
        wrong.functional_spec()


def test_resolved_config(tmp_path: Path):
    cfg = load_config(overrides=["params.beta=0.1"])
    path, digest = write_resolved_config(cfg, tmp_path)
    assert path.name == RESOLVED_CONFIG_NAME
    data = json.loads(path.read_text())
    assert data["params"]["beta"] == 0.1
    assert digest == config_hash(data)
