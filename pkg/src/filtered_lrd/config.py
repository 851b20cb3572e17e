"""
Run configuration: TOML files (dotted keys or tables) validated by pydantic, plus
command-line overrides.
"""

import json
import tomllib
from collections.abc import Sequence
from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from filtered_lrd.errors import ConfigError, OutputError
from filtered_lrd.experiments.config import (
    FunctionalKind,
    FunctionalSpec,
    LimitComparison,
    ScalingExperimentConfig,
)
from filtered_lrd.experiments.report import config_hash
from filtered_lrd.limit.covariance import MonteCarloBudget
from filtered_lrd.limit.integrability import ScanSpec
from filtered_lrd.limit.params import ScalingParams, ValidityMode
from filtered_lrd.limit.sampler import LimitSampleGrid
from filtered_lrd.logger import logging
from filtered_lrd.windows import Window, WindowKind

logger = logging.getLogger(__name__)

RESOLVED_CONFIG_NAME = "resolved_config.json"

DEFAULT_RADII = {1: [64.0, 128.0, 256.0, 512.0, 1024.0], 2: [32.0, 64.0, 128.0], 3: [16.0, 24.0, 32.0]}


class Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ParamsSection(Section):
    n: int = 1
    kappa: int = 1
    alpha: float = 0.4
    beta: float = 0.0
    g0: float = 1.0
    h1: float = 1.0


class WindowSection(Section):
    kind: WindowKind = WindowKind.INTERVAL
    # defaults to params.n
    n: Optional[int] = None
    a: float = 1.0
    b: float = 1.0

    def build(self, default_n: int) -> Window:
        n = self.n if self.n is not None else default_n
        if self.kind == WindowKind.INTERVAL:
            return Window.interval(self.a, self.b)
        return Window(self.kind, n)


class FilterSection(Section):
    sigma: float = 1.0


class FunctionalSection(Section):
    kind: FunctionalKind = FunctionalKind.HERMITE
    # monomial coefficients c_0, c_1, ... for kind = "polynomial"
    coefficients: list[float] = Field(default_factory=list)


class ExperimentSection(Section):
    radii: Optional[list[float]] = None
    t_grid: list[float] = Field(default_factory=lambda: [0.25, 0.5, 0.75, 1.0])
    replicates: int = 100
    spacing: float = 1.0
    normalization: Literal["fourier", "isometric"] = "isometric"
    compare_limit: bool = False


class SynthSection(Section):
    shape: list[int] = Field(default_factory=lambda: [1024])
    spacing: float = 1.0


class LimitSection(Section):
    t_grid: list[float] = Field(default_factory=lambda: [0.25, 0.5, 0.75, 1.0])
    count: int = 10_000
    truncation_radius: float = 40.0
    bins_per_axis: int = 64
    quad_nodes: int = 6
    covariance_samples: int = 200_000
    covariance_rel_tol: Optional[float] = None


class IntegrabilitySection(Section):
    windows: list[WindowSection] = Field(
        default_factory=lambda: [
            WindowSection(kind=WindowKind.INTERVAL, n=1),
            WindowSection(kind=WindowKind.BALL, n=2),
        ]
    )
    exponents: list[float] = Field(
        default_factory=lambda: [-0.1, 0.5, 1.5, 1.9, 2.4, 2.5, 3.0, 3.2]
    )
    rho0: float = 32.0
    bands: int = 6
    min_r_squared: float = 0.99
    boundary_width: float = 0.05


class RunSection(Section):
    seed: int = 0
    out: Path = Path("out")
    threads: int = Field(default=1, ge=1)
    validity_mode: ValidityMode = ValidityMode.WINDOW


class RunConfig(Section):
    params: ParamsSection = Field(default_factory=ParamsSection)
    window: WindowSection = Field(default_factory=WindowSection)
    filter: FilterSection = Field(default_factory=FilterSection)
    functional: FunctionalSection = Field(default_factory=FunctionalSection)
    experiment: ExperimentSection = Field(default_factory=ExperimentSection)
    synth: SynthSection = Field(default_factory=SynthSection)
    limit: LimitSection = Field(default_factory=LimitSection)
    integrability: IntegrabilitySection = Field(default_factory=IntegrabilitySection)
    run: RunSection = Field(default_factory=RunSection)

    def scaling_params(self) -> ScalingParams:
        p = self.params
        return ScalingParams(
            n=p.n,
            kappa=p.kappa,
            alpha=p.alpha,
            beta=p.beta,
            window=self.window.build(p.n),
            g0=p.g0,
            h1=p.h1,
        )

    def functional_spec(self) -> FunctionalSpec:
        if self.functional.kind == FunctionalKind.HERMITE:
            return FunctionalSpec.hermite(self.params.kappa)
        return FunctionalSpec.polynomial(self.functional.coefficients, self.params.kappa)

    def limit_grid(self) -> LimitSampleGrid:
        return LimitSampleGrid(
            truncation_radius=self.limit.truncation_radius,
            bins_per_axis=self.limit.bins_per_axis,
            quad_nodes=self.limit.quad_nodes,
        )

    def covariance_budget(self, seed: int) -> MonteCarloBudget:
        return MonteCarloBudget(
            samples=self.limit.covariance_samples,
            seed=seed,
            rel_tol=self.limit.covariance_rel_tol,
        )

    def scan_spec(self) -> ScanSpec:
        i = self.integrability
        return ScanSpec(
            rho0=i.rho0, bands=i.bands, min_r_squared=i.min_r_squared, boundary_width=i.boundary_width
        )

    def scaling_experiment(self) -> ScalingExperimentConfig:
        e = self.experiment
        radii = e.radii if e.radii is not None else DEFAULT_RADII[self.params.n]
        comparison = None
        if e.compare_limit:
            comparison = LimitComparison(count=self.limit.count, grid=self.limit_grid())
        return ScalingExperimentConfig(
            params=self.scaling_params(),
            functional=self.functional_spec(),
            radii=tuple(radii),
            t_grid=tuple(e.t_grid),
            replicates=e.replicates,
            base_seed=self.run.seed,
            spacing=e.spacing,
            sigma=self.filter.sigma,
            validity_mode=self.run.validity_mode,
            convention=e.normalization,
            limit_comparison=comparison,
        )

    def resolved(self) -> dict[str, Any]:
        return self.model_dump(mode="json")


def parse_override(assignment: str) -> tuple[list[str], Any]:
    """
    KEY=VALUE with a dotted key; VALUE is read as a TOML value, else kept as a string.
    """
    key, sep, raw = assignment.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError(f"Override {assignment!r} is not of the form KEY=VALUE")
    try:
        value = tomllib.loads(f"value = {raw.strip()}")["value"]
    except tomllib.TOMLDecodeError:
        value = raw.strip()
    return key.split("."), value


def apply_overrides(data: dict[str, Any], overrides: Sequence[str]) -> dict[str, Any]:
    for assignment in overrides:
        path, value = parse_override(assignment)
        node = data
        for part in path[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigError(f"Override {assignment!r} descends into non-table key {part!r}")
            node = child
        node[path[-1]] = value
    return data


def load_config(
    path: Optional[Path] = None,
    overrides: Sequence[str] = (),
    run_overrides: Optional[dict[str, Any]] = None,
) -> RunConfig:
    data: dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, "rb") as f:
                data = tomllib.load(f)
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"Could not parse {path}: {e}") from e
        except OSError as e:
            raise OutputError(f"Could not read config {path}: {e}") from e
    apply_overrides(data, overrides)
    for key, value in (run_overrides or {}).items():
        if value is not None:
            data.setdefault("run", {})[key] = value
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration: {e}") from e


def write_resolved_config(cfg: RunConfig, out_dir: Path) -> tuple[Path, str]:
    """
    Write resolved_config.json into out_dir; returns its path and SHA-256 config hash.
    """
    resolved = cfg.resolved()
    path = Path(out_dir) / RESOLVED_CONFIG_NAME
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(resolved, indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        raise OutputError(f"Could not write {path}: {e}") from e
    logger.info("Wrote %s", path)
    return path, config_hash(resolved)
