"""
Experiment reports: per-(r, t) statistics, the Hurst fit, limit-law comparisons and run
provenance, written as JSON, CSV and plot data.
"""

import csv
import hashlib
import json
from importlib import metadata
from pathlib import Path
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import stats

from filtered_lrd.errors import ContractError, OutputError
from filtered_lrd.logger import logging
from filtered_lrd.stats import RunningMoments, variance_stderr

logger = logging.getLogger(__name__)

CELL_COLUMNS = ("r", "t", "replicate_count", "mean", "variance", "stderr")


class CellStats(BaseModel):
    model_config = ConfigDict(frozen=True)

    r: float
    t: float
    replicate_count: int
    mean: float
    variance: float
    # standard error of the mean
    stderr: float
    variance_stderr: float
    skewness: float
    kurtosis: float
    raw_variance: float

    @classmethod
    def from_samples(cls, r: float, t: float, normalized: np.ndarray, raw: np.ndarray) -> "CellStats":
        return cls.from_moments(
            r, t, RunningMoments.of(normalized), RunningMoments.of(raw), np.asarray(normalized)
        )

    @classmethod
    def from_moments(
        cls,
        r: float,
        t: float,
        moments: RunningMoments,
        raw_moments: RunningMoments,
        normalized: np.ndarray,
    ) -> "CellStats":
        """
        Mean and variances from merged accumulators; the normalized samples only supply
        the higher moments.
        """
        count = moments.count
        if count < 2:
            raise ContractError(f"Cell (r={r}, t={t}) needs at least two replicates")
        if raw_moments.count != count or np.size(normalized) != count:
            raise ContractError(f"Cell (r={r}, t={t}) has mismatched replicate counts")
        normalized = np.asarray(normalized, dtype=float)
        variance = moments.variance
        degenerate = variance == 0.0
        return cls(
            r=r,
            t=t,
            replicate_count=count,
            mean=moments.mean,
            variance=variance,
            stderr=moments.stderr,
            variance_stderr=variance_stderr(normalized),
            skewness=0.0 if degenerate else float(stats.skew(normalized)),
            kurtosis=0.0 if degenerate else float(stats.kurtosis(normalized)),
            raw_variance=raw_moments.variance,
        )


class HurstEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float
    ci_low: float
    ci_high: float
    slope: float
    intercept: float
    r_squared: float
    radii: list[float]
    replicate_counts: list[int]


class DistributionComparison(BaseModel):
    model_config = ConfigDict(frozen=True)

    ks_distance: float
    critical_value: float
    empirical_count: int
    limit_count: int
    # empirical minus limit, after standardizing both samples
    mean_gap: float
    variance_gap: float
    skewness_gap: float
    kurtosis_gap: float
    empirical_skewness: float
    limit_skewness: float


class Provenance(BaseModel):
    model_config = ConfigDict(frozen=True)

    config_hash: str
    base_seed: int
    validity_mode: str
    normalization: str
    software_version: str
    functional: str
    window: str


class ExperimentReport(BaseModel):
    n: int
    target_hurst: Optional[float] = None
    cells: list[CellStats]
    hurst_estimate: Optional[HurstEstimate] = None
    slope_r2: Optional[float] = None
    ks_stats: dict[str, float] = Field(default_factory=dict)
    limit_comparison: dict[str, DistributionComparison] = Field(default_factory=dict)
    limit_samples: dict[str, list[float]] = Field(default_factory=dict, exclude=True)
    samples: dict[str, list[float]] = Field(default_factory=dict, exclude=True)
    provenance: Provenance

    @property
    def radii(self) -> list[float]:
        return sorted({c.r for c in self.cells})

    @property
    def t_grid(self) -> list[float]:
        return sorted({c.t for c in self.cells})

    def cell(self, r: float, t: float) -> CellStats:
        for c in self.cells:
            if np.isclose(c.r, r) and np.isclose(c.t, t):
                return c
        raise KeyError(f"No cell for r={r}, t={t}")

    def normalized_samples(self, r: float, t: float) -> np.ndarray:
        return np.asarray(self.samples[sample_key(r, t)])

    def moments(self) -> list[dict[str, float]]:
        return [
            {
                "r": c.r,
                "t": c.t,
                "mean": c.mean,
                "variance": c.variance,
                "skewness": c.skewness,
                "kurtosis": c.kurtosis,
            }
            for c in self.cells
        ]


def sample_key(r: float, t: float) -> str:
    return f"r={r:g},t={t:g}"


def software_version() -> str:
    try:
        return metadata.version("filtered-lrd")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def config_hash(data: Any) -> str:
    return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()


def _write(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise OutputError(f"Could not write {path}: {e}") from e
    logger.info("Wrote %s", path)
    return path


def write_json(data: Any, path: Path) -> Path:
    return _write(Path(path), json.dumps(data, indent=2, ensure_ascii=False) + "\n")


def write_report_json(report: ExperimentReport, path: Path) -> Path:
    data = report.model_dump(mode="json")
    data["moments"] = report.moments()
    return write_json(data, path)


def write_cells_csv(report: ExperimentReport, path: Path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(CELL_COLUMNS)
            for c in report.cells:
                writer.writerow(
                    [repr(c.r), repr(c.t), c.replicate_count, repr(c.mean), repr(c.variance), repr(c.stderr)]
                )
    except OSError as e:
        raise OutputError(f"Could not write {path}: {e}") from e
    logger.info("Wrote %s", path)
    return path


def write_plot_data(report: ExperimentReport, path: Path) -> tuple[Path, Path]:
    """
    log r against log raw variance at t = 1, plus a sidecar with the fitted line.
    """
    path = Path(path)
    t_max = max(report.t_grid)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(("log_r", "log_variance"))
            for r in report.radii:
                log_variance = float(np.log(report.cell(r, t_max).raw_variance))
                writer.writerow([repr(float(np.log(r))), repr(log_variance)])
    except OSError as e:
        raise OutputError(f"Could not write {path}: {e}") from e
    fit: dict[str, Any] = {}
    if report.hurst_estimate is not None:
        fit = {
            "slope": report.hurst_estimate.slope,
            "intercept": report.hurst_estimate.intercept,
            "r_squared": report.hurst_estimate.r_squared,
        }
    sidecar = write_json(fit, path.with_suffix(".fit.json"))
    return path, sidecar


def write_samples_csv(header: list[str], rows: np.ndarray, path: Path) -> Path:
    path = Path(path)
    rows = np.asarray(rows, dtype=float)
    if rows.ndim == 1:
        rows = rows[:, None]
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(header)
            for row in rows:
                writer.writerow([repr(float(x)) for x in row])
    except OSError as e:
        raise OutputError(f"Could not write {path}: {e}") from e
    logger.info("Wrote %s", path)
    return path
