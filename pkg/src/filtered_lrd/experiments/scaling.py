import math
import time
from collections.abc import Sequence
from dataclasses import asdict, dataclass
from typing import Any, Optional

import numpy as np
from scipy import stats

from filtered_lrd.errors import ContractError, InsufficientDesignError
from filtered_lrd.experiments.compare import (
    MIN_COMPARISON_SAMPLES,
    distribution_compare,
    variance_standardize,
)
from filtered_lrd.experiments.config import MIN_RADII, MIN_REPLICATES, ScalingExperimentConfig
from filtered_lrd.experiments.messages import ReplicateOutcome, ReplicateTask
from filtered_lrd.experiments.pipeline import check_memory
from filtered_lrd.experiments.report import (
    CellStats,
    ExperimentReport,
    HurstEstimate,
    Provenance,
    config_hash,
    sample_key,
    software_version,
)
from filtered_lrd.experiments.worker import ReplicatePool
from filtered_lrd.limit.params import hurst, require_admissible
from filtered_lrd.limit.sampler import SUPPORTED_RANKS, sample_limit
from filtered_lrd.logger import logging
from filtered_lrd.rng import derive_seed
from filtered_lrd.stats import RunningMoments
from filtered_lrd.windows import gamma_lower_bound

logger = logging.getLogger(__name__)

CONFIDENCE = 0.95


def estimate_hurst(
    report: ExperimentReport, n: int, gamma: float = 0.0, t: float = 1.0
) -> HurstEstimate:
    """
    Slope of log Var(raw functional at t) against log r, divided by 2n, with the
    regression 95% interval.
    """
    radii = report.radii
    if len(radii) < MIN_RADII:
        raise InsufficientDesignError(f"Hurst regression needs {MIN_RADII} radii, got {len(radii)}")
    try:
        cells = [report.cell(r, t) for r in radii]
    except KeyError as e:
        raise InsufficientDesignError(f"Report has no cells at t={t}") from e
    counts = [c.replicate_count for c in cells]
    if min(counts) < MIN_REPLICATES:
        raise InsufficientDesignError(
            f"Hurst regression needs {MIN_REPLICATES} replicates per radius, got {counts}"
        )
    variances = np.array([c.raw_variance for c in cells])
    if np.any(variances <= 0):
        raise InsufficientDesignError("Raw variance is zero at some radius; nothing to regress")

    fit = stats.linregress(np.log(radii), np.log(variances))
    quantile = float(stats.t.ppf(0.5 + CONFIDENCE / 2.0, len(radii) - 2))
    value = fit.slope / (2.0 * n)
    half_width = quantile * fit.stderr / (2.0 * n)
    if not gamma < value < 1.0:
        logger.warning(
            "Implausible Hurst estimate %.3f outside (%.3f, 1)", value, gamma,
            extra={"slope": fit.slope},
        )
    return HurstEstimate(
        value=float(value),
        ci_low=float(value - half_width),
        ci_high=float(value + half_width),
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        r_squared=float(fit.rvalue**2),
        radii=[float(r) for r in radii],
        replicate_counts=counts,
    )


@dataclass(frozen=True)
class SelfSimilarityResult:
    max_deviation: float
    radius: float
    ratios: dict[float, float]
    targets: dict[float, float]
    stderrs: dict[float, float]


def self_similarity_check(
    report: ExperimentReport, H: float, r: Optional[float] = None
) -> SelfSimilarityResult:
    """
    max over t of |Var(t)/Var(1) - t^(2H)| at radius r (the largest by default), with
    delta-method standard errors of each ratio.
    """
    radius = max(report.radii) if r is None else r
    try:
        reference = report.cell(radius, 1.0)
    except KeyError as e:
        raise ContractError("Self-similarity check needs t = 1 in the report") from e
    ratios, targets, stderrs = {}, {}, {}
    for t in report.t_grid:
        cell = report.cell(radius, t)
        ratio = cell.variance / reference.variance
        ratios[t] = ratio
        targets[t] = t ** (2.0 * H)
        if t == 1.0:
            stderrs[t] = 0.0
        else:
            stderrs[t] = ratio * math.hypot(
                cell.variance_stderr / cell.variance, reference.variance_stderr / reference.variance
            )
    deviation = max(abs(ratios[t] - targets[t]) for t in ratios)
    return SelfSimilarityResult(
        max_deviation=float(deviation),
        radius=float(radius),
        ratios=ratios,
        targets=targets,
        stderrs=stderrs,
    )


def describe_config(cfg: ScalingExperimentConfig) -> dict[str, Any]:
    return asdict(cfg)


def aggregate_outcomes(
    outcomes: Sequence[ReplicateOutcome], grid: tuple[int, int]
) -> dict[tuple[int, int], tuple[RunningMoments, RunningMoments]]:
    """
    (normalized, raw) accumulators per (radius index, t index), merged in
    (replicate, radius) order.
    """
    moments = {
        (ri, ti): (RunningMoments(), RunningMoments())
        for ri in range(grid[0])
        for ti in range(grid[1])
    }
    for outcome in sorted(outcomes, key=lambda o: (o.replicate, o.radius_index)):
        for ti in range(grid[1]):
            scaled, raw = moments[outcome.radius_index, ti]
            scaled.merge(RunningMoments.of([outcome.normalized[ti]]))
            raw.merge(RunningMoments.of([outcome.raw[ti]]))
    return moments


def run_scaling(
    cfg: ScalingExperimentConfig,
    threads: int = 1,
    resolved_config: Optional[dict[str, Any]] = None,
) -> ExperimentReport:
    """
    Replicate Monte Carlo of the normalized functional over cfg.radii x cfg.t_grid.
    """
    p = cfg.params
    require_admissible(p, cfg.validity_mode)
    target = hurst(p, cfg.validity_mode)
    check_memory(cfg)

    started = time.perf_counter()
    logger.info(
        "Scaling experiment started",
        extra={
            "radii": list(cfg.radii),
            "replicates": cfg.replicates,
            "base_seed": cfg.base_seed,
            "threads": threads,
            "target_hurst": target,
        },
    )
    tasks = [
        ReplicateTask(cfg=cfg, replicate=replicate, radius_index=radius_index)
        for replicate in range(cfg.replicates)
        for radius_index in range(len(cfg.radii))
    ]
    with ReplicatePool(threads) as pool:
        outcomes = pool.map(tasks)

    grid = (len(cfg.radii), len(cfg.t_grid))
    moments = aggregate_outcomes(outcomes, grid)
    normalized = np.empty((cfg.replicates, *grid))
    for outcome in outcomes:
        normalized[outcome.replicate, outcome.radius_index] = outcome.normalized

    cells, samples = [], {}
    for ri, r in enumerate(cfg.radii):
        for ti, t in enumerate(cfg.t_grid):
            scaled, raw = moments[ri, ti]
            cells.append(CellStats.from_moments(r, t, scaled, raw, normalized[:, ri, ti]))
            samples[sample_key(r, t)] = normalized[:, ri, ti].tolist()

    provenance = Provenance(
        config_hash=config_hash(resolved_config if resolved_config is not None else describe_config(cfg)),
        base_seed=cfg.base_seed,
        validity_mode=str(cfg.validity_mode),
        normalization=cfg.convention,
        software_version=software_version(),
        functional=cfg.functional.describe(),
        window=p.window.describe(),
    )
    report = ExperimentReport(
        n=p.n, target_hurst=target, cells=cells, samples=samples, provenance=provenance
    )

    gamma = gamma_lower_bound(p.window)
    if 1.0 in cfg.t_grid:
        try:
            estimate = estimate_hurst(report, p.n, gamma=gamma)
            report.hurst_estimate = estimate
            report.slope_r2 = estimate.r_squared
        except InsufficientDesignError as e:
            logger.warning("No Hurst estimate: %s", e)

    if cfg.limit_comparison is not None:
        _compare_with_limit(cfg, report, normalized[:, -1, :])

    logger.info(
        "Scaling experiment finished",
        extra={
            "seconds": round(time.perf_counter() - started, 3),
            "hurst_estimate": report.hurst_estimate.value if report.hurst_estimate else None,
        },
    )
    return report


def _compare_with_limit(
    cfg: ScalingExperimentConfig, report: ExperimentReport, largest: np.ndarray
) -> None:
    p, comparison = cfg.params, cfg.limit_comparison
    assert comparison is not None
    if p.kappa not in SUPPORTED_RANKS:
        logger.warning("No limit sampler for kappa=%d; skipping the comparison", p.kappa)
        return
    limit = sample_limit(
        p,
        list(cfg.t_grid),
        comparison.grid,
        seed=derive_seed(cfg.base_seed, comparison.seed_stream),
        count=comparison.count,
        mode=cfg.validity_mode,
    )
    for ti, t in enumerate(cfg.t_grid):
        key = f"{t:g}"
        report.limit_samples[key] = limit[:, ti].tolist()
        if min(largest.shape[0], limit.shape[0]) < MIN_COMPARISON_SAMPLES:
            logger.warning(
                "Too few samples for a distribution comparison at t=%g", t,
                extra={"empirical": largest.shape[0], "limit": limit.shape[0]},
            )
            continue
        result = distribution_compare(
            variance_standardize(largest[:, ti]), variance_standardize(limit[:, ti])
        )
        report.limit_comparison[key] = result
        report.ks_stats[key] = result.ks_distance
