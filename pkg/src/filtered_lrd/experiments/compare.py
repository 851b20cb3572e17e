import math

import numpy as np
from scipy import stats

from filtered_lrd.errors import ContractError
from filtered_lrd.experiments.report import DistributionComparison

MIN_COMPARISON_SAMPLES = 500

# c(level) in the asymptotic two-sample critical value c * sqrt((n1 + n2) / (n1 n2))
_KS_COEFFICIENTS = {0.10: 1.224, 0.05: 1.358, 0.025: 1.48, 0.01: 1.628, 0.005: 1.731, 0.001: 1.949}


def two_sample_critical_value(n1: int, n2: int, level: float = 0.05) -> float:
    if n1 < 1 or n2 < 1:
        raise ContractError("Sample sizes must be positive")
    if not 0 < level < 1:
        raise ContractError(f"Level must lie in (0, 1), got {level}")
    coefficient = _KS_COEFFICIENTS.get(level, math.sqrt(-0.5 * math.log(level / 2.0)))
    return coefficient * math.sqrt((n1 + n2) / (n1 * n2))


def _checked(samples: np.ndarray, name: str) -> np.ndarray:
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 2 or not np.all(np.isfinite(x)):
        raise ContractError(f"{name} samples must be finite and hold at least two values")
    if float(np.var(x)) == 0.0:
        raise ContractError(f"{name} samples are degenerate (zero variance)")
    return x


def variance_standardize(samples: np.ndarray) -> np.ndarray:
    """Divide by the sample standard deviation; the mean is kept."""
    x = _checked(samples, "Input")
    return x / float(np.std(x, ddof=1))


def distribution_compare(
    empirical: np.ndarray,
    limit: np.ndarray,
    min_samples: int = MIN_COMPARISON_SAMPLES,
    level: float = 0.05,
) -> DistributionComparison:
    """
    Two-sample KS distance and gaps (empirical minus limit) of mean, variance, skewness
    and excess kurtosis. Both inputs are expected on a common scale, typically after
    `variance_standardize`.
    """
    e = _checked(empirical, "Empirical")
    q = _checked(limit, "Limit")
    if e.size < min_samples or q.size < min_samples:
        raise ContractError(
            f"Need at least {min_samples} samples on each side, got {e.size} and {q.size}"
        )
    ks = stats.ks_2samp(e, q)
    e_skew, q_skew = float(stats.skew(e)), float(stats.skew(q))
    return DistributionComparison(
        ks_distance=float(ks.statistic),
        critical_value=two_sample_critical_value(e.size, q.size, level),
        empirical_count=int(e.size),
        limit_count=int(q.size),
        mean_gap=float(e.mean() - q.mean()),
        variance_gap=float(np.var(e, ddof=1) - np.var(q, ddof=1)),
        skewness_gap=e_skew - q_skew,
        kurtosis_gap=float(stats.kurtosis(e) - stats.kurtosis(q)),
        empirical_skewness=e_skew,
        limit_skewness=q_skew,
    )
