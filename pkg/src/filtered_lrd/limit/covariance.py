"""
Monte Carlo evaluation of Cov(X_kappa(t), X_kappa(s)) by importance sampling in the
spectral domain.

Each of the kappa frequency coordinates is drawn as rho * direction, with rho from the
beta-prime law of density proportional to rho^(alpha - 1) (1 + rho)^(-(alpha + n + 1))
and a uniform direction. That density matches the rho^(alpha - n) singularity of the
spectral measure at the origin and has a heavier tail than the window transforms.
"""

import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special, stats

from filtered_lrd.errors import ContractError, PrecisionNotReachedError
from filtered_lrd.filters import FilterSpec, sphere_area
from filtered_lrd.limit.params import ScalingParams, ValidityMode, require_admissible
from filtered_lrd.logger import logging
from filtered_lrd.rng import derive_seed, make_rng
from filtered_lrd.stats import RunningMoments
from filtered_lrd.windows import k_delta

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MonteCarloBudget:
    samples: int = 200_000
    seed: int = 0
    batch_size: int = 20_000
    # stop once the relative standard error drops below this; raise if never reached
    rel_tol: Optional[float] = None

    def __post_init__(self):
        if self.samples < 2 or self.batch_size < 2:
            raise ContractError("Monte Carlo budget needs at least two samples per batch")


@dataclass(frozen=True)
class CovarianceEstimate:
    value: float
    stderr: float
    samples: int

    @property
    def rel_stderr(self) -> float:
        if self.value == 0:
            return math.inf
        return abs(self.stderr / self.value)


def draw_frequencies(
    p: ScalingParams, count: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """
    `count` draws of (lambda_1, ..., lambda_kappa), shape (count, kappa, n), with the
    importance weights of prod_j |lambda_j|^(alpha - n).
    """
    n, kappa, alpha = p.n, p.kappa, p.alpha
    rho = stats.betaprime(alpha, n + 1).rvs(size=(count, kappa), random_state=rng)
    if n == 1:
        directions = rng.choice(np.array([-1.0, 1.0]), size=(count, kappa, 1))
    else:
        directions = rng.standard_normal((count, kappa, n))
        directions /= np.linalg.norm(directions, axis=-1, keepdims=True)
    # |S^{n-1}| rho^(alpha - 1) / q(rho), with q the beta-prime density
    per_coordinate = sphere_area(n) * special.beta(alpha, n + 1) * (1.0 + rho) ** (alpha + n + 1)
    return rho[..., None] * directions, np.prod(per_coordinate, axis=1)


def _check_times(*times: float) -> None:
    for t in times:
        if not 0 < t <= 1:
            raise ContractError(f"Times must lie in (0, 1], got {t}")


def _covariance_terms(
    p: ScalingParams,
    t: float,
    s: float,
    lam: np.ndarray,
    weights: np.ndarray,
    damping: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> np.ndarray:
    total = lam.sum(axis=1)
    norm = np.linalg.norm(total, axis=-1)
    k_t = k_delta(p.window, total * t ** (1.0 / p.n))
    k_s = k_delta(p.window, total * s ** (1.0 / p.n))
    with np.errstate(divide="ignore", invalid="ignore"):
        values = (
            math.factorial(p.kappa)
            * t
            * s
            * np.real(k_t * np.conj(k_s))
            * norm ** (2.0 * p.beta)
            * weights
        )
    if damping is not None:
        values = values * damping(norm)
    return np.where(np.isfinite(values), values, 0.0)


def _monte_carlo(
    p: ScalingParams,
    t: float,
    s: float,
    mc: MonteCarloBudget,
    damping: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> CovarianceEstimate:
    moments = RunningMoments()
    batch_index = 0
    while moments.count < mc.samples:
        size = min(mc.batch_size, mc.samples - moments.count)
        rng = make_rng(derive_seed(mc.seed, batch_index))
        lam, weights = draw_frequencies(p, size, rng)
        moments.push(_covariance_terms(p, t, s, lam, weights, damping))
        batch_index += 1
        estimate = CovarianceEstimate(moments.mean, moments.stderr, moments.count)
        if mc.rel_tol is not None and estimate.rel_stderr <= mc.rel_tol:
            break

    logger.debug(
        "Limit covariance estimate %.6g +- %.2g", estimate.value, estimate.stderr,
        extra={"t": t, "s": s, "samples": estimate.samples, "seed": mc.seed},
    )
    if mc.rel_tol is not None and estimate.rel_stderr > mc.rel_tol:
        raise PrecisionNotReachedError(
            f"Relative standard error {estimate.rel_stderr:.3g} exceeds {mc.rel_tol:g} after "
            f"{estimate.samples} samples",
            partial=estimate,
        )
    return estimate


def limit_covariance(
    p: ScalingParams,
    t: float,
    s: float,
    mc: MonteCarloBudget = MonteCarloBudget(),  # noqa: B008
    mode: ValidityMode = ValidityMode.WINDOW,
) -> CovarianceEstimate:
    """
    kappa! t s int K(sum(lambda) t^(1/n)) conj K(sum(lambda) s^(1/n)) |sum(lambda)|^(2 beta)
    prod_j |lambda_j|^(alpha - n) dlambda.
    """
    _check_times(t, s)
    require_admissible(p, mode)
    return _monte_carlo(p, t, s, mc)


def prelimit_covariance(
    p: ScalingParams,
    t: float,
    s: float,
    r: float,
    filter: FilterSpec,  # noqa: A002
    mc: MonteCarloBudget = MonteCarloBudget(),  # noqa: B008
    mode: ValidityMode = ValidityMode.WINDOW,
) -> CovarianceEstimate:
    """
    The same integral at finite r, where the taper enters as (g(|sum(lambda)| / r) / g(0))^2.
    Tends to limit_covariance as r grows.
    """
    _check_times(t, s)
    if r <= 0:
        raise ContractError(f"Radius must be positive, got r={r}")
    if filter.n != p.n or filter.beta != p.beta:
        raise ContractError(
            f"Filter (n={filter.n}, beta={filter.beta}) does not match parameters "
            f"(n={p.n}, beta={p.beta})"
        )
    require_admissible(p, mode)

    def damping(norm: np.ndarray) -> np.ndarray:
        return (filter.taper(norm / r) / filter.g0) ** 2

    return _monte_carlo(p, t, s, mc, damping)
