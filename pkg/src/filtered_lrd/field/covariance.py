import math
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from scipy import special

from filtered_lrd.errors import ContractError, InadmissibleParametersError, SpectralSingularityError

SUPPORTED_DIMENSIONS = (1, 2, 3)


class CovarianceFamily(StrEnum):
    CAUCHY = "cauchy"


def _check_dimension_and_alpha(n: int, alpha: float) -> None:
    if n not in SUPPORTED_DIMENSIONS:
        raise InadmissibleParametersError(f"Dimension n={n} is not one of {SUPPORTED_DIMENSIONS}")
    if not 0.0 < alpha < n:
        raise InadmissibleParametersError(
            f"Long-range exponent must satisfy 0 < alpha < n, got alpha={alpha}, n={n}"
        )


@dataclass(frozen=True)
class CovarianceModel:
    """
    Isotropic covariance B(r) = (1 + r^2)^(-alpha/2).

    B(0) = 1 and r^alpha B(r) -> 1, so the slowly varying part tends to one.
    """

    n: int
    alpha: float
    family: CovarianceFamily = CovarianceFamily.CAUCHY

    def __post_init__(self):
        _check_dimension_and_alpha(self.n, self.alpha)

    def spectral(self) -> "SpectralModel":
        return SpectralModel(n=self.n, alpha=self.alpha)


@dataclass(frozen=True)
class SpectralModel:
    n: int
    alpha: float

    def __post_init__(self):
        _check_dimension_and_alpha(self.n, self.alpha)

    @property
    def c1(self) -> float:
        """
        c_1(n, alpha) = Gamma((n - alpha)/2) / (2^alpha pi^(n/2) Gamma(alpha/2)).
        """
        return float(
            special.gamma((self.n - self.alpha) / 2.0)
            / (2.0**self.alpha * math.pi ** (self.n / 2.0) * special.gamma(self.alpha / 2.0))
        )


def covariance(model: CovarianceModel, r: float | np.ndarray) -> float | np.ndarray:
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise ContractError(f"Covariance lag must be non-negative, got r={r}")
    values = (1.0 + r_arr * r_arr) ** (-model.alpha / 2.0)
    if np.ndim(r) == 0:
        return float(values)
    return values


def spectral_density_asymptote(model: SpectralModel, rho: float | np.ndarray) -> float | np.ndarray:
    """
    Low-frequency asymptote c_1(n, alpha) rho^(alpha - n) of the spectral density.
    """
    rho_arr = np.asarray(rho, dtype=float)
    if np.any(rho_arr <= 0):
        raise SpectralSingularityError(
            "The spectral density asymptote is singular at rho = 0 (and undefined below)"
        )
    values = model.c1 * rho_arr ** (model.alpha - model.n)
    if np.ndim(rho) == 0:
        return float(values)
    return values
