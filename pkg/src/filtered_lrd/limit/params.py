import math
from dataclasses import dataclass
from enum import StrEnum
from typing import Literal, Optional

from filtered_lrd.errors import ContractError, InadmissibleParametersError
from filtered_lrd.field.covariance import SpectralModel
from filtered_lrd.filters import FilterSpec
from filtered_lrd.logger import logging
from filtered_lrd.windows import Window, WindowKind, admissible_exponent_upper, gamma_lower_bound

logger = logging.getLogger(__name__)

NormalizationConvention = Literal["fourier", "isometric"]

# circle averages of |K|^2 for the square decay like rho^-3
_BOX_SCAN_THRESHOLD = 3.0


class ValidityMode(StrEnum):
    THEOREM = "theorem"
    WINDOW = "window"


@dataclass(frozen=True)
class ScalingParams:
    n: int
    kappa: int
    alpha: float
    beta: float
    window: Window
    g0: float = 1.0
    h1: float = 1.0

    def __post_init__(self):
        if self.n != self.window.n:
            raise ContractError(f"Window {self.window.describe()} does not live in R^{self.n}")
        if self.kappa < 1:
            raise InadmissibleParametersError(f"Hermite rank must be >= 1, got kappa={self.kappa}")
        if not 0.0 < self.alpha < self.n:
            raise InadmissibleParametersError(
                f"Need 0 < alpha < n, got alpha={self.alpha}, n={self.n}"
            )
        if not -self.n / 2.0 < self.beta < self.n / 2.0:
            raise InadmissibleParametersError(
                f"Need -n/2 < beta < n/2, got beta={self.beta}, n={self.n}"
            )
        if self.g0 == 0 or self.h1 == 0:
            raise InadmissibleParametersError("g(0) and h(1) must be non-zero")

    @property
    def exponent(self) -> float:
        """kappa alpha + 2 beta."""
        return self.kappa * self.alpha + 2.0 * self.beta

    def spectral(self) -> SpectralModel:
        return SpectralModel(n=self.n, alpha=self.alpha)

    def filter_spec(self, sigma: float = 1.0) -> FilterSpec:
        return FilterSpec(n=self.n, beta=self.beta, h_scale=self.h1, sigma=sigma)


@dataclass(frozen=True)
class Admissibility:
    theorem_violation: Optional[str]
    window_violation: Optional[str]

    @property
    def theorem(self) -> bool:
        return self.theorem_violation is None

    @property
    def window(self) -> bool:
        return self.window_violation is None

    def passes(self, mode: ValidityMode) -> bool:
        return self.violation(mode) is None

    def violation(self, mode: ValidityMode) -> Optional[str]:
        return self.theorem_violation if mode == ValidityMode.THEOREM else self.window_violation


def admissibility(p: ScalingParams) -> Admissibility:
    exponent = p.exponent
    theorem_violation = None
    upper_alpha = (p.n - 2.0 * p.beta) / p.kappa
    if not p.alpha < upper_alpha:
        theorem_violation = (
            f"theorem mode needs alpha in (0, (n - 2 beta)/kappa) = (0, {upper_alpha:g}), "
            f"got alpha={p.alpha:g}"
        )
    elif not exponent > 0:
        theorem_violation = f"theorem mode needs kappa alpha + 2 beta > 0, got {exponent:g}"

    window_violation = None
    upper = admissible_exponent_upper(p.window)
    if not 0.0 < exponent < upper:
        window_violation = (
            f"window mode for {p.window.describe()} needs 0 < kappa alpha + 2 beta < {upper:g}, "
            f"got {exponent:g}"
        )
    return Admissibility(theorem_violation=theorem_violation, window_violation=window_violation)


def require_admissible(p: ScalingParams, mode: ValidityMode = ValidityMode.WINDOW) -> Admissibility:
    verdict = admissibility(p)
    violation = verdict.violation(mode)
    if violation is not None:
        raise InadmissibleParametersError(f"Inadmissible parameters: {violation}")
    return verdict


def hurst(p: ScalingParams, mode: ValidityMode = ValidityMode.WINDOW) -> float:
    """
    H = 1 - kappa alpha / (2n) - beta / n, which lies in (gamma, 1) exactly when the
    window-mode gate passes.
    """
    require_admissible(p, mode)
    if (
        p.window.kind == WindowKind.BOX
        and p.n == 2
        and p.exponent >= _BOX_SCAN_THRESHOLD
    ):
        logger.warning(
            "Box window with kappa alpha + 2 beta = %.3g: the radial scan of |K|^2 diverges "
            "from 3 on, the nominal bound is 4",
            p.exponent,
        )
    return 1.0 - p.kappa * p.alpha / (2.0 * p.n) - p.beta / p.n


def hurst_range(p: ScalingParams) -> tuple[float, float]:
    return gamma_lower_bound(p.window), 1.0


def normalization(
    p: ScalingParams, r: float, convention: NormalizationConvention = "fourier"
) -> float:
    """
    r^(beta + kappa alpha/2 - n) / (c_1^(kappa/2) g(0) h(1)), divided by (2 pi)^n in the
    "fourier" convention. With "isometric" the normalized functional targets X_kappa itself.
    """
    if r <= 0:
        raise ContractError(f"Radius must be positive, got r={r}")
    if p.kappa * p.alpha <= 0:
        raise InadmissibleParametersError("kappa alpha = 0 gives a degenerate limit")
    value = r ** (p.beta + p.kappa * p.alpha / 2.0 - p.n) / (
        p.spectral().c1 ** (p.kappa / 2.0) * p.g0 * p.h1
    )
    if convention == "fourier":
        value /= (2.0 * math.pi) ** p.n
    elif convention != "isometric":
        raise ContractError(f"Unknown normalization convention {convention!r}")
    return value
