import math
from dataclasses import dataclass, field
from enum import StrEnum
from functools import cached_property
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial

from filtered_lrd.errors import ContractError
from filtered_lrd.hermite import HermiteExpansion, expand, hermite_eval, hermite_rank
from filtered_lrd.limit.params import NormalizationConvention, ScalingParams, ValidityMode
from filtered_lrd.limit.sampler import LimitSampleGrid

MIN_RADII = 3
MIN_REPLICATES = 30


class FunctionalKind(StrEnum):
    HERMITE = "hermite"
    POLYNOMIAL = "polynomial"


@dataclass(frozen=True)
class FunctionalSpec:
    """
    The pointwise map applied to the field: H_kappa itself, or a polynomial S given by
    monomial coefficients (c_0 + c_1 x + ...).

    A polynomial S is centred by C_0 and divided by C_kappa / kappa!, so its leading
    Hermite term is exactly H_kappa.
    """

    kind: FunctionalKind
    rank: int
    coefficients: tuple[float, ...] = ()

    def __post_init__(self):
        if self.rank < 1:
            raise ContractError(f"Hermite rank must be >= 1, got {self.rank}")
        if self.kind == FunctionalKind.POLYNOMIAL:
            if not self.coefficients:
                raise ContractError("A polynomial functional needs coefficients")
            detected = hermite_rank(self.expansion)
            if detected != self.rank:
                raise ContractError(
                    f"Polynomial {list(self.coefficients)} has Hermite rank {detected}, "
                    f"expected {self.rank}"
                )

    @classmethod
    def hermite(cls, kappa: int) -> "FunctionalSpec":
        return cls(FunctionalKind.HERMITE, kappa)

    @classmethod
    def polynomial(cls, coefficients: list[float], expected_rank: int) -> "FunctionalSpec":
        return cls(FunctionalKind.POLYNOMIAL, expected_rank, tuple(float(c) for c in coefficients))

    @cached_property
    def expansion(self) -> HermiteExpansion:
        if self.kind == FunctionalKind.HERMITE:
            coeffs = np.zeros(self.rank + 1)
            coeffs[self.rank] = math.factorial(self.rank)
            return HermiteExpansion(coeffs, self.rank, self.rank, float(math.factorial(self.rank)))
        degree = max(len(self.coefficients) - 1, 1)
        return expand(self.raw, degree, quad_nodes=max(64, 2 * degree))

    def raw(self, x: float | np.ndarray) -> float | np.ndarray:
        """S(x) without centring."""
        if self.kind == FunctionalKind.HERMITE:
            return hermite_eval(self.rank, x)
        return polynomial.polyval(x, self.coefficients)

    def pointwise(self, x: np.ndarray) -> np.ndarray:
        if self.kind == FunctionalKind.HERMITE:
            return np.asarray(hermite_eval(self.rank, x))
        exp = self.expansion
        scale = exp.coefficient(self.rank) / math.factorial(self.rank)
        return (np.asarray(self.raw(x)) - exp.coefficient(0)) / scale

    def describe(self) -> str:
        if self.kind == FunctionalKind.HERMITE:
            return f"hermite({self.rank})"
        return f"polynomial({list(self.coefficients)}, rank={self.rank})"


@dataclass(frozen=True)
class LimitComparison:
    """Draws from the limit law compared against the normalized samples at the largest radius."""

    count: int = 1000
    grid: LimitSampleGrid = field(default_factory=LimitSampleGrid)
    seed_stream: int = 1 << 32


@dataclass(frozen=True)
class ScalingExperimentConfig:
    params: ScalingParams
    functional: FunctionalSpec
    radii: tuple[float, ...]
    t_grid: tuple[float, ...] = (0.25, 0.5, 0.75, 1.0)
    replicates: int = 100
    base_seed: int = 0
    spacing: float = 1.0
    # width of the Gaussian taper g in frequency
    sigma: float = 1.0
    validity_mode: ValidityMode = ValidityMode.WINDOW
    convention: NormalizationConvention = "isometric"
    limit_comparison: Optional[LimitComparison] = None

    def __post_init__(self):
        if len(self.radii) < MIN_RADII:
            raise ContractError(f"Need at least {MIN_RADII} radii, got {len(self.radii)}")
        if any(r <= 0 for r in self.radii):
            raise ContractError(f"Radii must be positive, got {list(self.radii)}")
        if any(b <= a for a, b in zip(self.radii, self.radii[1:], strict=False)):
            raise ContractError(f"Radii must be strictly increasing, got {list(self.radii)}")
        if not self.t_grid or any(not 0 < t <= 1 for t in self.t_grid):
            raise ContractError(f"t values must lie in (0, 1], got {list(self.t_grid)}")
        if self.replicates < MIN_REPLICATES:
            raise ContractError(
                f"Need at least {MIN_REPLICATES} replicates, got {self.replicates}"
            )
        if self.spacing <= 0 or self.sigma <= 0:
            raise ContractError("spacing and sigma must be positive")
        if self.functional.rank != self.params.kappa:
            raise ContractError(
                f"Functional {self.functional.describe()} has rank {self.functional.rank}, "
                f"parameters declare kappa={self.params.kappa}"
            )
