"""
Radial Fourier filters: multiplier h(|u|) g(|u|) with h homogeneous of degree beta and a
Gaussian taper g, applied to lattice fields by FFT.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import fft, integrate, special

from filtered_lrd.errors import (
    ContractError,
    InadmissibleParametersError,
    QuadratureError,
    SingularMultiplierError,
)
from filtered_lrd.field.synthesis import LatticeField
from filtered_lrd.logger import logging

logger = logging.getLogger(__name__)

# exp(-u^2 / 2 sigma^2) is below 1e-21 past this many sigmas
TAPER_CUTOFF_SIGMAS = 10.0


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^{n-1}."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


@dataclass(frozen=True)
class FilterSpec:
    n: int
    beta: float
    h_scale: float = 1.0
    sigma: float = 1.0

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise InadmissibleParametersError(f"Filter dimension n={self.n} is not supported")
        if not -self.n / 2.0 < self.beta < self.n / 2.0:
            raise InadmissibleParametersError(
                f"Square integrability of h*g needs -n/2 < beta < n/2, got beta={self.beta}, n={self.n}"
            )
        if self.h_scale == 0:
            raise InadmissibleParametersError("h(1) must be non-zero")
        if self.sigma <= 0:
            raise InadmissibleParametersError(f"Taper width must be positive, got sigma={self.sigma}")

    @property
    def g0(self) -> float:
        return 1.0

    def taper(self, u: float | np.ndarray) -> float | np.ndarray:
        u = np.asarray(u, dtype=float)
        return np.exp(-(u * u) / (2.0 * self.sigma * self.sigma))


def multiplier(spec: FilterSpec, lambda_norm: float | np.ndarray) -> float | np.ndarray:
    """
    h(1) |lambda|^beta g(|lambda|).
    """
    lam = np.asarray(lambda_norm, dtype=float)
    if np.any(lam < 0):
        raise ContractError("Frequency norm must be non-negative")
    if spec.beta < 0 and np.any(lam == 0):
        raise SingularMultiplierError(
            f"Multiplier with beta={spec.beta} < 0 is singular at zero frequency"
        )
    values = spec.h_scale * lam**spec.beta * spec.taper(lam)
    if np.ndim(lambda_norm) == 0:
        return float(values)
    return values


def frequency_norms(shape: tuple[int, ...], spacing: float, real: bool = True) -> np.ndarray:
    """
    |lambda_k| on the DFT grid, in continuous (spacing-aware) angular frequency units.
    The last axis is halved when `real` (rfftn layout).
    """
    axes = []
    for i, m in enumerate(shape):
        if real and i == len(shape) - 1:
            axes.append(2.0 * math.pi * fft.rfftfreq(m, d=spacing))
        else:
            axes.append(2.0 * math.pi * fft.fftfreq(m, d=spacing))
    grids = np.meshgrid(*axes, indexing="ij", sparse=True)
    return np.sqrt(sum(g * g for g in grids))


def apply_filter(input: LatticeField, spec: FilterSpec) -> LatticeField:  # noqa: A002
    """
    Spectral approximation of int G(|y|) F(x + y) dy on the periodic grid.
    """
    if spec.n != input.n:
        raise ContractError(f"Filter of dimension {spec.n} applied to a field of dimension {input.n}")
    norms = frequency_norms(input.shape, input.spacing)
    dc = (0,) * input.n
    if spec.beta < 0:
        norms = norms.copy()
        norms[dc] = 1.0
        mult = multiplier(spec, norms)
        mult[dc] = 0.0
        dc_policy = "annihilated"
    else:
        mult = multiplier(spec, norms)
        dc_policy = "multiplier"
    logger.debug("Filtering %s field, DC policy %s", input.shape, dc_policy)
    spectrum = fft.rfftn(input.values)
    values = fft.irfftn(spectrum * mult, s=input.shape)
    return input.with_values(values, dc_policy=dc_policy, filter_beta=spec.beta)


def _radial_profile(n: int, z: np.ndarray | float) -> np.ndarray | float:
    """
    Spherical average of exp(i <x, u>) with |x||u| = z.
    """
    if n == 1:
        return np.cos(z)
    if n == 2:
        return special.j0(z)
    return np.sinc(np.asarray(z) / math.pi)


def kernel_G(
    spec: FilterSpec,
    x_norm: float,
    rtol: float = 1e-8,
    atol: float = 1e-12,
) -> float:
    """
    G(|x|) = (2 pi)^(-n) int exp(-i <x, u>) h(|u|) g(|u|) du, by radial quadrature.
    """
    if x_norm < 0:
        raise ContractError(f"x_norm must be non-negative, got {x_norm}")
    n = spec.n
    prefactor = sphere_area(n) / (2.0 * math.pi) ** n
    upper = TAPER_CUTOFF_SIGMAS * spec.sigma

    def integrand(u: float) -> float:
        if u == 0.0:
            return 0.0 if spec.beta + n - 1 > 0 else float(spec.h_scale)
        return float(
            _radial_profile(n, x_norm * u) * spec.h_scale * u**spec.beta * spec.taper(u) * u ** (n - 1)
        )

    estimates = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for limit in (100, 400):
            value, _ = integrate.quad(integrand, 0.0, upper, limit=limit)
            estimates.append(prefactor * value)
    coarse, fine = estimates
    if abs(fine - coarse) > max(atol, rtol * abs(fine)):
        raise QuadratureError(
            f"Kernel quadrature at |x|={x_norm} did not converge: {coarse!r} vs {fine!r}"
        )
    return fine


def multiplier_energy(spec: FilterSpec) -> float:
    """
    (2 pi)^(-n) int h^2 g^2 du, the L2 norm of G by Parseval.
    """
    n = spec.n
    value, _ = integrate.quad(
        lambda u: (spec.h_scale * u**spec.beta) ** 2 * float(spec.taper(u)) ** 2 * u ** (n - 1),
        0.0,
        TAPER_CUTOFF_SIGMAS * spec.sigma,
        limit=200,
    )
    return sphere_area(n) * value / (2.0 * math.pi) ** n
