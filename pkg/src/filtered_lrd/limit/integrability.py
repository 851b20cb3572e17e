"""
Numerical finiteness check of int |K(lambda)|^2 |lambda|^(p - n) dlambda.

In polar form the integral is int_0^inf A(rho) rho^(p - 1) drho, A(rho) being the
integral of |K(rho theta)|^2 over unit directions theta. The part below rho = 1 is
integrated directly. Above it, the integrals over doubling bands [rho_i, 2 rho_i] are
fitted as a power of rho_i: an integrand behaving like rho^q gives band integrals
scaling like rho_i^(q + 1), and the tail is finite iff q < -1.
"""

import math
import warnings
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any, Optional

import numpy as np
from numpy.polynomial import legendre
from scipy import integrate, stats

from filtered_lrd.errors import ContractError, InconclusiveScanError
from filtered_lrd.filters import sphere_area
from filtered_lrd.logger import logging
from filtered_lrd.windows import Window, WindowKind, k_delta

logger = logging.getLogger(__name__)

_MIN_CIRCLE_NODES = 256


class ScanClass(StrEnum):
    CONVERGENT = "convergent"
    BOUNDARY = "boundary"
    DIVERGENT_AT_ORIGIN = "divergent-at-origin"
    DIVERGENT_AT_INFINITY = "divergent-at-infinity"


@dataclass(frozen=True)
class ScanSpec:
    rho0: float = 32.0
    bands: int = 6
    # box transforms are averaged over circles numerically, so their scan stays shorter
    box_rho0: float = 16.0
    box_bands: int = 5
    nodes_per_unit: float = 4.0
    min_r_squared: float = 0.99
    boundary_width: float = 0.05

    def __post_init__(self):
        if self.rho0 < 1 or self.box_rho0 < 1:
            raise ContractError("Outer scan must start at rho >= 1")
        if self.bands < 3 or self.box_bands < 3:
            raise ContractError("Tail fit needs at least three bands")


@dataclass(frozen=True)
class ScanResult:
    classification: ScanClass
    exponent: float
    fitted_power: Optional[float] = None
    r_squared: Optional[float] = None
    inner_integral: Optional[float] = None
    diagnostics: dict[str, Any] = field(default_factory=dict)


def direction_energy(w: Window, rho: float | np.ndarray) -> np.ndarray:
    """
    A(rho) = int over unit directions theta of |K(rho theta)|^2.
    """
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    if w.n == 1:
        return np.abs(k_delta(w, rho)) ** 2 + np.abs(k_delta(w, -rho)) ** 2
    if w.kind == WindowKind.BALL:
        on_axis = np.stack([rho] + [np.zeros_like(rho)] * (w.n - 1), axis=-1)
        return sphere_area(w.n) * np.abs(k_delta(w, on_axis)) ** 2
    if w.kind == WindowKind.BOX and w.n == 2:
        values = np.empty_like(rho)
        for i, radius in enumerate(rho):
            count = max(_MIN_CIRCLE_NODES, int(8 * radius))
            theta = 2.0 * math.pi * np.arange(count) / count
            lam = radius * np.stack([np.cos(theta), np.sin(theta)], axis=-1)
            values[i] = 2.0 * math.pi * float(np.mean(np.abs(k_delta(w, lam)) ** 2))
        return values
    raise ContractError(f"No radial scan for {w.describe()}")


def _band_integral(
    w: Window, exponent: float, low: float, high: float, nodes_per_unit: float
) -> float:
    count = max(64, int(nodes_per_unit * (high - low)))
    x, weights = legendre.leggauss(count)
    rho = 0.5 * (high - low) * (x + 1.0) + low
    values = direction_energy(w, rho) * rho ** (exponent - 1.0)
    return 0.5 * (high - low) * float(np.sum(weights * values))


def integrability_scan(
    w: Window, exponent: float, scan: ScanSpec = ScanSpec()  # noqa: B008
) -> ScanResult:
    """
    Classify int |K(lambda)|^2 |lambda|^(exponent - n) dlambda, exponent = kappa alpha + 2 beta.

    A flat tail (|q + 1| within the boundary width) is reported as `boundary`. R^2 says
    little about a flat fit, so such a fit is only rejected when its slope is also too
    uncertain to place.
    """
    if exponent <= 0:
        return ScanResult(ScanClass.DIVERGENT_AT_ORIGIN, exponent)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        inner, _ = integrate.quad(
            lambda rho: float(direction_energy(w, rho)[0]) * rho ** (exponent - 1.0),
            0.0,
            1.0,
            limit=200,
        )

    is_box = w.kind == WindowKind.BOX and w.n == 2
    rho0 = scan.box_rho0 if is_box else scan.rho0
    bands = scan.box_bands if is_box else scan.bands
    starts = rho0 * 2.0 ** np.arange(bands)
    band_values = np.array(
        [_band_integral(w, exponent, low, 2.0 * low, scan.nodes_per_unit) for low in starts]
    )
    diagnostics: dict[str, Any] = {
        "band_starts": starts.tolist(),
        "band_integrals": band_values.tolist(),
        "inner_integral": inner,
    }
    if np.any(band_values <= 0):
        raise InconclusiveScanError("Non-positive band integral in the tail scan", diagnostics)

    fit = stats.linregress(np.log(starts), np.log(band_values))
    slope = float(fit.slope)
    r_squared = float(fit.rvalue**2)
    diagnostics.update(slope=slope, slope_stderr=float(fit.stderr), r_squared=r_squared)
    if r_squared < scan.min_r_squared and fit.stderr > scan.boundary_width / 2.0:
        raise InconclusiveScanError(
            f"Tail fit for {w.describe()} at exponent {exponent:g} has R^2 = {r_squared:.4f} "
            f"< {scan.min_r_squared}",
            diagnostics,
        )

    if abs(slope) <= scan.boundary_width:
        classification = ScanClass.BOUNDARY
    elif slope < 0:
        classification = ScanClass.CONVERGENT
    else:
        classification = ScanClass.DIVERGENT_AT_INFINITY
    logger.debug(
        "Integrability scan %s exponent=%g: %s (q=%.3f)",
        w.describe(), exponent, classification, slope - 1.0,
    )
    return ScanResult(
        classification=classification,
        exponent=exponent,
        fitted_power=slope - 1.0,
        r_squared=r_squared,
        inner_integral=inner,
        diagnostics=diagnostics,
    )
