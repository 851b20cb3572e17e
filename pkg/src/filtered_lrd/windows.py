"""
Observation windows: the interval [-b, a], the unit ball and the box [-1, 1]^n.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum
from typing import Protocol

import numpy as np
from scipy import special

from filtered_lrd.errors import ContractError, InadmissibleParametersError, WindowCoverageError
from filtered_lrd.logger import logging

logger = logging.getLogger(__name__)

# below this |lambda| the ball transform uses its two-term series
_BESSEL_SERIES_LIMIT = 1e-3
_MASK_TOLERANCE = 1e-9


class WindowKind(StrEnum):
    INTERVAL = "interval"
    BALL = "ball"
    BOX = "box"


SUPPORTED_WINDOW_DIMENSIONS = {
    WindowKind.INTERVAL: (1,),
    WindowKind.BALL: (1, 2, 3),
    WindowKind.BOX: (1, 2),
}


class GridLike(Protocol):
    shape: tuple[int, ...]
    spacing: float
    origin: tuple[int, ...]


@dataclass(frozen=True)
class Window:
    kind: WindowKind
    n: int
    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        if self.n not in SUPPORTED_WINDOW_DIMENSIONS[self.kind]:
            raise InadmissibleParametersError(
                f"{self.kind} windows are supported for n in {SUPPORTED_WINDOW_DIMENSIONS[self.kind]}, "
                f"got n={self.n}"
            )
        if self.kind == WindowKind.INTERVAL:
            if self.a < 0 or self.b < 0 or self.a + self.b <= 0:
                raise InadmissibleParametersError(
                    f"Interval [-b, a] needs a, b >= 0 and a + b > 0, got a={self.a}, b={self.b}"
                )
            if self.a == 0 or self.b == 0:
                logger.warning(
                    "Interval window [-%s, %s] has the origin on its boundary", self.b, self.a
                )

    @classmethod
    def interval(cls, a: float = 1.0, b: float = 1.0) -> "Window":
        return cls(WindowKind.INTERVAL, 1, float(a), float(b))

    @classmethod
    def ball(cls, n: int) -> "Window":
        return cls(WindowKind.BALL, n)

    @classmethod
    def box(cls, n: int) -> "Window":
        return cls(WindowKind.BOX, n)

    @property
    def measure(self) -> float:
        match self.kind:
            case WindowKind.INTERVAL:
                return self.a + self.b
            case WindowKind.BALL:
                return math.pi ** (self.n / 2.0) / math.gamma(self.n / 2.0 + 1.0)
            case WindowKind.BOX:
                return 2.0**self.n

    def extent(self) -> tuple[tuple[float, float], ...]:
        """
        Bounding box of the unit-scale window, one (low, high) pair per axis.
        """
        if self.kind == WindowKind.INTERVAL:
            return ((-self.b, self.a),)
        return ((-1.0, 1.0),) * self.n

    def describe(self) -> str:
        if self.kind == WindowKind.INTERVAL:
            return f"interval[-{self.b:g}, {self.a:g}]"
        return f"{self.kind}(n={self.n})"


def _components(w: Window, lam: float | np.ndarray) -> list[np.ndarray]:
    lam = np.asarray(lam, dtype=float)
    if w.n == 1:
        if lam.ndim >= 1 and lam.shape[-1] == 1:
            lam = lam[..., 0]
        return [lam]
    if lam.ndim == 0 or lam.shape[-1] != w.n:
        raise ContractError(f"Frequency for a window in R^{w.n} needs a trailing axis of size {w.n}")
    return [lam[..., j] for j in range(w.n)]


def ball_transform(n: int, rho: float | np.ndarray) -> np.ndarray:
    """
    (2 pi)^(n/2) J_{n/2}(rho) / rho^(n/2), the transform of the unit ball at radius rho.
    """
    rho = np.asarray(rho, dtype=float)
    measure = math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)
    small = rho < _BESSEL_SERIES_LIMIT
    safe = np.where(small, 1.0, rho)
    exact = (2.0 * math.pi) ** (n / 2.0) * special.jv(n / 2.0, safe) / safe ** (n / 2.0)
    series = measure * (1.0 - rho * rho / (2.0 * (n + 2.0)))
    return np.where(small, series, exact)


def k_delta(w: Window, lam: float | np.ndarray) -> complex | np.ndarray:
    """
    K(lambda) = int over the window of exp(i <u, lambda>) du.

    Frequencies are passed with a trailing axis of size n (optional for n = 1).
    """
    parts = _components(w, lam)
    match w.kind:
        case WindowKind.INTERVAL:
            (x,) = parts
            width = w.a + w.b
            values = (
                np.exp(0.5j * x * (w.a - w.b)) * width * np.sinc(x * width / (2.0 * math.pi))
            )
        case WindowKind.BOX:
            values = np.ones(parts[0].shape, dtype=complex)
            for x in parts:
                values = values * 2.0 * np.sinc(x / math.pi)
        case WindowKind.BALL:
            rho = np.sqrt(sum(x * x for x in parts))
            values = ball_transform(w.n, rho).astype(complex)
    if values.ndim == 0:
        return complex(values)
    return values


def gamma_lower_bound(w: Window) -> float:
    """
    Lower end gamma of the Hurst range (gamma, 1) on which the limit variance is finite.
    """
    if w.kind == WindowKind.BALL:
        return 0.5 - 0.5 / w.n
    return 0.0


def admissible_exponent_upper(w: Window) -> float:
    """
    U with kappa alpha + 2 beta < U iff H > gamma; equals 2n(1 - gamma).
    """
    return 2.0 * w.n * (1.0 - gamma_lower_bound(w))


def _check_coverage(w: Window, scale: float, grid: GridLike) -> None:
    for axis, (low, high) in enumerate(w.extent()):
        m, o = grid.shape[axis], grid.origin[axis]
        grid_low = -o * grid.spacing - 0.5 * grid.spacing
        grid_high = (m - 1 - o) * grid.spacing + 0.5 * grid.spacing
        if low * scale < grid_low or high * scale > grid_high:
            raise WindowCoverageError(
                f"{w.describe()} scaled by {scale:g} spans [{low * scale:g}, {high * scale:g}] on "
                f"axis {axis}, grid covers [{grid_low:g}, {grid_high:g}]"
            )


def indicator_mask(w: Window, r: float, t: float, grid: GridLike) -> np.ndarray:
    """
    Cells whose centres lie in the window dilated by r t^(1/n).
    """
    if r <= 0:
        raise ContractError(f"Window radius must be positive, got r={r}")
    if not 0 < t <= 1:
        raise ContractError(f"Window fraction must lie in (0, 1], got t={t}")
    if len(grid.shape) != w.n:
        raise ContractError(f"Grid of dimension {len(grid.shape)} for a window in R^{w.n}")
    scale = r * t ** (1.0 / w.n)
    _check_coverage(w, scale, grid)

    eps = _MASK_TOLERANCE * grid.spacing
    coords: Sequence[np.ndarray] = np.meshgrid(
        *[(np.arange(m) - o) * grid.spacing for m, o in zip(grid.shape, grid.origin, strict=True)],
        indexing="ij",
        sparse=True,
    )
    match w.kind:
        case WindowKind.INTERVAL:
            (x,) = coords
            mask = (x >= -w.b * scale - eps) & (x <= w.a * scale + eps)
        case WindowKind.BALL:
            dist_sq = sum(x * x for x in coords)
            mask = dist_sq <= (scale + eps) ** 2
        case WindowKind.BOX:
            mask = np.ones(grid.shape, dtype=bool)
            for x in coords:
                mask = mask & (np.abs(x) <= scale + eps)
    return np.broadcast_to(mask, grid.shape).copy()
