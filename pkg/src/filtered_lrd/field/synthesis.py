import math
import os
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from typing import Any, Optional

import numpy as np
from scipy import fft

from filtered_lrd.errors import ContractError, EmbeddingFailureError, MemoryBudgetError
from filtered_lrd.field.covariance import CovarianceModel
from filtered_lrd.logger import logging
from filtered_lrd.rng import make_rng

logger = logging.getLogger(__name__)

PADDING_FACTORS = (2, 4, 8)
NEGATIVITY_TOLERANCE = 1e-10
DEFAULT_MEMORY_BUDGET_MB = 2048
# complex128 arrays alive at once while sampling: eigenvalues, noise, transform, covariance
_BYTES_PER_EMBEDDED_CELL = 16 * 4


def memory_budget_bytes() -> int:
    raw = os.environ.get("LRF_MEMORY_BUDGET_MB")
    megabytes = float(raw) if raw else DEFAULT_MEMORY_BUDGET_MB
    return int(megabytes * 1024 * 1024)


def embedding_bytes(shape: Sequence[int], padding: int = PADDING_FACTORS[0]) -> int:
    return _BYTES_PER_EMBEDDED_CELL * math.prod(fft.next_fast_len(padding * m) for m in shape)


@dataclass(frozen=True, eq=False)
class LatticeField:
    """
    Values of a field on a regular grid. Cell i sits at (i - origin) * spacing.
    """

    n: int
    shape: tuple[int, ...]
    spacing: float
    values: np.ndarray
    origin: tuple[int, ...]
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.shape) != self.n or len(self.origin) != self.n:
            raise ContractError(
                f"Field of dimension {self.n} needs {self.n} axes, got shape={self.shape}, "
                f"origin={self.origin}"
            )
        if any(m <= 0 for m in self.shape):
            raise ContractError(f"Field shape must be strictly positive, got {self.shape}")
        if self.values.shape != tuple(self.shape):
            raise ContractError(
                f"Values have shape {self.values.shape}, expected {tuple(self.shape)}"
            )
        if not all(0 <= o < m for o, m in zip(self.origin, self.shape, strict=True)):
            raise ContractError(f"Origin {self.origin} lies outside shape {self.shape}")
        if self.spacing <= 0:
            raise ContractError(f"Grid spacing must be positive, got {self.spacing}")
        if not np.all(np.isfinite(self.values)):
            raise ContractError("Field values must be finite")

    def coordinates(self, axis: int) -> np.ndarray:
        return (np.arange(self.shape[axis]) - self.origin[axis]) * self.spacing

    def with_values(self, values: np.ndarray, **metadata: Any) -> "LatticeField":
        return replace(self, values=values, metadata={**self.metadata, **metadata})


def default_origin(shape: Sequence[int]) -> tuple[int, ...]:
    return tuple(m // 2 for m in shape)


def _embedding_eigenvalues(
    model: CovarianceModel, shape: Sequence[int], spacing: float, padding: int
) -> tuple[tuple[int, ...], np.ndarray]:
    sizes = tuple(fft.next_fast_len(padding * m) for m in shape)
    lags = []
    for size in sizes:
        k = np.arange(size)
        lags.append(np.minimum(k, size - k) * spacing)
    grids = np.meshgrid(*lags, indexing="ij", sparse=True)
    dist_sq = sum(g * g for g in grids)
    ring = (1.0 + dist_sq) ** (-model.alpha / 2.0)
    return sizes, fft.fftn(ring).real


def synthesize(
    model: CovarianceModel,
    shape: int | Sequence[int],
    spacing: float = 1.0,
    seed: int = 0,
    origin: Optional[Sequence[int]] = None,
) -> LatticeField:
    """
    Zero-mean Gaussian lattice field with covariance B(|i - j| spacing), sampled by
    circulant embedding on a padded torus.
    """
    shape = (shape,) if isinstance(shape, int) else tuple(int(m) for m in shape)
    if len(shape) != model.n:
        raise ContractError(f"Shape {shape} does not match dimension n={model.n}")
    if spacing <= 0:
        raise ContractError(f"Grid spacing must be positive, got {spacing}")

    budget = memory_budget_bytes()
    needed = embedding_bytes(shape)
    if needed > budget:
        raise MemoryBudgetError(
            f"Embedding shape {shape} needs {needed / 2**20:.1f} MiB, budget is "
            f"{budget / 2**20:.1f} MiB (LRF_MEMORY_BUDGET_MB)"
        )

    eigenvalues: Optional[np.ndarray] = None
    sizes: tuple[int, ...] = ()
    # the first factor always fits: it was checked against the budget above
    min_eig, padding = 0.0, PADDING_FACTORS[0]
    capped = False
    for factor in PADDING_FACTORS:
        if embedding_bytes(shape, factor) > budget:
            capped = True
            break
        padding = factor
        sizes, candidate = _embedding_eigenvalues(model, shape, spacing, padding)
        min_eig = float(candidate.min())
        if min_eig >= -NEGATIVITY_TOLERANCE * float(candidate.max()):
            eigenvalues = candidate
            break
        logger.info(
            "Circulant embedding not non-negative, escalating padding",
            extra={"padding": padding, "min_eigenvalue": min_eig},
        )
    if eigenvalues is None:
        reason = " (larger padding exceeds the memory budget)" if capped else ""
        raise EmbeddingFailureError(
            f"Circulant embedding failed: most negative eigenvalue {min_eig:.3e} "
            f"at padding factor {padding}{reason}",
            min_eigenvalue=min_eig,
            padding=padding,
        )
    clamped = int(np.count_nonzero(eigenvalues < 0))
    if clamped:
        logger.warning(
            "Clamped %d slightly negative embedding eigenvalues", clamped,
            extra={"padding": padding, "min_eigenvalue": min_eig},
        )
        eigenvalues = np.clip(eigenvalues, 0.0, None)

    rng = make_rng(seed)
    noise = rng.standard_normal(sizes) + 1j * rng.standard_normal(sizes)
    amplitude = np.sqrt(eigenvalues / eigenvalues.size)
    realization = fft.fftn(amplitude * noise).real
    values = np.ascontiguousarray(realization[tuple(slice(0, m) for m in shape)])

    return LatticeField(
        n=model.n,
        shape=shape,
        spacing=float(spacing),
        values=values,
        origin=tuple(origin) if origin is not None else default_origin(shape),
        metadata={"seed": int(seed), "alpha": model.alpha, "padding": padding},
    )
