"""
One replicate of the pre-limit functional: synthesize, map through the functional,
filter, and integrate over the dilated windows.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from filtered_lrd.errors import MemoryBudgetError
from filtered_lrd.experiments.config import FunctionalSpec, ScalingExperimentConfig
from filtered_lrd.field.covariance import CovarianceModel
from filtered_lrd.field.synthesis import LatticeField, embedding_bytes, memory_budget_bytes, synthesize
from filtered_lrd.filters import FilterSpec, apply_filter
from filtered_lrd.limit.params import normalization
from filtered_lrd.logger import logging
from filtered_lrd.rng import derive_seed
from filtered_lrd.windows import Window, indicator_mask

logger = logging.getLogger(__name__)

GUARD_KERNEL_WIDTHS = 8.0


@dataclass(frozen=True)
class GridLayout:
    shape: tuple[int, ...]
    origin: tuple[int, ...]
    spacing: float


def guard_cells(window_cells: int, sigma: float, spacing: float) -> int:
    """
    Extra cells on each side of the window, so the periodic filter does not wrap onto it.
    """
    return max(math.ceil(GUARD_KERNEL_WIDTHS / (sigma * spacing)), window_cells // 4)


def layout_for_radius(window: Window, r: float, spacing: float, sigma: float) -> GridLayout:
    shape, origin = [], []
    for low, high in window.extent():
        below = math.ceil(-low * r / spacing)
        above = math.ceil(high * r / spacing)
        guard = guard_cells(below + above, sigma, spacing)
        origin.append(below + guard)
        shape.append(below + above + 2 * guard + 1)
    return GridLayout(tuple(shape), tuple(origin), spacing)


def check_memory(cfg: ScalingExperimentConfig) -> None:
    budget = memory_budget_bytes()
    for r in cfg.radii:
        layout = layout_for_radius(cfg.params.window, r, cfg.spacing, cfg.sigma)
        needed = embedding_bytes(layout.shape)
        if needed > budget:
            raise MemoryBudgetError(
                f"Radius r={r:g} needs grid {layout.shape} ({needed / 2**20:.1f} MiB), budget is "
                f"{budget / 2**20:.1f} MiB (LRF_MEMORY_BUDGET_MB)"
            )


def replicate_seed(base_seed: int, replicate: int, radius_index: int) -> int:
    return derive_seed(derive_seed(base_seed, replicate), radius_index)


def window_integrals(
    values: LatticeField, window: Window, r: float, t_grid: Sequence[float]
) -> np.ndarray:
    """
    Riemann sums of `values` over the window dilated by r t^(1/n), one per t.
    """
    cell_volume = values.spacing**values.n
    return np.array(
        [
            float(np.sum(values.values[indicator_mask(window, r, t, values)])) * cell_volume
            for t in t_grid
        ]
    )


def filtered_functional(
    field: LatticeField, functional: FunctionalSpec, filter_spec: FilterSpec | None
) -> LatticeField:
    mapped = field.with_values(functional.pointwise(field.values), functional=functional.describe())
    if filter_spec is None:
        return mapped
    return apply_filter(mapped, filter_spec)


def synthesize_for_radius(
    cfg: ScalingExperimentConfig, r: float, seed: int
) -> LatticeField:
    p = cfg.params
    layout = layout_for_radius(p.window, r, cfg.spacing, cfg.sigma)
    return synthesize(
        CovarianceModel(n=p.n, alpha=p.alpha),
        layout.shape,
        spacing=cfg.spacing,
        seed=seed,
        origin=layout.origin,
    )


def compute_replicate(
    cfg: ScalingExperimentConfig, replicate: int, radius_index: int
) -> tuple[np.ndarray, np.ndarray]:
    """
    (raw integrals, normalized integrals) over cfg.t_grid for one replicate at one radius.
    """
    r = cfg.radii[radius_index]
    field = synthesize_for_radius(cfg, r, replicate_seed(cfg.base_seed, replicate, radius_index))
    filtered = filtered_functional(field, cfg.functional, cfg.params.filter_spec(cfg.sigma))
    raw = window_integrals(filtered, cfg.params.window, r, cfg.t_grid)
    return raw, raw * normalization(cfg.params, r, cfg.convention)
