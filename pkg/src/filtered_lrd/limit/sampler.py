"""
Direct samplers of X_1(t) and X_2(t) from a discretized complex white noise.

The frequency cube [-L, L]^n is cut into bins_per_axis^n cells. Cell centres are
(i - B/2 + 1/2) delta with delta = 2L/B, so the centre of cell i mirrors the centre of
cell B - 1 - i. Noise is drawn on the first half of the flattened grid and copied with
conjugation onto the mirrored half, which makes every sample real.
"""

import itertools
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import legendre

from filtered_lrd.errors import ContractError, UnsupportedRankError
from filtered_lrd.limit.params import ScalingParams, ValidityMode, require_admissible
from filtered_lrd.logger import logging
from filtered_lrd.rng import make_rng
from filtered_lrd.windows import k_delta

logger = logging.getLogger(__name__)

SUPPORTED_RANKS = (1, 2)
# rows of noise drawn at once
_SAMPLE_CHUNK = 1000
# cells integrated at once
_CELL_CHUNK = 2048


@dataclass(frozen=True)
class LimitSampleGrid:
    truncation_radius: float = 40.0
    bins_per_axis: int = 64
    # Gauss-Legendre nodes per axis for the per-cell integrals
    quad_nodes: int = 6

    def __post_init__(self):
        if self.truncation_radius <= 0:
            raise ContractError(f"Truncation radius must be positive, got {self.truncation_radius}")
        if self.bins_per_axis < 2 or self.bins_per_axis % 2:
            raise ContractError(
                f"bins_per_axis must be even and >= 2 for Hermitian pairing, got {self.bins_per_axis}"
            )
        if self.quad_nodes < 1:
            raise ContractError("quad_nodes must be positive")

    @property
    def delta(self) -> float:
        return 2.0 * self.truncation_radius / self.bins_per_axis

    @property
    def excluded(self) -> str:
        return "index pairs (j, k) with lambda_j = lambda_k or lambda_j = -lambda_k"

    def axis_centres(self) -> np.ndarray:
        i = np.arange(self.bins_per_axis)
        return (i - self.bins_per_axis / 2 + 0.5) * self.delta

    def cell_centres(self, n: int) -> np.ndarray:
        """
        Centres of all cells, shape (B^n, n), in row-major order. Row N - 1 - k mirrors row k.
        """
        axes = [self.axis_centres()] * n
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)


def _orthant_corner_integral(
    func: Callable[[np.ndarray], np.ndarray], corner_signs: np.ndarray, delta: float, power: float,
    nodes: np.ndarray, weights: np.ndarray,
) -> float:
    """
    int over the cell [0, delta]^n (reflected by corner_signs) of func(lambda) |lambda|^(power - n).

    The cell splits into n pyramids by the largest coordinate; on each, lambda_i = u,
    lambda_j = u v_j and u = w^(1/power) turn the singular weight into a bounded one.
    """
    n = corner_signs.size
    total = 0.0
    grids = np.meshgrid(*([nodes] * n), indexing="ij")
    quad_w = np.prod(np.meshgrid(*([weights] * n), indexing="ij"), axis=0).ravel()
    w = grids[0].ravel()
    v = [g.ravel() for g in grids[1:]]
    u = delta * w ** (1.0 / power)
    v_sq = sum((vj * vj for vj in v), np.zeros_like(w))
    radial = delta**power / power * (1.0 + v_sq) ** ((power - n) / 2.0)
    for largest in range(n):
        coords = np.empty((w.size, n))
        others = [j for j in range(n) if j != largest]
        coords[:, largest] = u
        for j, vj in zip(others, v, strict=True):
            coords[:, j] = u * vj
        total += float(np.sum(quad_w * radial * func(coords * corner_signs)))
    return total


def cell_integrals(
    grid: LimitSampleGrid,
    n: int,
    power: float,
    func: Callable[[np.ndarray], np.ndarray] | None = None,
) -> np.ndarray:
    """
    int over each cell of func(lambda) |lambda|^(power - n), power > 0, for all B^n cells.

    Gauss-Legendre on cells away from the origin, a singularity-removing substitution on
    the 2^n cells touching it.
    """
    if power <= 0:
        raise ContractError(f"Cell integrals need a positive power, got {power}")
    func = func or (lambda lam: np.ones(lam.shape[0]))
    raw_nodes, raw_weights = legendre.leggauss(grid.quad_nodes)
    unit_nodes, unit_weights = 0.5 * (raw_nodes + 1.0), 0.5 * raw_weights
    offsets = np.stack(
        [m.ravel() for m in np.meshgrid(*([unit_nodes - 0.5] * n), indexing="ij")], axis=-1
    ) * grid.delta
    node_weights = np.prod(
        np.meshgrid(*([unit_weights] * n), indexing="ij"), axis=0
    ).ravel() * grid.delta**n

    centres = grid.cell_centres(n)
    result = np.empty(centres.shape[0])
    for start in range(0, centres.shape[0], _CELL_CHUNK):
        block = centres[start : start + _CELL_CHUNK]
        points = block[:, None, :] + offsets[None, :, :]
        flat = points.reshape(-1, n)
        with np.errstate(divide="ignore"):
            weight = np.linalg.norm(flat, axis=-1) ** (power - n)
        values = (func(flat) * weight).reshape(block.shape[0], -1)
        result[start : start + _CELL_CHUNK] = values @ node_weights

    half = grid.bins_per_axis // 2
    for corner in itertools.product((half - 1, half), repeat=n):
        signs = np.array([1.0 if i == half else -1.0 for i in corner])
        flat_index = int(np.ravel_multi_index(corner, (grid.bins_per_axis,) * n))
        result[flat_index] = _orthant_corner_integral(
            func, signs, grid.delta, power, unit_nodes, unit_weights
        )
    return result


def hermitian_noise(rng: np.random.Generator, count: int, cells: int) -> np.ndarray:
    """
    Complex standard Gaussians (E|Z|^2 = 1) with Z[N - 1 - k] = conj(Z[k]).
    """
    half = cells // 2
    z = (rng.standard_normal((count, half)) + 1j * rng.standard_normal((count, half))) / math.sqrt(2.0)
    return np.concatenate([z, np.conj(z[:, ::-1])], axis=1)


def _rank_one_coefficients(
    p: ScalingParams, times: Sequence[float], grid: LimitSampleGrid
) -> np.ndarray:
    """
    Per-cell coefficients, shape (len(times), N): modulus sqrt(int_cell |phi|^2), phase of
    phi at the centre, phi(lambda) = K(lambda t^(1/n)) |lambda|^(beta + (alpha - n)/2).
    """
    centres = grid.cell_centres(p.n)
    power = 2.0 * p.beta + p.alpha
    rows = []
    for t in times:
        scale = t ** (1.0 / p.n)

        def window_energy(lam: np.ndarray, scale: float = scale) -> np.ndarray:
            return np.abs(k_delta(p.window, lam * scale)) ** 2

        energy = cell_integrals(grid, p.n, power, window_energy)
        phase = k_delta(p.window, centres * scale)
        modulus = np.abs(phase)
        unit = np.where(modulus > 0, phase / np.where(modulus > 0, modulus, 1.0), 1.0)
        rows.append(t * unit * np.sqrt(np.maximum(energy, 0.0)))
    return np.array(rows)


def _rank_two_kernels(
    p: ScalingParams, times: Sequence[float], grid: LimitSampleGrid
) -> np.ndarray:
    """
    A_jk = t K((lambda_j + lambda_k) t^(1/n)) |lambda_j + lambda_k|^beta w_j w_k with
    w_j^2 the cell integral of |lambda|^(alpha - n); pairs with lambda_j = +-lambda_k are zero.
    """
    centres = grid.cell_centres(p.n)
    cells = centres.shape[0]
    w = np.sqrt(cell_integrals(grid, p.n, p.alpha))
    sums = centres[:, None, :] + centres[None, :, :]
    norm = np.linalg.norm(sums, axis=-1)
    with np.errstate(divide="ignore"):
        filter_part = np.where(norm > 0, norm, 1.0) ** p.beta
    index = np.arange(cells)
    kernels = []
    for t in times:
        a = t * k_delta(p.window, sums * t ** (1.0 / p.n)) * filter_part * np.outer(w, w)
        a[index, index] = 0.0
        a[index, cells - 1 - index] = 0.0
        kernels.append(a)
    return np.array(kernels)


def sample_limit(
    p: ScalingParams,
    t: float | Sequence[float],
    grid: LimitSampleGrid = LimitSampleGrid(),  # noqa: B008
    seed: int = 0,
    count: int = 10_000,
    mode: ValidityMode = ValidityMode.WINDOW,
) -> np.ndarray:
    """
    `count` independent draws of X_kappa(t), kappa in {1, 2}.

    With a sequence of times every draw shares the same noise across times, so rows are
    samples of the joint law; the result then has shape (count, len(t)).
    """
    if p.kappa not in SUPPORTED_RANKS:
        raise UnsupportedRankError(
            f"Limit sampling is implemented for kappa in {SUPPORTED_RANKS}, got kappa={p.kappa}"
        )
    require_admissible(p, mode)
    scalar = np.ndim(t) == 0
    times = [float(t)] if scalar else [float(x) for x in t]  # type: ignore[union-attr]
    for x in times:
        if not 0 < x <= 1:
            raise ContractError(f"Times must lie in (0, 1], got {x}")
    if count < 1:
        raise ContractError(f"count must be positive, got {count}")

    cells = grid.bins_per_axis**p.n
    logger.info(
        "Sampling X_%d on %d cells", p.kappa, cells,
        extra={"seed": seed, "count": count, "truncation_radius": grid.truncation_radius},
    )
    rng = make_rng(seed)
    out = np.empty((count, len(times)))
    if p.kappa == 1:
        coefficients = _rank_one_coefficients(p, times, grid)
        for start in range(0, count, _SAMPLE_CHUNK):
            z = hermitian_noise(rng, min(_SAMPLE_CHUNK, count - start), cells)
            out[start : start + z.shape[0]] = np.real(z @ coefficients.T)
    else:
        kernels = _rank_two_kernels(p, times, grid)
        for start in range(0, count, _SAMPLE_CHUNK):
            z = hermitian_noise(rng, min(_SAMPLE_CHUNK, count - start), cells)
            for i, a in enumerate(kernels):
                out[start : start + z.shape[0], i] = np.real(np.sum((z @ a) * z, axis=1))
    return out[:, 0] if scalar else out
