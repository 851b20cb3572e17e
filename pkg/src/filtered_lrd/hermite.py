"""
Probabilists' Hermite polynomials, Hermite expansions against the standard normal
density, and Hermite-rank detection.
"""

import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.polynomial import hermite_e

from filtered_lrd.errors import (
    ContractError,
    HermiteEvaluationError,
    RankUndeterminedError,
    UnsupportedDegreeError,
)
from filtered_lrd.logger import logging

logger = logging.getLogger(__name__)

MAX_DEGREE = 60
DEFAULT_QUAD_NODES = 128
DEFAULT_RANK_TOLERANCE = 1e-9


def _check_degree(m: int) -> None:
    if m < 0:
        raise UnsupportedDegreeError(f"Hermite degree must be non-negative, got {m}")
    if m > MAX_DEGREE:
        raise UnsupportedDegreeError(
            f"Hermite degree {m} exceeds the supported maximum {MAX_DEGREE}"
        )


def hermite_values(J: int, x: float | np.ndarray) -> np.ndarray:
    """
    H_0(x), ..., H_J(x) stacked along the first axis.
    """
    _check_degree(J)
    x = np.asarray(x, dtype=float)
    values = np.empty((J + 1, *x.shape))
    values[0] = 1.0
    if J >= 1:
        values[1] = x
    for m in range(1, J):
        values[m + 1] = x * values[m] - m * values[m - 1]
    return values


def hermite_eval(m: int, x: float | np.ndarray) -> float | np.ndarray:
    """
    H_m(x) via H_{m+1} = x H_m - m H_{m-1}, H_0 = 1, H_1 = x.
    """
    _check_degree(m)
    x_arr = np.asarray(x, dtype=float)
    prev = np.ones_like(x_arr)
    if m == 0:
        result = prev
    else:
        cur = x_arr.copy()
        for k in range(1, m):
            prev, cur = cur, x_arr * cur - k * prev
        result = cur
    if np.ndim(x) == 0:
        return float(result)
    return result


def normal_quadrature(quad_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Gauss-Hermite rule for the standard normal density phi.

    `hermegauss` integrates against exp(-x^2/2); dividing the weights by sqrt(2 pi)
    turns that into phi, so the weights sum to one.
    """
    if quad_nodes < 1:
        raise ContractError(f"Quadrature needs at least one node, got {quad_nodes}")
    nodes, weights = hermite_e.hermegauss(quad_nodes)
    return nodes, weights / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class HermiteExpansion:
    coeffs: np.ndarray
    truncation_degree: int
    rank: Optional[int]
    l2_norm_sq: float

    def coefficient(self, j: int) -> float:
        return float(self.coeffs[j])

    def parseval_residual(self) -> float:
        """
        |sum_j C_j^2 / j! - int S^2 phi|, non-increasing in the truncation degree.
        """
        factorials = np.array([math.factorial(j) for j in range(self.truncation_degree + 1)])
        return abs(float(np.sum(self.coeffs**2 / factorials)) - self.l2_norm_sq)

    def reconstruct(self, x: float | np.ndarray) -> float | np.ndarray:
        values = hermite_values(self.truncation_degree, x)
        factorials = np.array([math.factorial(j) for j in range(self.truncation_degree + 1)])
        scaled = self.coeffs / factorials
        result = np.tensordot(scaled, values, axes=(0, 0))
        if np.ndim(x) == 0:
            return float(result)
        return result


def expand(
    S: Callable[[float], float],
    J: int,
    quad_nodes: int = DEFAULT_QUAD_NODES,
    rank_tolerance: float = DEFAULT_RANK_TOLERANCE,
) -> HermiteExpansion:
    """
    Hermite coefficients C_j = int S H_j phi for j = 0..J.
    """
    _check_degree(J)
    if quad_nodes < 2 * J:
        raise ContractError(
            f"quad_nodes={quad_nodes} is too small for degree {J}; need at least {2 * J}"
        )
    nodes, weights = normal_quadrature(quad_nodes)
    evaluations = np.fromiter((S(float(node)) for node in nodes), dtype=float, count=nodes.size)
    bad = ~np.isfinite(evaluations)
    if bad.any():
        node = float(nodes[np.argmax(bad)])
        raise HermiteEvaluationError(f"S is not finite at quadrature node {node:.6g}", node)

    basis = hermite_values(J, nodes)
    coeffs = basis @ (weights * evaluations)
    l2_norm_sq = float(np.sum(weights * evaluations**2))

    partial = HermiteExpansion(coeffs=coeffs, truncation_degree=J, rank=None, l2_norm_sq=l2_norm_sq)
    try:
        rank = hermite_rank(partial, rank_tolerance) if J >= 1 else None
    except RankUndeterminedError:
        logger.debug("Hermite rank undetermined up to degree %d", J)
        rank = None
    return HermiteExpansion(coeffs=coeffs, truncation_degree=J, rank=rank, l2_norm_sq=l2_norm_sq)


def hermite_rank(exp: HermiteExpansion, rank_tolerance: float = DEFAULT_RANK_TOLERANCE) -> int:
    """
    Smallest j >= 1 with |C_j| above the tolerance. C_0 is ignored.

    The tolerance is relative to sqrt(int S^2 phi).
    """
    if exp.truncation_degree < 1:
        raise ContractError("Hermite rank needs coefficients up to at least degree 1")
    threshold = rank_tolerance * math.sqrt(max(exp.l2_norm_sq, 0.0))
    for j in range(1, exp.truncation_degree + 1):
        if abs(exp.coeffs[j]) > threshold:
            return j
    raise RankUndeterminedError(
        f"All Hermite coefficients up to degree {exp.truncation_degree} are below "
        f"{threshold:.3g}; retry with a larger truncation degree"
    )
