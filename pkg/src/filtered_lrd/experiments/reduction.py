import math
from collections.abc import Callable

import numpy as np
from scipy import stats

from filtered_lrd.errors import ContractError
from filtered_lrd.experiments.pipeline import layout_for_radius
from filtered_lrd.field.covariance import CovarianceModel
from filtered_lrd.field.synthesis import synthesize
from filtered_lrd.hermite import expand, hermite_eval, hermite_rank
from filtered_lrd.limit.params import ScalingParams
from filtered_lrd.logger import logging
from filtered_lrd.rng import derive_seed
from filtered_lrd.windows import indicator_mask

logger = logging.getLogger(__name__)

DEFAULT_TRUNCATION = 12


def reduction_check(
    S: Callable[[np.ndarray], np.ndarray],
    p: ScalingParams,
    r: float,
    replicates: int,
    seed: int,
    spacing: float = 1.0,
    truncation_degree: int = DEFAULT_TRUNCATION,
) -> float:
    """
    Correlation across replicates between int (S(xi) - C_0) and its rank-kappa term
    (C_kappa / kappa!) int H_kappa(xi), both over the window dilated by r.

    S must act elementwise on arrays. The functionals are not filtered.
    """
    if replicates < 3:
        raise ContractError(f"Need at least three replicates, got {replicates}")
    expansion = expand(lambda x: float(S(np.asarray(x))), max(truncation_degree, p.kappa))
    rank = hermite_rank(expansion)
    if rank != p.kappa:
        raise ContractError(f"S has Hermite rank {rank}, parameters declare kappa={p.kappa}")
    c0 = expansion.coefficient(0)
    leading_scale = expansion.coefficient(p.kappa) / math.factorial(p.kappa)

    layout = layout_for_radius(p.window, r, spacing, sigma=1.0)
    model = CovarianceModel(n=p.n, alpha=p.alpha)
    full, leading = np.empty(replicates), np.empty(replicates)
    mask = None
    for replicate in range(replicates):
        field = synthesize(
            model, layout.shape, spacing=spacing, seed=derive_seed(seed, replicate), origin=layout.origin
        )
        if mask is None:
            mask = indicator_mask(p.window, r, 1.0, field)
        xi = field.values[mask]
        values = np.asarray(S(xi), dtype=float)
        if values.shape != xi.shape:
            raise ContractError("S must map an array elementwise")
        full[replicate] = float(np.sum(values - c0))
        leading[replicate] = leading_scale * float(np.sum(hermite_eval(p.kappa, xi)))

    if np.std(full) == 0 or np.std(leading) == 0:
        raise ContractError("Reduction check produced a constant functional")
    correlation = float(stats.pearsonr(full, leading).statistic)
    logger.info(
        "Reduction check r=%g: correlation %.4f", r, correlation,
        extra={"replicates": replicates, "seed": seed, "kappa": p.kappa},
    )
    return correlation
