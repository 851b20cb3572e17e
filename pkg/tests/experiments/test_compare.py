import math

import numpy as np
import pytest

from filtered_lrd.errors import ContractError
from filtered_lrd.experiments.compare import (
    distribution_compare,
    two_sample_critical_value,
    variance_standardize,
)


def test_critical_value():
    assert two_sample_critical_value(1000, 1000) == pytest.approx(1.358 * math.sqrt(2.0 / 1000.0))
    assert two_sample_critical_value(500, 2000, level=0.01) > two_sample_critical_value(500, 2000)


def test_standardize_keeps_the_mean_sign(rng: np.random.Generator):
    x = rng.normal(2.0, 5.0, size=1000)
    z = variance_standardize(x)
    assert np.std(z, ddof=1) == pytest.approx(1.0)
    assert z.mean() > 0


def test_identical_samples(rng: np.random.Generator):
    x = rng.standard_normal(800)
    result = distribution_compare(x, x)
    assert result.ks_distance == 0.0
    assert result.mean_gap == 0.0
    assert result.skewness_gap == 0.0


def test_same_law_is_below_critical_value(rng: np.random.Generator):
    result = distribution_compare(rng.standard_normal(2000), rng.standard_normal(2000), level=0.001)
    assert result.ks_distance < result.critical_value
    assert result.empirical_count == 2000


def test_shifted_law_is_detected(rng: np.random.Generator):
    result = distribution_compare(rng.standard_normal(1000), rng.standard_normal(1000) + 0.5)
    assert result.ks_distance > result.critical_value
    assert result.mean_gap < 0


def test_skewed_law_has_skewness_gap(rng: np.random.Generator):
    chi = rng.chisquare(1, size=5000)
    result = distribution_compare(chi, rng.standard_normal(5000))
    assert result.skewness_gap > 1.0


def test_degenerate_and_small_inputs(rng: np.random.Generator):
    with pytest.raises(ContractError):
        distribution_compare(np.ones(1000), rng.standard_normal(1000))
    with pytest.raises(ContractError):
        distribution_compare(rng.standard_normal(100), rng.standard_normal(1000))
    with pytest.raises(ContractError):
        variance_standardize(np.array([1.0, np.nan, 2.0]))
