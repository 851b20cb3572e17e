import numpy as np
import pytest

from filtered_lrd.experiments.config import FunctionalSpec, ScalingExperimentConfig
from filtered_lrd.limit.params import ScalingParams
from filtered_lrd.windows import Window


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def interval_params() -> ScalingParams:
    return ScalingParams(n=1, kappa=1, alpha=0.4, beta=0.0, window=Window.interval())


@pytest.fixture
def small_experiment(interval_params: ScalingParams) -> ScalingExperimentConfig:
    return ScalingExperimentConfig(
        params=interval_params,
        functional=FunctionalSpec.hermite(1),
        radii=(8.0, 16.0, 32.0),
        t_grid=(0.5, 1.0),
        replicates=30,
        base_seed=11,
    )
