from dataclasses import dataclass

import numpy as np

from filtered_lrd.experiments.config import ScalingExperimentConfig


@dataclass
class ReplicateTask:
    cfg: ScalingExperimentConfig
    replicate: int
    radius_index: int


@dataclass
class ReplicateOutcome:
    replicate: int
    radius_index: int
    raw: np.ndarray
    normalized: np.ndarray
