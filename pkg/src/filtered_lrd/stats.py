from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np


@dataclass
class RunningMoments:
    """
    Streaming count/mean/M2 accumulator.

    `merge` is Chan's pairwise update, so partial results computed on different workers
    combine to the same value up to floating-point reassociation.
    """

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    @classmethod
    def of(cls, values: Iterable[float] | np.ndarray) -> "RunningMoments":
        arr = np.asarray(values, dtype=float).ravel()
        if arr.size == 0:
            return cls()
        mean = float(arr.mean())
        return cls(count=int(arr.size), mean=mean, m2=float(np.sum((arr - mean) ** 2)))

    def push(self, values: Iterable[float] | np.ndarray) -> None:
        self.merge(RunningMoments.of(values))

    def merge(self, other: "RunningMoments") -> None:
        if other.count == 0:
            return
        if self.count == 0:
            self.count, self.mean, self.m2 = other.count, other.mean, other.m2
            return
        total = self.count + other.count
        delta = other.mean - self.mean
        self.mean += delta * other.count / total
        self.m2 += other.m2 + delta * delta * self.count * other.count / total
        self.count = total

    @property
    def variance(self) -> float:
        if self.count < 2:
            return float("nan")
        return self.m2 / (self.count - 1)

    @property
    def stderr(self) -> float:
        """Standard error of the mean."""
        if self.count < 2:
            return float("nan")
        return float(np.sqrt(self.variance / self.count))


def variance_stderr(samples: np.ndarray) -> float:
    """
    Standard error of the unbiased sample variance, using the sample fourth moment.
    """
    x = np.asarray(samples, dtype=float).ravel()
    n = x.size
    if n < 4:
        return float("nan")
    centred = x - x.mean()
    var = float(np.mean(centred**2))
    m4 = float(np.mean(centred**4))
    return float(np.sqrt(max(m4 - var * var * (n - 3) / (n - 1), 0.0) / n))
