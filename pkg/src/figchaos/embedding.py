"""Delay-coordinate reconstruction of a scalar series."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, SeriesTooShortError
from .process import TimeSeries

__all__ = ["EmbeddingConfig", "DelayVectors", "embed", "as_array"]


@dataclass(frozen=True)
class EmbeddingConfig:
    delay: int
    dimension: int

    def __post_init__(self):
        if int(self.delay) != self.delay or self.delay < 1:
            raise ParameterError(f"delay must be a positive integer, got {self.delay}")
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ParameterError(f"dimension must be a positive integer, got {self.dimension}")
        object.__setattr__(self, "delay", int(self.delay))
        object.__setattr__(self, "dimension", int(self.dimension))

    def min_length(self) -> int:
        return (self.dimension - 1) * self.delay + 1


@dataclass(frozen=True, eq=False)
class DelayVectors:
    """Point cloud ``points[i, j] = source[i + j * delay]``.

    ``source`` keeps the scalar series the cloud was built from so that
    estimators can read scalar coordinates beyond the last full vector.
    """

    points: np.ndarray
    config: EmbeddingConfig
    source: np.ndarray

    @property
    def source_length(self) -> int:
        return len(self.source)

    @property
    def count(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.config.dimension

    @property
    def delay(self) -> int:
        return self.config.delay

    def attractor_size(self) -> float:
        """Sample standard deviation of the source series."""
        return float(np.std(self.source, ddof=1)) if len(self.source) > 1 else 0.0

    def __len__(self) -> int:
        return self.count


def as_array(series) -> np.ndarray:
    if isinstance(series, TimeSeries):
        return series.values
    arr = np.asarray(series, dtype=float)
    if arr.ndim != 1:
        raise ParameterError("series must be one-dimensional")
    return arr


def embed(series, config: EmbeddingConfig) -> DelayVectors:
    x = as_array(series)
    need = config.min_length()
    if len(x) < need:
        raise SeriesTooShortError(
            f"series of length {len(x)} is too short for delay {config.delay}, "
            f"dimension {config.dimension}: need at least {need} samples"
        )
    count = len(x) - (config.dimension - 1) * config.delay
    points = np.empty((count, config.dimension))
    for j in range(config.dimension):
        start = j * config.delay
        points[:, j] = x[start : start + count]
    points.setflags(write=False)
    source = np.array(x, dtype=float)
    source.setflags(write=False)
    return DelayVectors(points, config, source)
