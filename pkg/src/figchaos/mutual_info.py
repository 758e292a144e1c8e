"""Histogram estimate of time-delayed average mutual information."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .embedding import as_array
from .errors import DegenerateSeriesError, ParameterError, SeriesTooShortError

__all__ = ["MiCurve", "FirstMinimum", "mi_curve", "first_minimum", "DEFAULT_BINS"]

DEFAULT_BINS = 64


@dataclass(frozen=True, eq=False)
class MiCurve:
    lags: np.ndarray
    values: np.ndarray  # bits
    bins: int


class FirstMinimum(NamedTuple):
    lag: int
    clear: bool  # False when no interior minimum exists and the global minimum is reported


def _bin_codes(x: np.ndarray, bins: int) -> np.ndarray:
    lo, hi = x.min(), x.max()
    span = hi - lo
    if not span > 0:
        raise DegenerateSeriesError("series is constant; histogram bins have zero width")
    codes = np.floor((x - lo) / span * bins).astype(np.intp)
    return np.clip(codes, 0, bins - 1)


def mi_curve(series, max_lag: int = 20, bins: int = DEFAULT_BINS) -> MiCurve:
    """I(T) in bits for T = 0..max_lag from one equal-width joint histogram per lag.

    Marginals are the row and column sums of each joint histogram, so every
    value is a true Kullback-Leibler divergence and cannot be negative.
    """
    x = as_array(series)
    if max_lag < 0:
        raise ParameterError("max_lag must be >= 0")
    if bins < 2:
        raise ParameterError("bins must be >= 2")
    if len(x) <= max_lag + 1:
        raise SeriesTooShortError(f"need more than {max_lag + 1} samples, got {len(x)}")
    codes = _bin_codes(x, bins)
    values = np.empty(max_lag + 1)
    for lag in range(max_lag + 1):
        a = codes[: len(codes) - lag]
        b = codes[lag:]
        joint = np.bincount(a * bins + b, minlength=bins * bins).reshape(bins, bins)
        p = joint / joint.sum()
        pa = p.sum(axis=1)
        pb = p.sum(axis=0)
        r, c = np.nonzero(p)
        pj = p[r, c]
        mi = float(np.sum(pj * np.log2(pj / (pa[r] * pb[c]))))
        values[lag] = max(mi, 0.0)
    return MiCurve(np.arange(max_lag + 1), values, bins)


def first_minimum(curve: MiCurve) -> FirstMinimum:
    """Smallest lag T >= 1 with I(T-1) > I(T) <= I(T+1).

    Without such a dip, the lag of the global minimum over T >= 1 is returned
    with ``clear=False``.
    """
    v = np.asarray(curve.values, dtype=float)
    lags = np.asarray(curve.lags)
    if len(v) < 3:
        raise ParameterError("curve needs at least 3 lags")
    for t in range(1, len(v) - 1):
        if v[t - 1] > v[t] <= v[t + 1]:
            return FirstMinimum(int(lags[t]), True)
    t = 1 + int(np.argmin(v[1:]))
    return FirstMinimum(int(lags[t]), False)
