"""Correlation sum and correlation dimension (Grassberger-Procaccia)."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .embedding import DelayVectors, EmbeddingConfig, as_array, embed
from .errors import FigchaosError, ParameterError, ScalingRegionError
from .fitting import FitPolicy, policy_fit
from .neighbors import NeighborIndex, pair_distances

__all__ = [
    "CorrelationCurve",
    "DimensionEstimate",
    "DimensionScan",
    "default_radii",
    "correlation_sum",
    "correlation_dimension",
    "dimension_scan",
    "plateau_converged",
]

PLATEAU_TOL = 0.2
MIN_PLATEAU = 3


@dataclass(frozen=True, eq=False)
class CorrelationCurve:
    radii: np.ndarray
    sums: np.ndarray
    counts: np.ndarray  # unordered admissible pairs within each radius
    pair_norm: int
    theiler: int


@dataclass(frozen=True)
class DimensionEstimate:
    value: float
    fit_lo: float  # radius at the start of the fit range
    fit_hi: float
    r_squared: float
    n_fit: int
    window_found: bool = True
    converged: Optional[bool] = None


@dataclass
class DimensionScan:
    delays: List[int]
    dimensions: List[int]
    estimates: List[List[Optional[DimensionEstimate]]]  # [delay][dimension]
    converged: List[bool]  # per delay
    errors: Dict[Tuple[int, int], str] = field(default_factory=dict)

    def values(self) -> np.ndarray:
        return np.array(
            [[np.nan if e is None else e.value for e in row] for row in self.estimates]
        )


def default_radii(
    vectors: DelayVectors,
    n_radii: int = 32,
    n_sample: int = 1000,
    percentiles: Tuple[float, float] = (1.0, 99.0),
    seed: int = 0,
) -> np.ndarray:
    """Log-spaced radii between percentiles of randomly sampled pair distances."""
    pts = vectors.points if isinstance(vectors, DelayVectors) else np.asarray(vectors)
    n = len(pts)
    if n < 2:
        raise ParameterError("need at least two points")
    rng = np.random.Generator(np.random.PCG64(seed))
    i = rng.integers(0, n, n_sample)
    j = rng.integers(0, n - 1, n_sample)
    j = np.where(j >= i, j + 1, j)  # j != i
    d = pair_distances(np.asarray(pts, dtype=float), i, j)
    d = d[d > 0]
    if d.size == 0:
        raise ScalingRegionError("all sampled pair distances are zero")
    lo, hi = np.percentile(d, percentiles)
    if not hi > lo:
        hi = d.max() if d.max() > lo else lo * 2.0
    return np.geomspace(lo, hi, n_radii)


def correlation_sum(vectors, radii=None, theiler: int = 0) -> CorrelationCurve:
    """C(eps): fraction of admissible pairs (|i - j| > theiler) within eps.

    Self-pairs are never counted; the normaliser is the number of admissible
    pairs, so C reaches 1 once eps exceeds the cloud diameter.
    """
    if radii is None:
        radii = default_radii(vectors)
    r = np.asarray(radii, dtype=float)
    if r.ndim != 1 or r.size == 0:
        raise ParameterError("radius grid is empty")
    if np.any(r <= 0) or np.any(np.diff(r) <= 0):
        raise ParameterError("radii must be positive and strictly increasing")
    index = vectors if isinstance(vectors, NeighborIndex) else NeighborIndex(vectors)
    n = len(index)
    if n < 2:
        raise ParameterError("need at least two points")
    m = n - theiler - 1
    norm = m * (m + 1) // 2 if m > 0 else 0
    if norm == 0:
        raise ParameterError(f"no admissible pairs with theiler window {theiler}")
    counts = np.asarray(index.count_pairs_within(r, theiler), dtype=np.int64)
    return CorrelationCurve(r.copy(), counts / norm, counts, norm, int(theiler))


def correlation_dimension(curve: CorrelationCurve, policy: FitPolicy = FitPolicy()) -> DimensionEstimate:
    """Slope of ln C against ln eps over a scaling window chosen by ``policy``."""
    ok = curve.sums > 0
    if ok.sum() < 3:
        raise ScalingRegionError(
            f"only {int(ok.sum())} radii with C > 0; need at least 3 for a fit"
        )
    lr = np.log(curve.radii[ok])
    lc = np.log(curve.sums[ok])
    fit, found = policy_fit(lr, lc, policy)
    radii = curve.radii[ok]
    return DimensionEstimate(
        value=fit.slope,
        fit_lo=float(radii[fit.lo]),
        fit_hi=float(radii[fit.hi]),
        r_squared=fit.r_squared,
        n_fit=fit.hi - fit.lo + 1,
        window_found=found,
    )


def plateau_converged(
    values: Sequence[float], tol: float = PLATEAU_TOL, min_run: int = MIN_PLATEAU
) -> bool:
    """True when the last ``min_run`` successive differences are all below ``tol``.

    Missing (NaN) estimates break the run.
    """
    v = np.asarray(values, dtype=float)
    if len(v) < min_run + 1:
        return False
    tail = np.diff(v[-(min_run + 1) :])
    return bool(np.all(np.isfinite(tail)) and np.all(np.abs(tail) < tol))


def dimension_scan(
    series,
    delays: Sequence[int],
    dimensions: Sequence[int],
    radii=None,
    theiler: int = 0,
    policy: FitPolicy = FitPolicy(),
    plateau_tol: float = PLATEAU_TOL,
    min_plateau: int = MIN_PLATEAU,
    n_radii: int = 32,
) -> DimensionScan:
    """Correlation dimension over a (delay, dimension) grid.

    Each cell uses ``radii`` when given, otherwise the default grid of its own
    embedding.  Cell failures are recorded in ``errors`` and the scan goes on.
    """
    x = as_array(series)
    delays = [int(t) for t in delays]
    dimensions = [int(m) for m in dimensions]
    if not delays or not dimensions:
        raise ParameterError("delay and dimension lists must be non-empty")
    rows, flags = [], []
    errors: Dict[Tuple[int, int], str] = {}
    for t in delays:
        row: List[Optional[DimensionEstimate]] = []
        for m in dimensions:
            try:
                vec = embed(x, EmbeddingConfig(t, m))
                grid = default_radii(vec, n_radii=n_radii) if radii is None else radii
                est = correlation_dimension(correlation_sum(vec, grid, theiler), policy)
            except FigchaosError as exc:
                errors[(t, m)] = f"{type(exc).__name__}: {exc}"
                est = None
            row.append(est)
        flag = plateau_converged(
            [np.nan if e is None else e.value for e in row], plateau_tol, min_plateau
        )
        rows.append([None if e is None else replace(e, converged=flag) for e in row])
        flags.append(flag)
    return DimensionScan(delays, dimensions, rows, flags, errors)
