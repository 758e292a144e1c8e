"""False nearest neighbors (Kennel, Brown and Abarbanel) and embedding-dimension choice."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .embedding import EmbeddingConfig, as_array, embed
from .errors import ParameterError, SeriesTooShortError
from .neighbors import NeighborIndex

__all__ = ["FnnCurve", "EmbeddingDimension", "fnn_fractions", "min_embedding_dim"]


@dataclass(frozen=True, eq=False)
class FnnCurve:
    dimensions: np.ndarray
    fractions: np.ndarray
    r_tol: float
    a_tol: float
    delay: int = 1
    exclusion: int = 0
    attractor_size: float = float("nan")
    testable: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=int))
    duplicates: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=int))
    size_convention: str = "sample standard deviation (ddof=1)"


class EmbeddingDimension(NamedTuple):
    dimension: int
    unfolded: bool


def fnn_fractions(
    series,
    delay: int,
    m_max: int = 10,
    r_tol: float = 15.0,
    a_tol: float = 2.0,
    exclusion: Optional[int] = None,
) -> FnnCurve:
    """Fraction of false nearest neighbors for m = 1..m_max.

    A neighbor found in dimension m is false when the extra coordinate
    separates it by more than ``r_tol`` times its distance in m dimensions,
    or when its distance in m + 1 dimensions exceeds ``a_tol`` times the
    attractor size (sample standard deviation of the series).  Exact
    duplicates skip the ratio test.  ``exclusion`` defaults to ``delay``.
    """
    x = as_array(series)
    if m_max < 1:
        raise ParameterError("m_max must be >= 1")
    if r_tol <= 0 or a_tol <= 0:
        raise ParameterError("r_tol and a_tol must be positive")
    w = delay if exclusion is None else exclusion
    need = m_max * delay + 2 * w + 2
    if len(x) < need:
        raise SeriesTooShortError(
            f"need at least {need} samples for m_max={m_max}, delay={delay}, got {len(x)}"
        )
    size = float(np.std(x, ddof=1))
    if not size > 0:
        raise ParameterError("series has zero spread")

    fractions, testable, dups = [], [], []
    for m in range(1, m_max + 1):
        # only vectors whose (m+1)-th coordinate x[i + m*delay] exists
        n = len(x) - m * delay
        vec = embed(x[: n + (m - 1) * delay], EmbeddingConfig(delay, m))
        nn, dist = NeighborIndex(vec).nearest_all(w)
        idx = np.arange(n)
        extra = np.abs(x[idx + m * delay] - x[nn + m * delay])
        zero = dist == 0
        ratio_false = np.zeros(n, dtype=bool)
        ratio_false[~zero] = extra[~zero] / dist[~zero] > r_tol
        grown = np.sqrt(dist * dist + extra * extra)
        size_false = grown / size > a_tol
        false = ratio_false | size_false
        fractions.append(false.sum() / n)
        testable.append(n)
        dups.append(int(zero.sum()))

    return FnnCurve(
        dimensions=np.arange(1, m_max + 1),
        fractions=np.array(fractions),
        r_tol=float(r_tol),
        a_tol=float(a_tol),
        delay=int(delay),
        exclusion=int(w),
        attractor_size=size,
        testable=np.array(testable),
        duplicates=np.array(dups),
    )


def min_embedding_dim(curve: FnnCurve, drop_threshold: float = 0.01) -> EmbeddingDimension:
    fr = np.asarray(curve.fractions)
    if fr.size == 0:
        raise ParameterError("empty FNN curve")
    hits = np.flatnonzero(fr <= drop_threshold)
    if hits.size:
        return EmbeddingDimension(int(curve.dimensions[hits[0]]), True)
    return EmbeddingDimension(int(curve.dimensions[-1]), False)
