"""Exact neighbor queries and pair counts over delay vectors.

All queries use the Euclidean metric and a temporal exclusion window ``w``:
points ``i`` and ``j`` are admissible neighbors only if ``|i - j| > w``.

Candidate generation is delegated to :class:`scipy.spatial.cKDTree`; every
candidate is then re-measured with :func:`pair_distances`, the same routine
the brute-force reference functions below use, so the returned index sets and
counts are identical to an O(N^2) scan, boundary ties included.
"""

from __future__ import annotations

from typing import Tuple, Union

import numpy as np
from scipy.spatial import cKDTree

from .embedding import DelayVectors
from .errors import NoNeighborError, ParameterError

__all__ = [
    "NeighborIndex",
    "pair_distances",
    "brute_nearest",
    "brute_neighbors_within",
    "brute_count_pairs",
]

# relative slack between the tree's internal distances and pair_distances
_SLACK = 1e-12


def _as_points(vectors) -> np.ndarray:
    pts = vectors.points if isinstance(vectors, DelayVectors) else np.asarray(vectors, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2:
        raise ParameterError("points must be a 2-D array (count, dimension)")
    return np.ascontiguousarray(pts, dtype=float)


def _sq_sum(diff_cols) -> np.ndarray:
    cols = iter(diff_cols)
    first = next(cols)
    sq = first * first
    for c in cols:
        sq = sq + c * c
    return sq


def pair_distances(points: np.ndarray, i, j) -> np.ndarray:
    """Euclidean distances between rows ``i`` and ``j`` of ``points``.

    Squares are accumulated coordinate by coordinate in a fixed order, which
    makes the result bit-reproducible across every caller in this package.
    """
    a = points[i]
    b = points[j]
    return np.sqrt(_sq_sum(a[..., k] - b[..., k] for k in range(points.shape[1])))


def _check_radius(radius) -> np.ndarray:
    r = np.atleast_1d(np.asarray(radius, dtype=float))
    if r.ndim != 1 or r.size == 0:
        raise ParameterError("radius must be a scalar or a non-empty 1-D array")
    if not np.all(np.isfinite(r)) or np.any(r <= 0):
        raise ParameterError("radius must be finite and positive")
    return r


def _widen(r):
    return np.nextafter(np.asarray(r, dtype=float) * (1.0 + _SLACK), np.inf)


# -- brute-force reference ----------------------------------------------------


def brute_nearest(points, qid: int, exclusion: int = 0) -> Tuple[int, float]:
    pts = _as_points(points)
    n = len(pts)
    d = pair_distances(pts, np.full(n, qid), np.arange(n))
    d[np.abs(np.arange(n) - qid) <= exclusion] = np.inf
    j = int(np.argmin(d))
    if not np.isfinite(d[j]):
        raise NoNeighborError(f"point {qid} has no neighbor outside exclusion window {exclusion}")
    return j, float(d[j])


def brute_neighbors_within(points, qid: int, radius: float, exclusion: int = 0) -> np.ndarray:
    pts = _as_points(points)
    _check_radius(radius)
    n = len(pts)
    idx = np.arange(n)
    d = pair_distances(pts, np.full(n, qid), idx)
    return idx[(d <= radius) & (np.abs(idx - qid) > exclusion)]


def brute_count_pairs(points, radius, exclusion: int = 0, block: int = 4_000_000):
    """Unordered pairs ``|i - j| > exclusion`` with distance <= radius, by full scan.

    Accepts a scalar radius (returns int) or an array of radii (returns an
    int64 array of the same shape).
    """
    pts = _as_points(points)
    scalar = np.ndim(radius) == 0
    r = _check_radius(radius)
    order = np.argsort(r, kind="stable")
    r_sorted = r[order]
    n, m = pts.shape
    hist = np.zeros(len(r) + 1, dtype=np.int64)
    rows_per_chunk = max(1, block // max(n, 1))
    cols = np.arange(n)
    for start in range(0, n, rows_per_chunk):
        rows = np.arange(start, min(n, start + rows_per_chunk))
        sq = _sq_sum(pts[rows, k][:, None] - pts[None, :, k] for k in range(m))
        d = np.sqrt(sq)
        keep = cols[None, :] > rows[:, None] + exclusion
        # number of radii strictly below each distance
        slot = np.searchsorted(r_sorted, d[keep], side="left")
        hist += np.bincount(slot, minlength=len(r) + 1)
    counts_sorted = np.cumsum(hist)[: len(r)]
    counts = np.empty(len(r), dtype=np.int64)
    counts[order] = counts_sorted
    return int(counts[0]) if scalar else counts


# -- indexed queries ----------------------------------------------------------


class NeighborIndex:
    """Immutable spatial index over a point cloud.

    Parameters
    ----------
    vectors : DelayVectors or array_like, shape (count, dimension)
        Points to index.  The array is copied and frozen.
    """

    def __init__(self, vectors, leafsize: int = 16):
        pts = np.array(_as_points(vectors), copy=True)
        pts.setflags(write=False)
        self.points = pts
        self._tree = cKDTree(pts, leafsize=leafsize)

    def __len__(self) -> int:
        return len(self.points)

    def distance(self, i, j):
        return pair_distances(self.points, i, j)

    def nearest(self, qid: int, exclusion: int = 0, positive: bool = False) -> Tuple[int, float]:
        """Nearest admissible neighbor of point ``qid``; ties go to the lowest index.

        With ``positive=True`` exact duplicates of the query are skipped.
        """
        n = len(self.points)
        q = self.points[qid]
        k = min(n, 2 * exclusion + 2)
        while True:
            d, ids = self._tree.query(q, k=k)
            d, ids = np.atleast_1d(d), np.atleast_1d(ids)
            ok = (ids < n) & (np.abs(ids - qid) > exclusion)
            if positive:
                ok &= d > 0
            if ok.any():
                dstar = d[ok][0]
                break
            if k >= n:
                raise NoNeighborError(
                    f"point {qid} has no admissible neighbor (exclusion window {exclusion})"
                )
            k = min(n, 2 * k)
        cand = np.asarray(self._tree.query_ball_point(q, _widen(dstar)), dtype=np.intp)
        cand = cand[np.abs(cand - qid) > exclusion]
        cd = pair_distances(self.points, np.full(len(cand), qid), cand)
        if positive:
            keep = cd > 0
            cand, cd = cand[keep], cd[keep]
        best = np.lexsort((cand, cd))[0]
        return int(cand[best]), float(cd[best])

    def nearest_all(self, exclusion: int = 0) -> Tuple[np.ndarray, np.ndarray]:
        """Nearest admissible neighbor of every point (vectorized :meth:`nearest`)."""
        n = len(self.points)
        if n < 2:
            raise NoNeighborError("need at least two points")
        k = min(n, 2 * exclusion + 2)
        d, ids = self._tree.query(self.points, k=k)
        d = d.reshape(n, k)
        ids = ids.reshape(n, k)
        rows = np.arange(n)[:, None]
        adm = (ids < n) & (np.abs(ids - rows) > exclusion)
        safe = np.where(ids < n, ids, 0)
        cd = pair_distances(self.points, np.broadcast_to(rows, ids.shape), safe)
        cd = np.where(adm, cd, np.inf)
        best_d = cd.min(axis=1)
        tie = adm & (cd == best_d[:, None])
        best_id = np.where(tie, ids, n).min(axis=1)
        # rows whose answer might lie outside the k returned candidates
        redo = ~np.isfinite(best_d)
        if k < n:
            redo |= d[:, -1] <= _widen(best_d)
        for qid in np.flatnonzero(redo):
            best_id[qid], best_d[qid] = self.nearest(int(qid), exclusion)
        return best_id.astype(np.intp), best_d

    def neighbors_within(self, qid: int, radius: float, exclusion: int = 0) -> np.ndarray:
        """Sorted ids of admissible points within ``radius`` (inclusive) of ``qid``."""
        _check_radius(radius)
        cand = np.asarray(
            self._tree.query_ball_point(self.points[qid], _widen(radius)), dtype=np.intp
        )
        cand = cand[np.abs(cand - qid) > exclusion]
        cd = pair_distances(self.points, np.full(len(cand), qid), cand)
        return np.sort(cand[cd <= radius])

    def neighbor_pairs(self, qids, radius: float, exclusion: int = 0) -> Tuple[np.ndarray, np.ndarray]:
        """Flattened ``(query, neighbor)`` id pairs for many queries at once.

        Equivalent to concatenating :meth:`neighbors_within` over ``qids``.
        """
        _check_radius(radius)
        qids = np.asarray(qids, dtype=np.intp)
        lists = self._tree.query_ball_point(self.points[qids], _widen(radius))
        lens = np.fromiter((len(c) for c in lists), dtype=np.intp, count=len(lists))
        if lens.sum() == 0:
            return np.empty(0, dtype=np.intp), np.empty(0, dtype=np.intp)
        q_flat = np.repeat(qids, lens)
        j_flat = np.fromiter((j for c in lists for j in c), dtype=np.intp, count=int(lens.sum()))
        keep = np.abs(j_flat - q_flat) > exclusion
        q_flat, j_flat = q_flat[keep], j_flat[keep]
        keep = pair_distances(self.points, q_flat, j_flat) <= radius
        q_flat, j_flat = q_flat[keep], j_flat[keep]
        order = np.lexsort((j_flat, q_flat))
        return q_flat[order], j_flat[order]

    def count_pairs_within(self, radius, exclusion: int = 0) -> Union[int, np.ndarray]:
        """Unordered admissible pairs with distance <= radius.

        ``radius`` may be an array, in which case all radii are counted in a
        single dual-tree traversal and an int64 array is returned.
        """
        scalar = np.ndim(radius) == 0
        r = _check_radius(radius)
        n = len(self.points)
        order = np.argsort(r, kind="stable")
        rs = r[order]
        if np.any(np.diff(rs) == 0):
            uniq, inv = np.unique(r, return_inverse=True)
            return self.count_pairs_within(uniq, exclusion)[inv]
        # one binned traversal over the sorted grid lo_0 < hi_0 < lo_1 < hi_1 < ...
        # (pairs the tree puts between lo_k and hi_k need an exact recount)
        edges = np.empty(2 * len(rs))
        edges[0::2] = rs * (1.0 - _SLACK)
        edges[1::2] = _widen(rs)
        if np.all(np.diff(edges) > 0):
            cum = np.cumsum(
                np.asarray(
                    self._tree.count_neighbors(self._tree, edges, cumulative=False),
                    dtype=np.int64,
                )
            )
        else:
            cum = np.asarray(self._tree.count_neighbors(self._tree, edges), dtype=np.int64)
        ordered = np.empty(len(r), dtype=np.int64)
        ordered[order] = cum[0::2]
        shell = np.empty(len(r), dtype=np.int64)
        shell[order] = cum[1::2] - cum[0::2]
        ambiguous = np.flatnonzero(shell != 0)
        if ambiguous.size:
            ordered[ambiguous] = 2 * brute_count_pairs(self.points, r[ambiguous]) + n
        counts = (ordered - n) // 2
        for lag in range(1, min(exclusion, n - 1) + 1):
            dl = np.sort(pair_distances(self.points, np.arange(n - lag), np.arange(lag, n)))
            counts -= np.searchsorted(dl, r, side="right")
        return int(counts[0]) if scalar else counts
