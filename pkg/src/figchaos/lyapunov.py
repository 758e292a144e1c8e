"""Maximal Lyapunov exponent estimators.

Three routes are provided:

* :func:`wolf_mle` follows one fiducial trajectory through the delay space and
  replaces its neighbor after every evolution interval (Wolf et al.).
* :func:`kantz_curve` / :func:`kantz_mle` average the logarithmic divergence
  of whole neighborhoods and fit the growth of S(t) (Kantz).
* :func:`direct_map_lle` iterates the FIGARCH recursion itself with a
  renormalised companion trajectory in the (u, sigma) plane.

All exponents are in nats per sample step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Protocol, Tuple

import numpy as np

from .embedding import DelayVectors
from .errors import (
    DivergenceError,
    FigchaosError,
    NoNeighborError,
    ParameterError,
    SeriesTooShortError,
)
from .fitting import FitPolicy, policy_fit
from .neighbors import NeighborIndex
from .process import FigarchParams, SimConfig, arch_infinity_weights, innovations

__all__ = [
    "EstimatorCurve",
    "LyapunovEstimate",
    "wolf_mle",
    "kantz_curve",
    "kantz_curve_adaptive",
    "kantz_mle",
    "PlaneMap",
    "FigarchPlaneMap",
    "plane_map_lle",
    "direct_map_lle",
    "KANTZ_FIT_POLICY",
]

METHODS = ("wolf", "kantz", "direct-map")
KANTZ_FIT_POLICY = FitPolicy(mode="stable", fallback=(1, 6))


@dataclass(frozen=True, eq=False)
class EstimatorCurve:
    x: np.ndarray
    y: np.ndarray
    label: str = ""
    meta: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class LyapunovEstimate:
    value: float
    method: str
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ParameterError(f"unknown method {self.method!r}")
        if not math.isfinite(self.value):
            raise FigchaosError(f"{self.method} estimate is not finite")

    def to_dict(self) -> dict:
        return {"value": self.value, "method": self.method, "diagnostics": dict(self.diagnostics)}


# -- Wolf ---------------------------------------------------------------------


def wolf_mle(
    vectors: DelayVectors,
    t_evolv: Optional[int] = None,
    scale_bounds: Tuple[float, float] = (0.001, 0.1),
    exclusion: Optional[int] = None,
    theta_max: float = math.radians(30.0),
    min_replacements: int = 50,
) -> LyapunovEstimate:
    """Wolf's fixed-evolution-time estimate of the largest exponent.

    Parameters
    ----------
    vectors : DelayVectors
        Reconstructed trajectory.
    t_evolv : int, optional
        Evolution interval between replacements; defaults to the delay.
    scale_bounds : (float, float)
        Admissible replacement distances as fractions of the attractor size.
    exclusion : int, optional
        Temporal exclusion window; defaults to the delay.
    theta_max : float
        Largest angle (radians) between the evolved separation and a
        replacement separation.
    min_replacements : int
        Below this many replacement steps the result is flagged.

    Returns
    -------
    LyapunovEstimate
        ``sum(ln(L_evolv / L_0)) / (M * t_evolv)`` with M the number of
        replacement steps.  If no candidate satisfies both the scale and the
        angle bounds, the nearest admissible point is used and counted in
        ``diagnostics["fallbacks"]``.
    """
    t_ev = vectors.delay if t_evolv is None else int(t_evolv)
    w = vectors.delay if exclusion is None else int(exclusion)
    if t_ev < 1:
        raise ParameterError("t_evolv must be >= 1")
    lo_frac, hi_frac = scale_bounds
    if not 0 <= lo_frac < hi_frac:
        raise ParameterError("scale bounds must satisfy 0 <= min < max")
    size = vectors.attractor_size()
    eps_min, eps_max = lo_frac * size, hi_frac * size
    pts = vectors.points
    usable = len(pts) - t_ev
    if usable < 2 * w + 3:
        raise SeriesTooShortError("too few points to evolve the fiducial trajectory")
    index = NeighborIndex(pts[:usable])
    cos_max = math.cos(theta_max)

    def bounded(i, ref=None):
        cand = index.neighbors_within(i, eps_max, w) if eps_max > 0 else np.empty(0, int)
        if cand.size == 0:
            return None
        dd = index.distance(np.full(len(cand), i), cand)
        ok = dd >= eps_min
        if ref is not None:
            ref_norm = float(np.sqrt(ref @ ref))
            if ref_norm > 0:
                with np.errstate(invalid="ignore", divide="ignore"):
                    cosine = (pts[cand] - pts[i]) @ ref / (dd * ref_norm)
                ok &= cosine >= cos_max
        if not ok.any():
            return None
        cand, dd = cand[ok], dd[ok]
        return int(cand[np.lexsort((cand, dd))[0]])

    start = None
    for i in range(usable):
        j = bounded(i)
        if j is not None:
            start = (i, j)
            break
    start_fallback = start is None
    if start_fallback:
        # no pair inside the scale bounds anywhere: start from the nearest admissible one
        start = (0, index.nearest(0, w, positive=True)[0])

    i, j = start
    total, steps, fallbacks, collapsed = 0.0, 0, 0, 0
    while True:
        l0 = float(index.distance(i, j))
        i2, j2 = i + t_ev, j + t_ev
        sep = pts[j2] - pts[i2]
        l_ev = float(np.sqrt(sep @ sep))
        if l_ev > 0 and l0 > 0:
            total += math.log(l_ev / l0)
            steps += 1
        else:
            collapsed += 1
        if i2 >= usable:
            break
        nxt = bounded(i2, sep)
        if nxt is None:
            nxt, _ = index.nearest(i2, w, positive=True)
            fallbacks += 1
        i, j = i2, nxt

    if steps == 0:
        raise NoNeighborError("no evolution step produced a finite growth ratio")
    return LyapunovEstimate(
        total / (steps * t_ev),
        "wolf",
        {
            "replacements": steps,
            "fallbacks": fallbacks,
            "collapsed": collapsed,
            "start_index": start[0],
            "start_fallback": start_fallback,
            "t_evolv": t_ev,
            "eps_min": eps_min,
            "eps_max": eps_max,
            "theta_max_deg": math.degrees(theta_max),
            "exclusion": w,
            "too_few_replacements": steps < min_replacements,
        },
    )


# -- Kantz --------------------------------------------------------------------


def kantz_curve(
    vectors: DelayVectors,
    eps: Optional[float] = None,
    t_max: int = 15,
    exclusion: Optional[int] = None,
    min_neighbors: int = 5,
    eps_fraction: float = 0.05,
) -> EstimatorCurve:
    """Kantz's S(t) for t = 0..t_max.

    For every reference vector with at least ``min_neighbors`` admissible
    neighbors within ``eps`` (default ``eps_fraction`` times the attractor
    size), the neighbors' distances from the reference are followed on the
    last delay coordinate, ``|x[i + (m-1)T + t] - x[j + (m-1)T + t]|``.
    S(t) is the mean over references of the log of the mean neighbor distance.
    """
    if t_max < 1:
        raise ParameterError("t_max must be >= 1")
    w = vectors.delay if exclusion is None else int(exclusion)
    if eps is None:
        eps = eps_fraction * vectors.attractor_size()
    if not eps > 0:
        raise ParameterError("eps must be positive")
    pts = vectors.points
    n_ref = len(pts) - t_max
    if n_ref < 2:
        raise SeriesTooShortError(f"need more than {t_max + 1} vectors for t_max={t_max}")
    last = np.ascontiguousarray(pts[:, -1])
    index = NeighborIndex(pts[:n_ref])
    q, j = index.neighbor_pairs(np.arange(n_ref), eps, w)
    counts = np.bincount(q, minlength=n_ref)
    is_ref = counts >= min_neighbors
    keep = is_ref[q]
    q, j = q[keep], j[keep]
    refs = np.flatnonzero(is_ref)
    if refs.size == 0:
        raise NoNeighborError(
            f"no reference point has {min_neighbors} neighbors within eps={eps:.4g}"
        )
    means = np.empty((t_max + 1, refs.size))
    for t in range(t_max + 1):
        dist = np.abs(last[q + t] - last[j + t])
        means[t] = np.bincount(q, weights=dist, minlength=n_ref)[refs] / counts[refs]
    usable = np.all(means > 0, axis=0)
    if not usable.any():
        raise NoNeighborError("every neighborhood collapsed to zero distance")
    s = np.log(means[:, usable]).mean(axis=1)
    return EstimatorCurve(
        np.arange(t_max + 1, dtype=float),
        s,
        "S(t)",
        {
            "eps": float(eps),
            "n_references": int(usable.sum()),
            "n_pairs": int(len(q)),
            "exclusion": w,
            "min_neighbors": int(min_neighbors),
        },
    )


def kantz_curve_adaptive(
    vectors: DelayVectors,
    eps_fraction: float = 0.05,
    growth: float = 2.0,
    max_fraction: float = 2.0,
    min_references: int = 50,
    **kwargs,
) -> EstimatorCurve:
    """:func:`kantz_curve` with eps grown geometrically until enough references exist.

    The first eps (as a fraction of the attractor size) that yields at least
    ``min_references`` reference points is used; if none does, the curve at
    the largest eps with any references is returned.
    """
    if growth <= 1:
        raise ParameterError("growth must exceed 1")
    size = vectors.attractor_size()
    frac = eps_fraction
    best = None
    while frac <= max_fraction * (1 + 1e-12):
        try:
            curve = kantz_curve(vectors, eps=frac * size, **kwargs)
        except NoNeighborError:
            curve = None
        if curve is not None:
            curve.meta["eps_fraction"] = frac
            best = curve
            if curve.meta["n_references"] >= min_references:
                return curve
        frac *= growth
    if best is None:
        raise NoNeighborError(
            f"no reference points for eps up to {max_fraction} x attractor size"
        )
    return best


def kantz_mle(
    curve: EstimatorCurve,
    fit_range: Optional[Tuple[float, float]] = None,
    policy: FitPolicy = KANTZ_FIT_POLICY,
) -> LyapunovEstimate:
    """Least-squares slope of S(t).

    An explicit ``fit_range`` (inclusive, in units of t) overrides ``policy``.
    """
    if fit_range is not None:
        policy = FitPolicy(mode="fixed", fixed=tuple(fit_range))
    fit, found = policy_fit(curve.x, curve.y, policy)
    return LyapunovEstimate(
        fit.slope,
        "kantz",
        {
            "fit_lo": float(curve.x[fit.lo]),
            "fit_hi": float(curve.x[fit.hi]),
            "r_squared": fit.r_squared,
            "window_found": found,
            **{k: v for k, v in curve.meta.items()},
        },
    )


# -- direct two-dimensional map ----------------------------------------------


class PlaneMap(Protocol):
    """A dynamical system observed through two coordinates.

    States are treated as immutable values: ``advance`` and ``shift`` return
    new states.
    """

    def initial(self) -> Any: ...

    def advance(self, state: Any, step: int) -> Any: ...

    def coords(self, state: Any) -> Tuple[float, float]: ...

    def shift(self, state: Any, dx: float, dy: float) -> Any: ...


class FigarchPlaneMap:
    """FIGARCH recursion seen in the (u_t, sigma_t) plane.

    The full truncated history of squared shocks travels with each state.
    Steps ``0..burn_in-1`` are spent reaching :meth:`initial`; ``advance``
    with step ``s`` consumes innovation ``burn_in + s``, the same draw
    :func:`figchaos.process.simulate` uses for output sample ``s``.
    """

    def __init__(self, params: FigarchParams, config: SimConfig, n_steps: int):
        lam, self.omega_star = arch_infinity_weights(params, config.truncation)
        self._rev = np.ascontiguousarray(lam[::-1])
        self.burn_in = config.burn_in
        self._z = innovations(config, config.burn_in + n_steps)

    def _next(self, hist, z):
        s2 = self.omega_star + float(self._rev @ hist)
        sigma = math.sqrt(s2)
        u = sigma * z
        new = np.empty_like(hist)
        new[:-1] = hist[1:]
        new[-1] = u * u
        return (new, u, sigma)

    def initial(self):
        hist = np.full(len(self._rev), self.omega_star)
        state = (hist, math.sqrt(self.omega_star), math.sqrt(self.omega_star))
        for t in range(self.burn_in):
            state = self._next(state[0], self._z[t])
        return state

    def advance(self, state, step):
        return self._next(state[0], self._z[self.burn_in + step])

    def coords(self, state):
        return state[1], state[2]

    def shift(self, state, dx, dy):
        hist, u, sigma = state
        u2 = u + dx
        new = hist.copy()
        new[-1] = u2 * u2
        return (new, u2, sigma + dy)


def plane_map_lle(system: PlaneMap, d0: float = 1e-8, n_iter: int = 5000) -> LyapunovEstimate:
    """Average one-step log growth of a companion offset renormalised to ``d0``.

    The companion starts ``d0`` away along (1, 1)/sqrt(2).  After each step the
    separation ratio is logged and the companion is pulled back to distance
    ``d0`` along the current separation direction; it then continues from that
    point, carrying its own history.  A separation that collapses to exactly
    zero is floored at the smallest normal float and keeps the last direction.
    """
    if not d0 > 0:
        raise ParameterError("d0 must be positive")
    if n_iter < 1:
        raise ParameterError("n_iter must be >= 1")
    fid = system.initial()
    direction = np.array([1.0, 1.0]) / math.sqrt(2.0)
    comp = system.shift(fid, d0 * direction[0], d0 * direction[1])
    tiny = np.finfo(float).tiny
    total, collapsed = 0.0, 0
    for step in range(n_iter):
        fid = system.advance(fid, step)
        comp = system.advance(comp, step)
        fx, fy = system.coords(fid)
        cx, cy = system.coords(comp)
        dx, dy = cx - fx, cy - fy
        dist = math.hypot(dx, dy)
        if not math.isfinite(dist):
            raise DivergenceError(f"separation overflowed at step {step}")
        if dist > 0:
            direction = np.array([dx, dy]) / dist
        else:
            collapsed += 1
        total += math.log(max(dist, tiny) / d0)
        # put the companion back at distance d0 along the separation direction
        tx, ty = fx + d0 * direction[0], fy + d0 * direction[1]
        comp = system.shift(comp, tx - cx, ty - cy)
    return LyapunovEstimate(
        total / n_iter,
        "direct-map",
        {"iterations": n_iter, "d0": d0, "collapsed_steps": collapsed},
    )


def direct_map_lle(
    params: FigarchParams,
    config: SimConfig,
    d0: float = 1e-8,
    n_iter: int = 5000,
) -> LyapunovEstimate:
    """Local-exponent average of the FIGARCH map in the (u, sigma) plane.

    Fiducial and companion share the innovation sequence of ``config.seed``,
    so the estimate measures how the variance recursion itself contracts
    or stretches perturbations.
    """
    est = plane_map_lle(FigarchPlaneMap(params, config, n_iter), d0, n_iter)
    est.diagnostics.update({"seed": config.seed, "burn_in": config.burn_in})
    return est
