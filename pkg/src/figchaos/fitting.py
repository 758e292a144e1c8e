"""Least-squares line fits and scaling-window selection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np

from .errors import DegenerateFitError, ParameterError

__all__ = ["LineFit", "FitPolicy", "fit_line", "stable_window", "policy_fit"]


class LineFit(NamedTuple):
    slope: float
    intercept: float
    r_squared: float
    lo: int  # first index used (inclusive)
    hi: int  # last index used (inclusive)


@dataclass(frozen=True)
class FitPolicy:
    """How a fit range is chosen on a curve.

    ``mode="stable"`` picks the widest contiguous window whose local slopes
    stay within ``rel_tol`` of the window's median slope (at least
    ``min_points`` points).  If no window qualifies, ``fallback`` (an
    inclusive abscissa range) is used when given, otherwise every usable
    point.  ``mode="fixed"`` always fits over ``fixed``.
    """

    mode: str = "stable"
    rel_tol: float = 0.10
    min_points: int = 5
    fixed: Optional[Tuple[float, float]] = None
    fallback: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if self.mode not in ("stable", "fixed", "all"):
            raise ParameterError(f"unknown fit mode {self.mode!r}")
        if self.mode == "fixed" and self.fixed is None:
            raise ParameterError("fixed fit mode needs a range")
        if self.min_points < 2 or self.rel_tol < 0:
            raise ParameterError("min_points must be >= 2 and rel_tol >= 0")


def fit_line(x, y, lo: int = 0, hi: Optional[int] = None) -> LineFit:
    """Ordinary least squares of ``y`` on ``x`` over indices ``lo..hi``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    hi = len(x) - 1 if hi is None else hi
    xs, ys = x[lo : hi + 1], y[lo : hi + 1]
    if len(xs) < 2:
        raise DegenerateFitError("need at least two points for a line fit")
    xc = xs - xs.mean()
    sxx = float(xc @ xc)
    if sxx == 0:
        raise DegenerateFitError("abscissa has zero spread over the fit range")
    yc = ys - ys.mean()
    slope = float(xc @ yc) / sxx
    intercept = float(ys.mean() - slope * xs.mean())
    resid = yc - slope * xc
    ss_tot = float(yc @ yc)
    ss_res = float(resid @ resid)
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return LineFit(slope, intercept, r2, lo, hi)


def stable_window(x, y, rel_tol: float = 0.10, min_points: int = 5) -> Optional[Tuple[int, int]]:
    """Widest index window ``(lo, hi)`` with consistent local slopes, or None.

    Ties between equally wide windows go to the one starting first.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    if n < min_points:
        return None
    local = np.diff(y) / np.diff(x)
    need = min_points - 1  # slopes in a window of min_points points
    for width in range(len(local), need - 1, -1):
        for a in range(0, len(local) - width + 1):
            seg = local[a : a + width]
            med = np.median(seg)
            if np.all(np.abs(seg - med) <= rel_tol * abs(med)):
                return a, a + width
    return None


def policy_fit(x, y, policy: FitPolicy) -> Tuple[LineFit, bool]:
    """Fit ``y`` on ``x`` under ``policy``; the flag says whether the policy's
    own window was found (False means a fallback range was used)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)

    def by_range(rng):
        sel = np.flatnonzero((x >= rng[0]) & (x <= rng[1]))
        if len(sel) < 3:
            raise DegenerateFitError(f"fewer than 3 points in fit range {tuple(rng)}")
        return fit_line(x, y, int(sel[0]), int(sel[-1]))

    if policy.mode == "fixed":
        return by_range(policy.fixed), True
    if policy.mode == "all":
        if len(x) < 3:
            raise DegenerateFitError("fewer than 3 points to fit")
        return fit_line(x, y), True
    win = stable_window(x, y, policy.rel_tol, policy.min_points)
    if win is not None:
        return fit_line(x, y, *win), True
    if policy.fallback is not None:
        return by_range(policy.fallback), False
    if len(x) < 3:
        raise DegenerateFitError("fewer than 3 points to fit")
    return fit_line(x, y), False
