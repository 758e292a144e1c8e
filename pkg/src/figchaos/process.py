"""FIGARCH(p, d, q) sample paths through the truncated ARCH(inf) representation.

The conditional variance is written as

    sigma_t^2 = omega* + sum_{k=1}^{K} lambda_k u_{t-k}^2,
    omega*    = omega / (1 - sum_j beta_j),

where ``lambda(L) = 1 - [1 - beta(L)]^{-1} phi(L) (1 - L)^d`` and
``phi(L) = 1 - sum_k phi_k L^k``.  Innovations are standard normal draws from
numpy's ``PCG64`` bit generator (ziggurat normal sampler), so a seed fixes the
path on every platform numpy supports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import (
    DivergenceError,
    NonNegativityError,
    ParameterError,
    UnitRootError,
)

__all__ = [
    "FigarchParams",
    "SimConfig",
    "TimeSeries",
    "ArchWeights",
    "frac_diff_coeffs",
    "arch_infinity_weights",
    "innovations",
    "simulate",
    "TOL_NONNEG",
    "VARIANCE_CEILING",
]

TOL_NONNEG = 1e-12
VARIANCE_CEILING = 1e12
_UNIT_ROOT_TOL = 1e-12


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FigarchParams:
    """Coefficients of a FIGARCH(p, d, q) model.

    ``phi`` holds phi_1..phi_p of the polynomial ``1 - sum phi_k L^k`` and
    ``beta`` holds beta_1..beta_q of ``1 - sum beta_j L^j``.
    """

    d: float
    omega: float
    phi: tuple = ()
    beta: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "phi", tuple(float(v) for v in self.phi))
        object.__setattr__(self, "beta", tuple(float(v) for v in self.beta))
        object.__setattr__(self, "d", float(self.d))
        object.__setattr__(self, "omega", float(self.omega))
        coeffs = (self.d, self.omega) + self.phi + self.beta
        if not all(math.isfinite(c) for c in coeffs):
            raise ParameterError("FIGARCH coefficients must be finite")
        if not self.omega > 0:
            raise ParameterError(f"omega must be positive, got {self.omega}")
        if not 0.0 <= self.d <= 1.0:
            raise ParameterError(f"d must lie in [0, 1], got {self.d}")

    @property
    def p(self) -> int:
        return len(self.phi)

    @property
    def q(self) -> int:
        return len(self.beta)

    @classmethod
    def figarch11(cls, d: float, coeff: float = 0.01) -> "FigarchParams":
        """FIGARCH(1, d, 1) with omega = phi_1 = beta_1 = ``coeff``."""
        return cls(d=d, omega=coeff, phi=(coeff,), beta=(coeff,))

    def to_dict(self) -> dict:
        return {"d": self.d, "omega": self.omega, "phi": list(self.phi), "beta": list(self.beta)}


@dataclass(frozen=True)
class SimConfig:
    n_points: int = 4096
    burn_in: int = 2000
    truncation: int = 1000
    seed: int = 0

    def __post_init__(self):
        if int(self.n_points) < 1:
            raise ParameterError("n_points must be >= 1")
        if int(self.burn_in) < 0:
            raise ParameterError("burn_in must be >= 0")
        if int(self.truncation) < 1:
            raise ParameterError("truncation must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ParameterError("seed must fit in an unsigned 64-bit integer")
        for name in ("n_points", "burn_in", "truncation", "seed"):
            object.__setattr__(self, name, int(getattr(self, name)))


@dataclass(frozen=True)
class TimeSeries:
    """A uniformly sampled scalar path, optionally paired with its volatility."""

    values: np.ndarray
    volatility: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        values = _frozen(self.values)
        if values.ndim != 1:
            raise ParameterError("series values must be one-dimensional")
        if not np.all(np.isfinite(values)):
            raise ParameterError("series values must be finite")
        object.__setattr__(self, "values", values)
        if self.volatility is not None:
            vol = _frozen(self.volatility)
            if vol.shape != values.shape:
                raise ParameterError("volatility length must match values length")
            if not (np.all(np.isfinite(vol)) and np.all(vol > 0)):
                raise ParameterError("volatility entries must be finite and positive")
            object.__setattr__(self, "volatility", vol)

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        if not np.array_equal(self.values, other.values):
            return False
        if (self.volatility is None) != (other.volatility is None):
            return False
        return self.volatility is None or np.array_equal(self.volatility, other.volatility)

    __hash__ = None


class ArchWeights(NamedTuple):
    weights: np.ndarray  # lambda_1 .. lambda_K
    omega_star: float


def frac_diff_coeffs(d: float, n: int) -> np.ndarray:
    """Coefficients pi_0..pi_n of the expansion of ``(1 - L)^d``.

    Uses ``pi_k = pi_{k-1} (k - 1 - d) / k``, which equals ``(-1)^k C(d, k)``.
    """
    if not 0.0 <= d <= 1.0:
        raise ParameterError(f"d must lie in [0, 1], got {d}")
    if n < 0:
        raise ParameterError(f"n must be non-negative, got {n}")
    out = np.empty(n + 1)
    out[0] = 1.0
    for k in range(1, n + 1):
        out[k] = out[k - 1] * (k - 1 - d) / k
    return out


def arch_infinity_weights(
    params: FigarchParams, truncation: int, tol: float = TOL_NONNEG
) -> ArchWeights:
    """Truncated ARCH(inf) weights and the variance level of a FIGARCH model.

    The weights solve ``[1 - beta(L)] lambda(L) = [1 - beta(L)] - phi(L)(1 - L)^d``
    by long division, so ``lambda_k = c_k + sum_j beta_j lambda_{k-j}`` with
    ``c`` the coefficients of the right-hand side.

    Raises
    ------
    UnitRootError
        If ``1 - sum(beta)`` is zero.
    NonNegativityError
        On the first lag whose weight is below ``-tol``.
    """
    if truncation < 1:
        raise ParameterError("truncation must be >= 1")
    persistence = 1.0 - sum(params.beta)
    if abs(persistence) < _UNIT_ROOT_TOL:
        raise UnitRootError("1 - sum(beta) = 0: variance level omega* is undefined")
    omega_star = params.omega / persistence
    if omega_star <= 0:
        raise ParameterError(f"variance level omega* = {omega_star:.6g} is not positive")

    pi = frac_diff_coeffs(params.d, truncation)
    ar_poly = np.concatenate(([1.0], -np.asarray(params.phi)))
    ma_poly = np.zeros(truncation + 1)
    ma_poly[0] = 1.0
    ma_poly[1 : params.q + 1] = -np.asarray(params.beta)[:truncation]
    rhs = ma_poly - np.convolve(ar_poly, pi)[: truncation + 1]

    lam = np.zeros(truncation + 1)
    lam[0] = rhs[0]
    for k in range(1, truncation + 1):
        acc = rhs[k]
        for j, b in enumerate(params.beta[:k], start=1):
            acc += b * lam[k - j]
        lam[k] = acc

    weights = lam[1:]
    bad = np.flatnonzero(weights < -tol)
    if bad.size:
        k = int(bad[0])
        raise NonNegativityError(k + 1, float(weights[k]))
    weights = _frozen(weights)
    return ArchWeights(weights, float(omega_star))


def innovations(config: SimConfig, count: int) -> np.ndarray:
    """First ``count`` standard-normal draws of the stream seeded by ``config.seed``."""
    rng = np.random.Generator(np.random.PCG64(config.seed))
    return rng.standard_normal(count)


def simulate(
    params: FigarchParams,
    config: SimConfig,
    ceiling: float = VARIANCE_CEILING,
) -> TimeSeries:
    """Draw one FIGARCH path of ``config.n_points`` samples after burn-in.

    Pre-sample squared innovations are set to omega*, and ``u_t = sigma_t z_t``.
    """
    lam, omega_star = arch_infinity_weights(params, config.truncation)
    k = config.truncation
    total = config.burn_in + config.n_points
    z = innovations(config, total)

    rev = np.ascontiguousarray(lam[::-1])
    u2 = np.full(k + total, omega_star)
    u = np.empty(total)
    sigma = np.empty(total)
    for t in range(total):
        s2 = omega_star + float(rev @ u2[t : t + k])
        if not s2 <= ceiling:
            raise DivergenceError(
                f"conditional variance {s2:.6g} exceeded ceiling {ceiling:.3g} at step {t}"
            )
        sigma[t] = math.sqrt(s2)
        u[t] = sigma[t] * z[t]
        u2[t + k] = u[t] * u[t]

    b = config.burn_in
    return TimeSeries(u[b:], sigma[b:])
