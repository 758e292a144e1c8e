"""Deterministic reference systems and their independent exponent oracles.

The oracles use the known map equations (derivatives and Jacobians), never
the reconstructed time series, so they give an independent check on the
time-series estimators.
"""

import numpy as np

__all__ = [
    "logistic_orbit",
    "henon_orbit",
    "logistic_exponent_oracle",
    "henon_exponent_oracle",
]


def logistic_orbit(n, x0=0.3, r=4.0, burn_in=1000):
    x = x0
    for _ in range(burn_in):
        x = r * x * (1.0 - x)
    out = np.empty(n)
    for i in range(n):
        out[i] = x
        x = r * x * (1.0 - x)
    return out


def henon_orbit(n, a=1.4, b=0.3, x0=0.1, y0=0.1, burn_in=1000):
    """x-coordinate of the Henon map ``x' = 1 - a x^2 + y, y' = b x``."""
    x, y = x0, y0
    for _ in range(burn_in):
        x, y = 1.0 - a * x * x + y, b * x
    out = np.empty(n)
    for i in range(n):
        out[i] = x
        x, y = 1.0 - a * x * x + y, b * x
    return out


def logistic_exponent_oracle(orbit, r=4.0):
    """Time average of ln|f'(x)| = ln|r (1 - 2x)| along an orbit."""
    x = np.asarray(orbit, dtype=float)
    deriv = np.abs(r * (1.0 - 2.0 * x))
    return float(np.mean(np.log(deriv[deriv > 0])))


def henon_exponent_oracle(n=100_000, a=1.4, b=0.3, x0=0.1, y0=0.1, burn_in=1000):
    """Largest exponent of the Henon map from a renormalised tangent-vector product."""
    x, y = x0, y0
    for _ in range(burn_in):
        x, y = 1.0 - a * x * x + y, b * x
    v = np.array([1.0, 0.0])
    total = 0.0
    for _ in range(n):
        jac = np.array([[-2.0 * a * x, 1.0], [b, 0.0]])
        v = jac @ v
        norm = np.hypot(v[0], v[1])
        total += np.log(norm)
        v /= norm
        x, y = 1.0 - a * x * x + y, b * x
    return total / n
