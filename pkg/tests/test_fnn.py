import numpy as np
import pytest

from figchaos.errors import ParameterError, SeriesTooShortError
from figchaos.fnn import FnnCurve, fnn_fractions, min_embedding_dim
from figchaos.maps import henon_orbit, logistic_orbit
from figchaos.neighbors import brute_nearest


def loop_fnn(x, delay, m, r_tol, a_tol, w):
    """Direct statement of the two false-neighbor criteria, one point at a time."""
    size = np.std(x, ddof=1)
    n = len(x) - m * delay
    pts = np.array([[x[i + k * delay] for k in range(m)] for i in range(n)])
    false = 0
    for i in range(n):
        j, dist = brute_nearest(pts, i, w)
        extra = abs(x[i + m * delay] - x[j + m * delay])
        ratio_bad = dist > 0 and extra / dist > r_tol
        size_bad = np.sqrt(dist**2 + extra**2) / size > a_tol
        false += ratio_bad or size_bad
    return false / n


def test_matches_loop_oracle(rng):
    x = np.cumsum(rng.normal(size=400)) * 0.1 + rng.normal(size=400)
    curve = fnn_fractions(x, 2, m_max=4, r_tol=3.0, a_tol=1.5)
    for m in range(1, 5):
        assert curve.fractions[m - 1] == pytest.approx(loop_fnn(x, 2, m, 3.0, 1.5, 2), abs=1e-15)


def test_henon_two_dimensions():
    curve = fnn_fractions(henon_orbit(5000), 1, m_max=5)
    assert curve.fractions[0] > 0.3
    assert min_embedding_dim(curve) == (2, True)


def test_logistic_one_dimension():
    curve = fnn_fractions(logistic_orbit(3000), 1, m_max=3)
    assert min_embedding_dim(curve) == (1, True)


def test_noise_never_unfolds(rng):
    curve = fnn_fractions(rng.normal(size=3000), 1, m_max=6)
    assert np.all(curve.fractions > 0.1)
    assert min_embedding_dim(curve) == (6, False)


def test_duplicates_skip_ratio():
    x = np.tile([0.0, 1.0, 2.0, 5.0], 50)
    curve = fnn_fractions(x, 1, m_max=2)
    assert np.all(curve.duplicates > 0)
    assert np.all(np.isfinite(curve.fractions))


def test_metadata(figarch_series):
    curve = fnn_fractions(figarch_series, 3, m_max=3)
    assert curve.exclusion == 3 and curve.delay == 3
    assert curve.attractor_size == pytest.approx(np.std(figarch_series.values, ddof=1))
    np.testing.assert_array_equal(curve.testable, [4096 - 3 * m for m in (1, 2, 3)])


def test_min_embedding_dim_threshold():
    curve = FnnCurve(np.arange(1, 5), np.array([0.5, 0.2, 0.009, 0.0]), 15.0, 2.0)
    assert min_embedding_dim(curve) == (3, True)
    assert min_embedding_dim(curve, drop_threshold=0.0) == (4, True)


def test_errors():
    with pytest.raises(SeriesTooShortError):
        fnn_fractions(np.arange(20.0), 3, m_max=10)
    with pytest.raises(ParameterError):
        fnn_fractions(np.ones(200), 1, m_max=2)
    with pytest.raises(ParameterError):
        fnn_fractions(np.arange(200.0), 1, r_tol=0)
