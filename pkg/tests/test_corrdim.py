import numpy as np
import pytest

from figchaos.corrdim import (
    CorrelationCurve,
    correlation_dimension,
    correlation_sum,
    default_radii,
    dimension_scan,
    plateau_converged,
)
from figchaos.embedding import EmbeddingConfig, embed
from figchaos.errors import ParameterError, ScalingRegionError
from figchaos.neighbors import NeighborIndex, brute_count_pairs


def test_sum_matches_brute(rng):
    pts = rng.normal(size=(300, 3))
    r = np.geomspace(0.05, 3, 12)
    for w in (0, 5):
        curve = correlation_sum(pts, r, w)
        ref = brute_count_pairs(pts, r, w)
        np.testing.assert_array_equal(curve.counts, ref)
        m = 300 - w - 1
        assert curve.pair_norm == m * (m + 1) // 2
        np.testing.assert_array_equal(curve.sums, ref / curve.pair_norm)


def test_sum_reaches_one(rng):
    pts = rng.random((100, 2))
    curve = correlation_sum(NeighborIndex(pts), [0.01, 10.0], theiler=4)
    assert curve.sums[-1] == 1.0


def test_uniform_square_dimension_two(rng):
    curve = correlation_sum(rng.random((4000, 2)), np.geomspace(0.01, 0.1, 16))
    assert correlation_dimension(curve).value == pytest.approx(2.0, abs=0.1)


def test_line_dimension_one(rng):
    t = rng.random(3000)
    pts = np.column_stack([t, 2 * t, -t])
    curve = correlation_sum(pts, np.geomspace(0.005, 0.2, 16))
    assert correlation_dimension(curve).value == pytest.approx(1.0, abs=0.05)


def test_default_radii_deterministic(figarch_series):
    v = embed(figarch_series, EmbeddingConfig(2, 3))
    a = default_radii(v)
    b = default_radii(v)
    np.testing.assert_array_equal(a, b)
    assert len(a) == 32 and np.all(np.diff(a) > 0)
    np.testing.assert_allclose(np.diff(np.log(a)), np.log(a[1] / a[0]))


def test_bad_radii(rng):
    pts = rng.random((20, 2))
    with pytest.raises(ParameterError):
        correlation_sum(pts, [0.2, 0.1])
    with pytest.raises(ParameterError):
        correlation_sum(pts, [])
    with pytest.raises(ParameterError):
        correlation_sum(pts, [0.1], theiler=19)
    with pytest.raises(ScalingRegionError):
        default_radii(np.zeros((10, 2)))


def test_too_few_positive_sums():
    curve = CorrelationCurve(np.array([1.0, 2.0, 3.0]), np.array([0.0, 0.0, 0.5]),
                             np.array([0, 0, 1]), 2, 0)
    with pytest.raises(ScalingRegionError):
        correlation_dimension(curve)


def test_plateau_converged():
    assert plateau_converged([1.0, 1.8, 1.2, 1.21, 1.19, 1.2])
    assert not plateau_converged([1.0, 2.0, 3.0, 4.0, 5.0])
    assert not plateau_converged([1.2, 1.2, 1.2])  # too short for three differences
    assert not plateau_converged([1.2, 1.2, np.nan, 1.2, 1.2])
    assert plateau_converged([1.0, 1.1, 1.2, 1.3], tol=0.2)
    assert not plateau_converged([1.0, 1.1, 1.2, 1.3], tol=0.05)


def test_scan_records_errors(rng):
    x = rng.normal(size=40)
    scan = dimension_scan(x, [5], [1, 2, 9], n_radii=8)
    assert (5, 9) in scan.errors
    assert scan.estimates[0][2] is None
    assert np.isnan(scan.values()[0, 2])
    assert scan.converged == [False]


def test_scan_on_noise_grows_with_dimension(rng):
    scan = dimension_scan(rng.normal(size=2000), [1], [1, 2, 3, 4])
    v = scan.values()[0]
    assert np.all(np.diff(v) > 0.5)
    assert scan.converged == [False]
    assert all(e.converged is False for e in scan.estimates[0])
