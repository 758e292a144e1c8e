import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from figchaos.embedding import EmbeddingConfig, embed
from figchaos.errors import ParameterError, SeriesTooShortError
from figchaos.process import TimeSeries


def test_small_example():
    v = embed(np.arange(10.0), EmbeddingConfig(delay=2, dimension=3))
    assert v.points.shape == (6, 3)
    np.testing.assert_array_equal(v.points[0], [0, 2, 4])
    np.testing.assert_array_equal(v.points[-1], [5, 7, 9])
    assert (v.delay, v.dimension, v.count, v.source_length) == (2, 3, 6, 10)


def test_dimension_one_is_the_series():
    x = np.random.default_rng(0).normal(size=50)
    v = embed(x, EmbeddingConfig(3, 1))
    np.testing.assert_array_equal(v.points[:, 0], x)


def test_accepts_timeseries():
    ts = TimeSeries(np.arange(5.0))
    assert embed(ts, EmbeddingConfig(1, 2)).count == 4


def test_too_short_names_requirement():
    with pytest.raises(SeriesTooShortError, match="need at least 9"):
        embed(np.arange(8.0), EmbeddingConfig(4, 3))


def test_exact_minimum_length():
    v = embed(np.arange(9.0), EmbeddingConfig(4, 3))
    assert v.count == 1


@pytest.mark.parametrize("delay,dim", [(0, 2), (1, 0), (-1, 2), (1.5, 2)])
def test_invalid_config(delay, dim):
    with pytest.raises(ParameterError):
        EmbeddingConfig(delay, dim)


def test_points_read_only():
    v = embed(np.arange(10.0), EmbeddingConfig(1, 2))
    with pytest.raises(ValueError):
        v.points[0, 0] = 1.0


def test_attractor_size_is_sample_std():
    x = np.random.default_rng(1).normal(size=200)
    v = embed(x, EmbeddingConfig(2, 3))
    assert v.attractor_size() == pytest.approx(np.std(x, ddof=1))


@given(
    st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=80),
    st.integers(1, 6),
    st.integers(1, 6),
)
def test_definition(values, delay, dim):
    x = np.array(values)
    cfg = EmbeddingConfig(delay, dim)
    if len(x) < cfg.min_length():
        with pytest.raises(SeriesTooShortError):
            embed(x, cfg)
        return
    v = embed(x, cfg)
    assert v.count == len(x) - (dim - 1) * delay
    for i in range(v.count):
        for j in range(dim):
            assert v.points[i, j] == x[i + j * delay]
