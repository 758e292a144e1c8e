import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from figchaos.embedding import EmbeddingConfig, embed
from figchaos.errors import FigchaosError, NoNeighborError, ParameterError
from figchaos.lyapunov import (
    EstimatorCurve,
    FigarchPlaneMap,
    LyapunovEstimate,
    direct_map_lle,
    kantz_curve,
    kantz_curve_adaptive,
    kantz_mle,
    plane_map_lle,
    wolf_mle,
)
from figchaos.maps import henon_exponent_oracle, henon_orbit, logistic_exponent_oracle, logistic_orbit
from figchaos.neighbors import brute_neighbors_within, pair_distances
from figchaos.process import FigarchParams, SimConfig, simulate

HENON_ORACLE = 0.42025876771716575  # henon_exponent_oracle(100000), frozen


def loop_wolf(x, delay, m, lo=0.001, hi=0.1, theta_deg=30.0):
    """Wolf's procedure written out with O(N) scans per step."""
    pts = embed(x, EmbeddingConfig(delay, m)).points
    t_ev = w = delay
    size = np.std(x, ddof=1)
    e_lo, e_hi = lo * size, hi * size
    usable = len(pts) - t_ev
    cos_max = math.cos(math.radians(theta_deg))

    def dist(a, b):
        return float(pair_distances(pts, a, b))

    def pick(i, ref=None):
        best = None
        for j in range(usable):
            if abs(i - j) <= w:
                continue
            dd = dist(i, j)
            if not e_lo <= dd <= e_hi:
                continue
            if ref is not None and np.linalg.norm(ref) > 0:
                if (pts[j] - pts[i]) @ ref / (dd * np.linalg.norm(ref)) < cos_max:
                    continue
            if best is None or dd < best[1]:
                best = (j, dd)
        return None if best is None else best[0]

    def nearest(i):
        cands = [(dist(i, j), j) for j in range(usable) if abs(i - j) > w and dist(i, j) > 0]
        return min(cands)[1]

    start = next(((i, pick(i)) for i in range(usable) if pick(i) is not None), None)
    i, j = start if start is not None else (0, nearest(0))
    total, steps = 0.0, 0
    while True:
        l0 = dist(i, j)
        i2, j2 = i + t_ev, j + t_ev
        sep = pts[j2] - pts[i2]
        le = float(np.sqrt(sep @ sep))
        if le > 0 and l0 > 0:
            total += math.log(le / l0)
            steps += 1
        if i2 >= usable:
            break
        nxt = pick(i2, sep)
        i, j = i2, (nearest(i2) if nxt is None else nxt)
    return total / (steps * t_ev), steps


def loop_kantz(x, delay, m, eps, t_max, w, min_nb):
    pts = embed(x, EmbeddingConfig(delay, m)).points
    last = pts[:, -1]
    n_ref = len(pts) - t_max
    s = np.zeros(t_max + 1)
    used = 0
    for i in range(n_ref):
        nb = brute_neighbors_within(pts[:n_ref], i, eps, w)
        if len(nb) < min_nb:
            continue
        used += 1
        for t in range(t_max + 1):
            s[t] += math.log(np.mean(np.abs(last[nb + t] - last[i + t])))
    return s / used, used


class TestWolf:
    def test_matches_loop_oracle(self):
        x = henon_orbit(700)
        est = wolf_mle(embed(x, EmbeddingConfig(1, 2)))
        value, steps = loop_wolf(x, 1, 2)
        assert est.value == pytest.approx(value, rel=1e-12)
        assert est.diagnostics["replacements"] == steps

    def test_matches_loop_oracle_delay2(self, rng):
        x = np.sin(0.3 * np.arange(500)) + 0.1 * rng.normal(size=500)
        est = wolf_mle(embed(x, EmbeddingConfig(2, 3)))
        value, steps = loop_wolf(x, 2, 3)
        assert est.value == pytest.approx(value, rel=1e-12)
        assert est.diagnostics["replacements"] == steps

    def test_logistic(self):
        x = logistic_orbit(5000)
        est = wolf_mle(embed(x, EmbeddingConfig(1, 1)))
        assert est.method == "wolf"
        assert est.value == pytest.approx(math.log(2), abs=0.05)
        assert not est.diagnostics["too_few_replacements"]

    def test_affine_invariance(self):
        x = henon_orbit(1500)
        a = wolf_mle(embed(x, EmbeddingConfig(1, 2))).value
        b = wolf_mle(embed(3.5 * x - 7.0, EmbeddingConfig(1, 2))).value
        assert a == pytest.approx(b, rel=1e-9)

    def test_start_fallback(self):
        # two well separated clusters: nothing within 10% of the attractor size
        x = np.array([0.0, 1.0] * 60) + 1e-3 * np.arange(120)
        est = wolf_mle(embed(x, EmbeddingConfig(1, 2)), scale_bounds=(0.0, 1e-6))
        assert est.diagnostics["start_fallback"]
        assert est.diagnostics["fallbacks"] > 0

    def test_errors(self):
        with pytest.raises(ParameterError):
            wolf_mle(embed(np.arange(50.0), EmbeddingConfig(1, 2)), scale_bounds=(0.1, 0.01))
        with pytest.raises(FigchaosError):
            wolf_mle(embed(np.arange(5.0), EmbeddingConfig(1, 2)))


class TestKantz:
    def test_matches_loop_oracle(self, rng):
        x = henon_orbit(800)
        v = embed(x, EmbeddingConfig(1, 2))
        curve = kantz_curve(v, eps=0.05, t_max=6, exclusion=1, min_neighbors=3)
        ref, used = loop_kantz(x, 1, 2, 0.05, 6, 1, 3)
        np.testing.assert_allclose(curve.y, ref, rtol=1e-12)
        assert curve.meta["n_references"] == used

    def test_henon_slope(self):
        v = embed(henon_orbit(20000), EmbeddingConfig(1, 2))
        est = kantz_mle(kantz_curve(v))
        assert est.value == pytest.approx(HENON_ORACLE, abs=0.05)

    def test_noise_plateau(self, rng):
        v = embed(rng.normal(size=4000), EmbeddingConfig(1, 2))
        curve = kantz_curve(v, eps_fraction=0.2, t_max=10)
        assert curve.y[1] - curve.y[0] > 1.0
        est = kantz_mle(curve, fit_range=(2, 10))
        assert abs(est.value) < 0.02

    def test_fit_trivia(self):
        t = np.arange(16.0)
        assert kantz_mle(EstimatorCurve(t, 0.3 * t)).value == pytest.approx(0.3, abs=1e-12)
        assert kantz_mle(EstimatorCurve(t, np.full(16, -2.0)), fit_range=(1, 6)).value == 0.0
        est = kantz_mle(EstimatorCurve(t, np.sin(t)))
        assert not est.diagnostics["window_found"]
        assert (est.diagnostics["fit_lo"], est.diagnostics["fit_hi"]) == (1.0, 6.0)

    def test_no_references(self, rng):
        v = embed(rng.normal(size=300), EmbeddingConfig(1, 5))
        with pytest.raises(NoNeighborError):
            kantz_curve(v, eps=1e-6)

    def test_adaptive_grows_eps(self, rng):
        v = embed(rng.normal(size=1500), EmbeddingConfig(1, 4))
        curve = kantz_curve_adaptive(v, eps_fraction=0.01, min_references=100)
        assert curve.meta["eps_fraction"] > 0.01
        assert curve.meta["n_references"] >= 100
        direct = kantz_curve(v, eps=curve.meta["eps"])
        np.testing.assert_array_equal(direct.y, curve.y)


class HalvingMap:
    """Linear map that halves every separation."""

    def initial(self):
        return (1.0, 1.0)

    def advance(self, state, step):
        return (0.5 * state[0] + 0.1, 0.5 * state[1] - 0.2)

    def coords(self, state):
        return state

    def shift(self, state, dx, dy):
        return (state[0] + dx, state[1] + dy)


class RotateStretch:
    """Rotation by 0.7 rad scaled by ``a``; the fiducial sits at the fixed point."""

    def __init__(self, a):
        self.a = a

    def initial(self):
        return np.zeros(2)

    def advance(self, state, step):
        c, s = math.cos(0.7), math.sin(0.7)
        return self.a * np.array([c * state[0] - s * state[1], s * state[0] + c * state[1]])

    def coords(self, state):
        return float(state[0]), float(state[1])

    def shift(self, state, dx, dy):
        return state + np.array([dx, dy])


class TestDirectMap:
    def test_halving(self):
        est = plane_map_lle(HalvingMap(), d0=1e-6, n_iter=200)
        assert est.value == pytest.approx(math.log(0.5), abs=1e-9)

    @given(st.floats(0.2, 3.0))
    @settings(max_examples=20)
    def test_uniform_scaling(self, a):
        est = plane_map_lle(RotateStretch(a), d0=1e-7, n_iter=50)
        assert est.value == pytest.approx(math.log(a), abs=1e-6)

    def test_memoryless_strongly_negative(self):
        est = direct_map_lle(FigarchParams(0.0, 1.0), SimConfig(seed=1), n_iter=500)
        assert est.value < -5

    def test_fiducial_follows_simulation(self):
        params = FigarchParams.figarch11(0.6)
        cfg = SimConfig(n_points=300, burn_in=100, truncation=200, seed=9)
        ts = simulate(params, cfg)
        system = FigarchPlaneMap(params, cfg, 300)
        state = system.initial()
        for s in range(300):
            state = system.advance(state, s)
            u, sigma = system.coords(state)
            assert u == pytest.approx(ts.values[s], rel=1e-12, abs=1e-300)
            assert sigma == pytest.approx(ts.volatility[s], rel=1e-12)

    def test_deterministic_and_negative(self):
        cfg = SimConfig(seed=4)
        a = direct_map_lle(FigarchParams.figarch11(0.5), cfg, n_iter=800)
        b = direct_map_lle(FigarchParams.figarch11(0.5), cfg, n_iter=800)
        assert a == b
        assert a.value < 0
        assert a.diagnostics["iterations"] == 800 and a.diagnostics["d0"] == 1e-8

    def test_errors(self):
        with pytest.raises(ParameterError):
            plane_map_lle(HalvingMap(), d0=0.0)
        with pytest.raises(ParameterError):
            plane_map_lle(HalvingMap(), n_iter=0)


def test_estimate_validation():
    with pytest.raises(ParameterError):
        LyapunovEstimate(0.1, "rosenstein")
    with pytest.raises(FigchaosError):
        LyapunovEstimate(float("nan"), "wolf")
    assert LyapunovEstimate(0.5, "kantz", {"a": 1}).to_dict() == {
        "value": 0.5, "method": "kantz", "diagnostics": {"a": 1}}


def test_oracles():
    assert logistic_exponent_oracle(logistic_orbit(20000)) == pytest.approx(math.log(2), abs=0.01)
    assert henon_exponent_oracle(20000) == pytest.approx(HENON_ORACLE, abs=0.01)
