import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from figchaos.process import FigarchParams, SimConfig, simulate

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def figarch_series():
    """FIGARCH(1, 0.5, 1) path with omega = phi = beta = 0.01, 4096 samples."""
    return simulate(FigarchParams.figarch11(0.5), SimConfig(n_points=4096, seed=11))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
