import numpy as np
import pytest

from finsler_lab import AveragedMetricField, LeftInvariantSU2Metric, QuarticMetric, SphericalQuadratureRule

# points well inside the default SU(2) chart box
SU2_POINTS = np.array(
    [
        [0.0, 0.0, 0.0],
        [0.1, 0.0, 0.0],
        [0.0, -0.1, 0.05],
        [0.05, 0.05, -0.1],
        [-0.1, 0.08, 0.0],
        [0.12, -0.05, 0.07],
        [-0.06, -0.1, -0.04],
        [0.0, 0.12, 0.1],
        [-0.12, 0.0, 0.12],
    ]
)


def random_spd(rng, scale=1.0):
    a = rng.normal(size=(3, 3))
    return scale * (a @ a.T + 3.0 * np.eye(3))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def su2_metric():
    return LeftInvariantSU2Metric(QuarticMetric(0.1))


@pytest.fixture(scope="session")
def su2_gamma(su2_metric):
    """Averaged metric at the default rule, shared so its cache is reused."""
    return AveragedMetricField(su2_metric, SphericalQuadratureRule())


# acceptance results, printed once at the end of the session
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
