import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from sketchuq import DesignData, ModelSpec

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

FIXTURE_X = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
FIXTURE_Y = np.array([1.0, 2.0, 3.0])
FIXTURE_BETA0 = np.array([1.0, 2.0])


@pytest.fixture
def fixture_data():
    return DesignData(FIXTURE_X, FIXTURE_Y)


@pytest.fixture
def fixture_spec():
    return ModelSpec(FIXTURE_BETA0, 1.0)


def random_design(rng, n, p):
    """Full-rank Gaussian design with a random response."""
    while True:
        X = rng.standard_normal((n, p))
        if np.linalg.matrix_rank(X) == p:
            return DesignData(X, rng.standard_normal(n))


@pytest.fixture
def write_csv(tmp_path):
    def _write(name, rows):
        path = tmp_path / name
        arr = np.atleast_2d(np.asarray(rows, dtype=float))
        if arr.shape[0] == 1 and np.ndim(rows) == 1:
            arr = arr.T
        path.write_text("\n".join(",".join(repr(float(v)) for v in row) for row in arr) + "\n")
        return str(path)

    return _write


# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
