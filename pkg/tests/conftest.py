import numpy as np
import pytest

from rnds_maxwell.geometry import BlackHoleParams, GeometryMap

REF = (1.0, 0.5, 0.01)

ACCEPTANCE_LINES = {}


@pytest.fixture(scope="session")
def ref_params():
    return BlackHoleParams(*REF)


@pytest.fixture(scope="session")
def ref_geom(ref_params):
    return GeometryMap(ref_params)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
