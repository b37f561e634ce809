import pytest
from hypothesis import HealthCheck, settings

from quadsmc.model import QuadParams, derive_constants

settings.register_profile("default", deadline=None, max_examples=100, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def params():
    return QuadParams()


@pytest.fixture(scope="session")
def consts(params):
    return derive_constants(params)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
