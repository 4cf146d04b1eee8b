import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hypertruss.benchmarks import build_benchmark

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def eight():
    return build_benchmark("eight-member")


@pytest.fixture(scope="session")
def two_bar():
    return build_benchmark("two-bar-oracle")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# criterion number -> PASS/FAIL line, filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
