import numpy as np
import pytest

from tvlab.polyring import Ideal
from tvlab.variety import VarietyConfig, sample_variety

from cases import CONE


@pytest.fixture(scope="session")
def cone():
    return Ideal.parse([CONE])


@pytest.fixture(scope="session")
def linear():
    return Ideal.parse(["z1", "z2"], 4)


@pytest.fixture(scope="session")
def cone_samples(cone):
    # s = M = 1, the weight of the variety module
    return sample_variety(VarietyConfig(cone, 1.0, 7), 16000, 1.0)


@pytest.fixture(scope="session")
def linear_samples(linear):
    return sample_variety(VarietyConfig(linear, 1.0, 7), 16000, 2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20260101)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
