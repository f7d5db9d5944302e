import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile("default")

EX1 = (0.5, math.sqrt(3) / 2, 2.0)
EX2 = (0.5, math.sqrt(3) / 2, 20.0)


@pytest.fixture
def ex1():
    return EX1


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def pytest_terminal_summary(terminalreporter):
    lines = [
        value
        for rep in terminalreporter.stats.get("passed", []) + terminalreporter.stats.get("failed", [])
        if rep.when == "call"
        for key, value in rep.user_properties
        if key == "acceptance"
    ]
    if lines:
        terminalreporter.section("acceptance criteria")
        for text in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(text)
