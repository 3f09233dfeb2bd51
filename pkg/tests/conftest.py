from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from hermgeom.gf import field_build, hermitian_field
from hermgeom.hermitian import standard_form, variety_points

settings.register_profile("repo", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@pytest.fixture(scope="session")
def F4():
    return field_build(2, 2)


@pytest.fixture(scope="session")
def F9():
    return hermitian_field(3)


@pytest.fixture(scope="session")
def form6(F9):
    return standard_form(6, F9)


@pytest.fixture(scope="session")
def H6(form6):
    return variety_points(form6)


@pytest.fixture(scope="session")
def form4(F9):
    return standard_form(4, F9)


@pytest.fixture(scope="session")
def H4(form4):
    return variety_points(form4)


def pytest_configure(config):
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, config):
    if config.acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in config.acceptance_lines:
            terminalreporter.write_line(line)
