import math

import pytest

from motorcargo import build_sigmoid_curve, compute_groups, linear_curve, preset


@pytest.fixture(scope="session")
def params():
    return preset()


@pytest.fixture(scope="session")
def groups(params):
    return compute_groups(params)


@pytest.fixture(scope="session")
def sigmoid():
    return build_sigmoid_curve(600.0, -50.0, 500.0)


@pytest.fixture(scope="session")
def linear():
    return linear_curve()


@pytest.fixture(scope="session")
def thermal_force(params):
    return math.sqrt(2 * params.kBT * params.spring_kappa)


ACCEPTANCE = []


@pytest.fixture
def verdict(request):
    """Record one acceptance line and fail the test if it did not pass."""

    def record(number, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}"
        ACCEPTANCE.append((number, line))
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
