from __future__ import annotations

import pytest

ACCEPTANCE_LINES = pytest.StashKey[list]()

# expressions whose universality is known; used across several test modules
POSITIVE_FIXTURES = ["x", "x^2", "x^2+1", "exp(2ix)", "5", "-x^2+2ix+1", "conj(x^3)*x^3"]
SHAPE_NEGATIVE_FIXTURES = ["x^2-1", "cos(x)"]
QUADRATIC_REJECT = "-x^2+2ix+1.99"

# shorter schedule for tests that run many verdicts
SHORT_SCHEDULE = ((0.5, 16), (1.0, 32), (2.0, 64), (4.0, 128))


def pytest_configure(config):
    config.stash[ACCEPTANCE_LINES] = []


@pytest.fixture(scope="session")
def acceptance_log(request):
    return request.config.stash[ACCEPTANCE_LINES]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
