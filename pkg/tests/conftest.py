import os

import pytest
from hypothesis import HealthCheck, settings

from solenoidal_hup.config import DEFAULT_SEED, stream

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng(request):
    """Generator keyed by the test's node id, so tests do not share draws."""
    return stream(DEFAULT_SEED, request.node.nodeid)


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_log():
    """Collects one status line per acceptance criterion for the run summary."""
    return _ACCEPTANCE_LINES.append


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
