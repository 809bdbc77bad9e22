import numpy as np
import pytest

from lightlike.ode import parse_profile
from lightlike.surface import parametrize_nonconical

PROFILES = ("const:0", "const:1", "const:-1", "id", "sin")

# grid used for invariant checks: boundary-free window of the default domain
US = np.linspace(-0.5, 0.5, 11)
VS = np.linspace(-1.0, 1.0, 21)


@pytest.fixture(scope="session")
def surfaces():
    """Generated non-conical surfaces keyed by profile spec (built once)."""
    return {spec: parametrize_nonconical(parse_profile(spec)) for spec in PROFILES}


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


# ---------------------------------------------------------------- acceptance reporting

ACCEPTANCE_LINES: list[str] = []
LAST = "test_criterion_10_suite_wall_clock"


def pytest_sessionstart(session):
    import time

    session.config.lightlike_t0 = time.perf_counter()


def pytest_collection_modifyitems(session, config, items):
    # the wall-clock criterion must run after everything else
    items.sort(key=lambda item: item.name == LAST)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
