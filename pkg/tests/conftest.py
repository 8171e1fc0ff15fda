import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("wiretap", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("wiretap")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# --- acceptance report -----------------------------------------------------

_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Callable recording one pass/fail line per acceptance criterion."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, {})

    def record(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines[number] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
