import numpy as np
import pytest

from glocal.learner import LearnerConfig
from glocal.tasks import build_default_bank


@pytest.fixture
def bank():
    return build_default_bank()


@pytest.fixture
def bank_tau2():
    return build_default_bank(tau=2.0)


@pytest.fixture
def lcfg():
    return LearnerConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_VERDICTS = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Record one acceptance line and fail the test when ``ok`` is false."""
    def record(name: str, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
        request.config.stash.setdefault(_VERDICTS, []).append(line)
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
