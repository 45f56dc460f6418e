import numpy as np
import pytest

from rtpose import scene_sim


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def spl():
    return scene_sim.builtin_fields()["spl_center"]


_CRITERIA = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Report one acceptance criterion: prints a PASS/FAIL line, then asserts."""

    def report(number: int, title: str, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {title} [{detail}]"
        print(line)
        request.config.stash.setdefault(_CRITERIA, []).append((number, line))
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_CRITERIA, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
