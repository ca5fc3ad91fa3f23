import numpy as np
import pytest

from domainwall.chain import ChainSpec

acceptance_lines = pytest.StashKey[dict]()


@pytest.fixture
def spec10():
    return ChainSpec(10)


@pytest.fixture
def gen():
    return np.random.default_rng(20240611)


@pytest.fixture
def criterion(request):
    """Record one pass/fail line for an acceptance criterion."""
    lines = request.config.stash.setdefault(acceptance_lines, {})

    def report(number: int, title: str, ok: bool, detail: str) -> bool:
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        lines[number] = line
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(acceptance_lines, {})
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
