import pytest

from bimodal_cqed.space import build_space

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def space1():
    return build_space(1)


@pytest.fixture(scope="session")
def space2():
    return build_space(2)


@pytest.fixture
def report():
    """Record a one-line acceptance verdict, echoed in the terminal summary."""

    def record(number, name, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {name} -- {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda l: int(l.split("criterion ")[1].split(":")[0].rstrip("ab"))):
            terminalreporter.write_line(line)
