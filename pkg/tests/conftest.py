import pytest

_criterion_lines: list[str] = []


@pytest.fixture(scope="session")
def criterion_log():
    """Collector for the acceptance suite's one-line-per-criterion report."""
    return _criterion_lines.append


def pytest_terminal_summary(terminalreporter):
    if _criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_criterion_lines):
            terminalreporter.write_line(line)
