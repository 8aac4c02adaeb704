import pytest

_criteria: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record one PASS/FAIL/SKIP line per acceptance criterion."""

    def record(number, status, detail=""):
        line = f"criterion {number:>2}: {status}  {detail}".rstrip()
        _criteria[number] = line
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _criteria:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_criteria):
            terminalreporter.write_line(_criteria[number])
