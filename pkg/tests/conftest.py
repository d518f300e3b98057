import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_report():
    def record(criterion, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
