import pytest

# (label, passed, detail) lines appended by the acceptance module
ACCEPTANCE_LINES: list[tuple[str, bool, str]] = []


def record(label: str, passed: bool, detail: str) -> bool:
    line = f"{'PASS' if passed else 'FAIL'} {label}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append((label, passed, detail))
    return passed


@pytest.fixture
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} {label}: {detail}")
