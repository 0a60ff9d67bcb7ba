import pytest

# (criterion number, label, passed, detail) rows filled by the acceptance
# module; echoed after the run so every criterion gets its own line.
_ACCEPTANCE_LINES = []


@pytest.fixture
def record_criterion():
    def _record(number: int, label: str, passed: bool, detail: str = "") -> None:
        _ACCEPTANCE_LINES.append((number, label, passed, detail))

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, label, passed, detail in sorted(_ACCEPTANCE_LINES):
        status = "PASS" if passed else "FAIL"
        line = f"criterion {number} [{status}] {label}"
        if detail:
            line += f" - {detail}"
        terminalreporter.write_line(line)
