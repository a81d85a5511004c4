import pytest

ACCEPTANCE: dict = {}


@pytest.fixture
def acceptance_log():
    """Record one criterion outcome: log(number, title, passed, detail)."""

    def log(number: int, title: str, passed: bool, detail: str = "") -> None:
        ACCEPTANCE[number] = (title, passed, detail)
        print(f"CRITERION {number} {'PASS' if passed else 'FAIL'}: {title}" + (f" -- {detail}" if detail else ""))

    return log


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[number]
        line = f"{'PASS' if passed else 'FAIL'}  {number}. {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
