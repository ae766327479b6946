import pytest


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion."""
    lines = request.config.__dict__.setdefault("_acceptance_lines", {})

    def report(number: int, ok: bool, message: str):
        line = f"CRITERION {number:>2} {'PASS' if ok else 'FAIL'}  {message}"
        lines[number] = line
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.__dict__.get("_acceptance_lines")
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(lines):
        terminalreporter.write_line(lines[n])
