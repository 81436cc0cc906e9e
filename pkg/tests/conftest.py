import pytest

ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line: criterion(key, passed, seconds, limit, detail)."""
    def record(key, passed, seconds, limit, detail=""):
        ok = passed and seconds < limit
        line = f"criterion {key}: {'PASS' if ok else 'FAIL'} ({seconds:.1f} s of {limit} s)"
        if detail:
            line += f" {detail}"
        ACCEPTANCE[key] = line
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(k.split("-")[0]), k)):
        terminalreporter.write_line(ACCEPTANCE[key])
