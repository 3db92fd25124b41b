import pytest

ACCEPTANCE_RESULTS: dict[int, tuple[str, str]] = {}


@pytest.fixture
def record():
    def _record(number: int, ok: bool, detail: str = ""):
        ACCEPTANCE_RESULTS[number] = ("PASS" if ok else "FAIL", detail)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        status, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {detail}")
