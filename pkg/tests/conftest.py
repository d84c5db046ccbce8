import collections

import pytest

# criterion number -> list of (check name, passed, detail)
_ACCEPTANCE = collections.defaultdict(list)


@pytest.fixture
def criterion():
    def record(number: int, name: str, ok: bool, detail: str = ""):
        _ACCEPTANCE[number].append((name, bool(ok), detail))
        print(f"criterion {number} {name}: {'PASS' if ok else 'FAIL'} {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        checks = _ACCEPTANCE[number]
        ok = all(c[1] for c in checks)
        parts = "; ".join(f"{name} {'ok' if good else 'FAILED'} ({detail})" for name, good, detail in checks)
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {parts}")
