import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


_ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(number, title, checks, runtime_s, limit_s)."""

    def record(number, title, checks, runtime, limit):
        checks = list(checks) + [(f"runtime {runtime:.1f}s < {limit:g}s", runtime < limit)]
        ok = all(c for _, c in checks)
        failed = [name for name, c in checks if not c]
        detail = "; ".join(name for name, _ in checks) if ok else "failed: " + "; ".join(failed)
        _ACCEPTANCE[number] = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {title}: {detail}"
        print(_ACCEPTANCE[number])
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for k in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[k])
