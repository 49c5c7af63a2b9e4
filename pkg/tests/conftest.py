from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_GATE_LINES: list[str] = []


class Gate:
    """Records one PASS/FAIL line per acceptance criterion, then asserts."""

    def __call__(self, label: str, ok: bool, detail: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
        _GATE_LINES.append(line)
        print(line)
        assert ok, line


@pytest.fixture
def gate() -> Gate:
    return Gate()


def pytest_terminal_summary(terminalreporter, exitstatus, config):  # noqa: ARG001
    if _GATE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _GATE_LINES:
            terminalreporter.write_line(line)
