from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from markovcat import io

settings.register_profile(
    "markovcat", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("markovcat")

TESTS = Path(__file__).resolve().parent
FIXTURES = TESTS / "fixtures"
GOLDEN = TESTS / "golden"

# criterion number -> (passed, summary line); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def load(name: str):
    return io.parse((FIXTURES / f"{name}.json").read_text(encoding="utf-8"))


@pytest.fixture
def fixture():
    return load


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, line = ACCEPTANCE[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d}: {line}")
