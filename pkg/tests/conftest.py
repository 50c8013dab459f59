from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from tetris_syk.syk import SykParams, build_instance, sample_instance

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

CRITERIA_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion."""

    def _report(criterion: str, ok: bool, detail: str) -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
        CRITERIA_LINES.append(line)
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA_LINES, key=lambda s: _criterion_key(s)):
            terminalreporter.write_line(line)


def _criterion_key(line: str):
    tag = line.split("criterion ", 1)[1].split(":", 1)[0]
    num = "".join(ch for ch in tag if ch.isdigit())
    return (int(num) if num else 0, tag)


@pytest.fixture(scope="session")
def inst8():
    return sample_instance(SykParams(8, seed=4))


@pytest.fixture(scope="session")
def inst12():
    return sample_instance(SykParams(12, seed=5))


@pytest.fixture(scope="session")
def single_term():
    """``H = c P`` on two qubits: the quadruple (1,2,3,4) at N=4, ``c = -0.7``."""
    return build_instance(SykParams(4, dense=True), np.array([[1, 2, 3, 4]]), np.array([0.7]))


@pytest.fixture(scope="session")
def commuting8():
    """Mutually commuting terms: pairs of quadruples overlap in 0 or 2 Majoranas."""
    quads = np.array([[1, 2, 3, 4], [5, 6, 7, 8], [1, 2, 5, 6], [3, 4, 7, 8]])
    return build_instance(SykParams(8), quads, np.array([0.4, -0.3, 0.25, 0.6]))
