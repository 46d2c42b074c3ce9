import time

import numpy as np
import pytest

from glsmcharge.cli import parse_spec

QUINTIC_ALPHA = (0.21, 0.23, 0.27, 0.29, 0.31, 1.17)
CONIFOLD_ALPHA = (0.11, 0.13, 0.17, 0.19)
BARNES_ALPHA = (0.3, 0.4)
KP1P1_ALPHA = (0.11, 0.13, 0.17, 0.19, 0.23)


@pytest.fixture(scope="session")
def quintic():
    return parse_spec("quintic")


@pytest.fixture(scope="session")
def conifold():
    return parse_spec("conifold")


@pytest.fixture(scope="session")
def barnes():
    return parse_spec("barnes")


@pytest.fixture(scope="session")
def kp1p1():
    return parse_spec("kp1p1")


def rel(a, b):
    return abs(a - b) / max(1.0, abs(b))


def barnes_closed_form(zeta, alpha=BARNES_ALPHA, B=0.0):
    """exp(-theta a1) Gamma(a1+a2) (1+exp(-theta))^(-(a1+a2)), principal branch."""
    from scipy.special import gamma
    th = zeta + 2j * np.pi * B
    c = alpha[0] + alpha[1]
    return complex(np.exp(-th * alpha[0]) * gamma(c) * (1 + np.exp(-th)) ** (-c))


ACCEPTANCE_LINES = []
_SESSION_START = time.perf_counter()


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion."""
    def record(n, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    elapsed = time.perf_counter() - _SESSION_START
    terminalreporter.section("acceptance")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
    ok = elapsed < 300
    terminalreporter.write_line(
        f"{'PASS' if ok else 'FAIL'} criterion 9 runtime: session took {elapsed:.1f} s (limit 300 s)")
