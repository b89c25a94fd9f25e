import math
import time

import pytest

from branchsurf import analysis, netgen

PHI_STAR = 3 * math.pi / 4

# criterion number -> list of (label, passed, detail), filled by test_acceptance
ACCEPTANCE = {}


def record(n, label, ok, detail=""):
    ACCEPTANCE.setdefault(n, []).append((label, bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[n]
        ok = all(p[1] for p in parts)
        detail = "; ".join(f"{lab}: {'ok' if good else 'FAILED'} {d}".strip() for lab, good, d in parts)
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def cx3():
    t = time.perf_counter()
    cx = netgen.run_greedy(3.0, phi_star=PHI_STAR, delta=0.05, phi0=math.pi / 2)
    cx.build_seconds = time.perf_counter() - t
    return cx


@pytest.fixture(scope="session")
def cx2():
    return netgen.run_greedy(2.0, phi_star=PHI_STAR, delta=0.05)


@pytest.fixture(scope="session")
def scan():
    """The R = 2..6 energy scan shared by the energy-gap and cut-depth criteria."""
    t = time.perf_counter()
    rows = [analysis.energy_scan_row(r, PHI_STAR, 0.05, phi0=math.pi / 2) for r in (2, 3, 4, 5, 6)]
    return rows, time.perf_counter() - t


@pytest.fixture(scope="session")
def cx8():
    t = time.perf_counter()
    cx = netgen.run_greedy(8.0, phi_star=PHI_STAR, delta=0.08, phi0=math.pi / 2)
    cx.build_seconds = time.perf_counter() - t
    return cx
