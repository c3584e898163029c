import os
from collections import OrderedDict

import pytest

# criterion number -> list of (part, passed, detail)
_RESULTS = OrderedDict()

TITLES = {
    1: "closed form vs Fourier inversion at s = 1/2",
    2: "closed form vs semi-explicit integral",
    3: "auxiliary closed form vs quadrature",
    4: "origin value",
    5: "mass",
    6: "symmetry and scaling",
    7: "ray integral identities",
    8: "kernel representations",
    9: "C_s3 route equivalence",
    10: "harmonic split",
    11: "ray limits at s = 1/2",
    12: "two-sided bound",
    13: "fractional heat cross-checks",
    14: "Kolmogorov Gaussian reference",
}


@pytest.fixture
def criterion():
    """Record the outcome of one part of an acceptance criterion."""

    def record(number, part, passed, detail=""):
        _RESULTS.setdefault(number, []).append((part, bool(passed), detail))
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        parts = _RESULTS[n]
        ok = all(p for _, p, _ in parts)
        terminalreporter.write_line(f"CRITERION {n:2d} {'PASS' if ok else 'FAIL'}: {TITLES.get(n, '')}")
        for part, passed, detail in parts:
            terminalreporter.write_line(f"    [{'PASS' if passed else 'FAIL'}] {part}: {detail}")


@pytest.fixture(autouse=True)
def _single_thread(monkeypatch):
    if "KINKERNEL_THREADS" not in os.environ:
        monkeypatch.setenv("KINKERNEL_THREADS", "1")
