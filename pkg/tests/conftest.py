"""Shared fixtures and the acceptance summary printed after the run."""

from __future__ import annotations

import re

import numpy as np
import pytest

from ringspec.ccm import CcmConfig, solve
from ringspec.conformal import annulus_map, robnik_map
from ringspec.exact import annulus_spectrum

CRITERIA = {
    1: "exact annulus ground energies for 8 radii to 1e-8 (< 5 s)",
    2: "radial variational ground energies, 48 values to 1e-6 (< 10 s)",
    3: "analytic formula vs oracle, a=9/10, 2000 states (max 0.5%, median ~0.1%, < 30 s)",
    4: "CCM vs oracle, a=9/10 14x400 (ground 0.1%, 50 at 0.3%, 2000 at 1%) and 10x120 CI variant",
    5: "Robnik ring area 1.07032 and perimeter 11.5250 to 5 s.f. (< 1 s)",
    6: "heat-sum geometry from the CCM Robnik spectrum (A 0.5%, L 1%, |C| <= 0.05)",
    7: "property suites",
    8: "Robnik angular variational energies (N = 1..6)",
}

_outcomes: dict[int, list] = {}


@pytest.fixture(scope="session")
def robnik():
    return robnik_map(0.1, 0.1)


@pytest.fixture(scope="session")
def robnik_ccm_2000(robnik):
    """Lowest 2000 CCM energies of the Robnik ring on the 14 x 400 grid."""
    return solve(CcmConfig(14, 400, robnik), 2000).energies


@pytest.fixture(scope="session")
def annulus09_ccm_2000():
    return solve(CcmConfig(14, 400, annulus_map(0.9)), 2000).energies


@pytest.fixture(scope="session")
def annulus09_exact_2000():
    return annulus_spectrum(0.9, 1.0, 2000)


@pytest.fixture
def rng():
    return np.random.default_rng(20241016)


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", report.nodeid)
    if not m:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = dict(report.user_properties).get("detail", "")
        _outcomes.setdefault(int(m.group(1)), []).append(
            (report.nodeid.split("::")[-1], report.outcome, detail))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(CRITERIA):
        runs = _outcomes.get(k)
        if not runs:
            tr.write_line(f"criterion {k}: NOT RUN  {CRITERIA[k]}")
            continue
        ok = all(outcome == "passed" for _, outcome, _ in runs)
        tr.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {CRITERIA[k]}")
        for name, outcome, detail in runs:
            tr.write_line(f"    {outcome.upper():7s} {name}" + (f"  [{detail}]" if detail else ""))
