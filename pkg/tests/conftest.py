import math
import os
import sys
import time

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from mocert.problem import (  # noqa: E402
    CandidatePoint,
    CandidateSet,
    ProblemInstance,
    linear_oracle,
    registry_instance,
)

A3 = 1.0 / math.sqrt(3.0)


@pytest.fixture(scope="session")
def discrete4():
    return registry_instance("paper-discrete")


@pytest.fixture(scope="session")
def biquad():
    return registry_instance("biobjective-quadratic")


@pytest.fixture(scope="session")
def biquad_free():
    return registry_instance("biobjective-quadratic-free")


def fpoint(f, x=None):
    """A candidate point carrying objective values ``f`` directly."""
    f = np.asarray(f, dtype=float)
    x = f if x is None else np.asarray(x, dtype=float)
    return CandidatePoint(x, f, np.zeros(0), True)


def fset(F):
    """Candidate set whose decision vectors equal their objective vectors."""
    return CandidateSet([fpoint(f) for f in F])


def identity_problem(m):
    e = np.eye(m)
    return ProblemInstance(n=m, objectives=[linear_oracle(e[i]) for i in range(m)])


def random_fset(rng, m, size, lattice=False):
    if lattice:
        F = rng.integers(0, 6, size=(size, m)).astype(float)
        F = np.unique(F, axis=0)
    else:
        F = rng.random((size, m))
    return fset(F)


# --------------------------------------------------------------------------
# acceptance reporting

ACCEPTANCE = {}
SUITE_BUDGET = 60.0


def record(number, ok, detail=""):
    """Store one acceptance verdict; printed in the terminal summary."""
    ACCEPTANCE[number] = (bool(ok), detail)
    return ok


def pytest_sessionstart(session):
    session.config._suite_start = time.perf_counter()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    elapsed = time.perf_counter() - config._suite_start
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
    within = elapsed < SUITE_BUDGET
    terminalreporter.write_line(
        f"criterion 9 (suite runtime): {'PASS' if within else 'FAIL'}  "
        f"{elapsed:.1f} s against a {SUITE_BUDGET:.0f} s budget")


def pytest_sessionfinish(session, exitstatus):
    if ACCEPTANCE and time.perf_counter() - session.config._suite_start >= SUITE_BUDGET:
        session.exitstatus = 1
