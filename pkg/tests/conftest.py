from __future__ import annotations

import sys

import pytest
from hypothesis import HealthCheck, settings

from polycert.corpus import DATA_DIR, builtin_corpus, load_corpus
from polycert.polytope import LatticePolytope

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

FIG1A = ((-1, 2), (2, -1), (-1, -1))
FIG1B = ((0, 1), (1, -1), (-1, -1))
FIG1C = ((0, 1), (1, 0), (-1, -1))


@pytest.fixture(scope="session")
def corpus():
    return load_corpus(DATA_DIR)


@pytest.fixture(scope="session")
def builtins():
    return {e.name: e for e in builtin_corpus()}


@pytest.fixture
def fig1a():
    return LatticePolytope(FIG1A, "fig1a")


@pytest.fixture
def fig1b():
    return LatticePolytope(FIG1B, "fig1b")


@pytest.fixture
def fig1c():
    return LatticePolytope(FIG1C, "fig1c")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
