import random

import pytest

from windowmdp import instances
from windowmdp.windows import Lasso

ACCEPTANCE = {}


@pytest.fixture(scope="session")
def fig1():
    return instances.load("fig1_naive")


@pytest.fixture(scope="session")
def fig3():
    return instances.load("fig3_sdab")


@pytest.fixture(scope="session")
def fig4():
    return instances.load("fig4_posreach")


@pytest.fixture(scope="session")
def fig5():
    return instances.load("fig5_memory_fwmp")


@pytest.fixture(scope="session")
def fig6():
    return instances.load("fig6_memory_bwmp")


def random_lasso(rng: random.Random, m) -> Lasso:
    """Random walk until a vertex repeats; the repeat closes the cycle."""
    v = rng.choice(sorted(m.vertices))
    path, where = [], {}
    while v not in where:
        where[v] = len(path)
        path.append(v)
        v = rng.choice(m.successors(v))
    i = where[v]
    return Lasso(tuple(path[:i]), tuple(path[i:]))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {key}: {text}")
