import functools
import random

import pytest

from ramsey_ove import engine, oracle
from ramsey_ove.graph import Graph, cycle, disjoint_union, path
from ramsey_ove.oracle import RamseyParams

ACCEPTANCE_RESULTS = {}


def random_graph(n, rng, p=0.5):
    rows = [0] * n
    for j in range(1, n):
        for i in range(j):
            if rng.random() < p:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
    return Graph(n, tuple(rows))


def random_relabel(g, rng):
    perm = list(range(g.order))
    rng.shuffle(perm)
    return g.relabel(perm), tuple(perm)


@functools.lru_cache(maxsize=None)
def complete_set(s, t, n):
    p = RamseyParams(s, t)
    return engine.CounterexampleSet(p, n, oracle.enumerate_counterexamples(p, n))


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def c5():
    return cycle(5)


@pytest.fixture
def p4():
    return path(4)


@pytest.fixture
def k4():
    return Graph.complete(4)


@pytest.fixture
def two_k2():
    return disjoint_union(Graph.complete(2), Graph.complete(2))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split(".")[0])):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {detail}")
