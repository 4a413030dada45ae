import random

import pytest

from hypersearch import build_incidence

# e1={1,2,3}, e2={1,2,4}, e3={1,2}, e4={3,4,5} over nodes 0..5
TOY_EDGES = [[1, 2, 3], [1, 2, 4], [1, 2], [3, 4, 5]]


@pytest.fixture
def toy():
    return build_incidence(TOY_EDGES, 6)


def random_hypergraph(
    rng: random.Random, max_nodes=10, max_edges=12, max_size=5, *, min_nodes=3, timed=False, featured=False
):
    nv = rng.randint(min_nodes, max_nodes)
    ne = rng.randint(1, max_edges)
    edges = [rng.sample(range(nv), rng.randint(1, min(max_size, nv))) for _ in range(ne)]
    ts = [rng.random() for _ in range(ne)] if timed else None
    feats = [frozenset(rng.sample(range(6), rng.randint(1, 3))) for _ in range(nv)] if featured else None
    return build_incidence(edges, nv, timestamps=ts, features=feats)


ACCEPTANCE_LINES: list = []


def record(criterion: str, ok: bool, detail: str = "") -> None:
    """Log one acceptance line; shown in the terminal summary."""
    line = f"{'PASS' if ok else 'FAIL'} [{criterion}] {detail}".rstrip()
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
