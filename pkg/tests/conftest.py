import random

import pytest

from parmbe.gen import gen_bipartite, gen_er
from parmbe.graph import Graph


def graph_of(text: str) -> Graph:
    """``"a-b b-c"`` style small graphs over single-letter names mapped to ints."""
    edges = []
    for tok in text.split():
        u, v = tok.split("-")
        edges.append((ord(u) - ord("a"), ord(v) - ord("a")))
    return Graph.from_edges(edges)


A, B, C, D = 0, 1, 2, 3


@pytest.fixture
def path3():
    return graph_of("a-b b-c")


@pytest.fixture
def triangle():
    return graph_of("a-b b-c a-c")


@pytest.fixture
def c4():
    return graph_of("a-b b-c c-d d-a")


@pytest.fixture
def k4():
    return graph_of("a-b a-c a-d b-c b-d c-d")


@pytest.fixture
def star():
    # hub c, leaves x, y, z -> ids 2, 23, 24, 25
    return graph_of("c-x c-y c-z")


def random_corpus(count: int, seed: int = 12345):
    """Seeded small graphs: ER with n in [4, 12] and bipartite with sides <= 6."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        if i % 4 == 3:
            n1, n2 = rng.randint(1, 6), rng.randint(1, 6)
            p = rng.choice([0.3, 0.5, 0.8])
            out.append((f"bip-{i}", gen_bipartite(n1, n2, p, seed=rng.randrange(2**32))))
        else:
            n = rng.randint(4, 12)
            p = rng.choice([0.2, 0.4, 0.6])
            out.append((f"er-{i}", gen_er(n, p, seed=rng.randrange(2**32))))
    return out


CRITERIA_LINES: list[str] = []


def record_criterion(number: int, status: str, detail: str) -> None:
    line = f"criterion {number}: {status} ({detail})"
    print(line)
    CRITERIA_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA_LINES:
            terminalreporter.write_line(line)
