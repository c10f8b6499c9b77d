import random

import pytest

from hfree.graphs import SimpleGraph
from hfree.patterns import Pattern

PETERSEN_EDGES = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
                  (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
                  (5, 7), (7, 9), (9, 6), (6, 8), (8, 5)]


@pytest.fixture
def petersen() -> Pattern:
    return Pattern(10, PETERSEN_EDGES, name="petersen")


def random_graph(n: int, p: float, seed: int) -> SimpleGraph:
    rng = random.Random(seed)
    g = SimpleGraph(n)
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                g.add_edge(u, v)
    return g


def random_triangle_free(n: int, tries: int, seed: int) -> SimpleGraph:
    rng = random.Random(seed)
    g = SimpleGraph(n)
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    rng.shuffle(pairs)
    for (u, v) in pairs[:tries]:
        if not (g.adj[u] & g.adj[v]):
            g.add_edge(u, v)
    return g
