import numpy as np
import pytest

from graphent import graphs


def random_tree(rng: np.random.Generator, n: int) -> graphs.Graph:
    parents = [-1] + [int(rng.integers(0, v)) for v in range(1, n)]
    return graphs.tree_from_parents(parents)


def random_two_colourable(rng: np.random.Generator, n: int, p: float = 0.5) -> graphs.Graph:
    colours = int(rng.integers(0, 1 << n))
    edges = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if ((colours >> i) ^ (colours >> j)) & 1 and rng.random() < p
    ]
    if not edges:
        # force one cross edge so the graph is never empty
        i = next((v for v in range(n) if colours >> v & 1), None)
        j = next((v for v in range(n) if not colours >> v & 1), None)
        if i is None or j is None:
            colours ^= 1
            i, j = 0, next(v for v in range(1, n))
        edges = [(min(i, j), max(i, j))]
    return graphs.Graph(n, tuple(edges))


def random_graph(rng: np.random.Generator, n: int, p: float = 0.5) -> graphs.Graph:
    edges = [
        (i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p
    ]
    return graphs.Graph(n, tuple(edges))


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
