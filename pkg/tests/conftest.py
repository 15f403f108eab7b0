import numpy as np
import pytest

from corepa import ingest


def net_from_triples(triples):
    return ingest(iter(triples))


@pytest.fixture
def path_net():
    """Path 0-1-2 before t=2, plus node 3 citing 0 and 1 at t=2.

    At cutoff 2 the snapshot has degrees {0: 1, 1: 2, 2: 1}; the window
    [2, 3) carries the two attachment events (3, 0) and (3, 1).
    """
    return net_from_triples([
        ("a", "b", 1), ("b", "c", 1),
        ("d", "a", 2), ("d", "b", 2),
    ])


@pytest.fixture
def triangle_pendant_net():
    """Triangle 0-1-2 with pendant 3 before t=5; node 4 attaches at t=5."""
    return net_from_triples([
        ("p", "q", 1), ("q", "r", 1), ("r", "p", 1), ("p", "s", 2),
        ("t", "p", 5),
    ])


def random_temporal_net(rng, n_nodes=40, n_edges=120, t_max=50):
    """Random timestamped triples (self-loops and duplicates included on purpose)."""
    triples = []
    for _ in range(n_edges):
        u = int(rng.integers(0, n_nodes))
        v = int(rng.integers(0, n_nodes))
        t = int(rng.integers(0, t_max))
        triples.append((str(u), str(v), t))
    return net_from_triples(triples)


def naive_coreness(n, edges):
    """Repeated peeling, the independent oracle: delete below-k nodes until stable."""
    neigh = {v: set() for v in range(n)}
    for u, v in edges:
        if u != v:
            neigh[u].add(v)
            neigh[v].add(u)
    alive = set(range(n))
    core = {}
    k = 1
    while alive:
        while True:
            doomed = [v for v in alive if len(neigh[v] & alive) < k]
            if not doomed:
                break
            for v in doomed:
                core[v] = k - 1
                alive.discard(v)
        k += 1
    return [core[v] for v in range(n)]
