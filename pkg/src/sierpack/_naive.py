"""Naive reference implementations used only for cross-checking the solver.

Deliberately shares no algorithmic machinery with packing.py: distances come
from a Floyd-Warshall sweep, colorability from plain label-order backtracking
with no capacity or symmetry pruning.
"""

from __future__ import annotations

import random

from .graph_core import Graph, build_graph


def _fw_distances(g: Graph) -> list[list[float]]:
    n = g.n
    inf = float("inf")
    d = [[0.0 if i == j else inf for j in range(n)] for i in range(n)]
    for a, b in g.edges():
        ia, ib = g.index(a), g.index(b)
        d[ia][ib] = d[ib][ia] = 1.0
    for k in range(n):
        dk = d[k]
        for i in range(n):
            dik = d[i][k]
            if dik == inf:
                continue
            di = d[i]
            for j in range(n):
                alt = dik + dk[j]
                if alt < di[j]:
                    di[j] = alt
    return d


def naive_is_k_colorable(g: Graph, k: int) -> bool:
    n = g.n
    if n == 0:
        return True
    d = _fw_distances(g)
    colors = [0] * n

    def bt(i: int) -> bool:
        if i == n:
            return True
        for c in range(1, k + 1):
            if all(colors[j] != c or d[i][j] > c for j in range(i)):
                colors[i] = c
                if bt(i + 1):
                    return True
        colors[i] = 0
        return False

    return bt(0)


def naive_chi_rho(g: Graph) -> int:
    """Smallest k admitting a packing k-coloring, by plain enumeration."""
    k = 0
    while True:
        if naive_is_k_colorable(g, k):
            return k
        k += 1


def random_connected_graphs(count: int, seed: int, n_max: int = 9):
    """The fixed random suite for solver-vs-oracle comparison."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(2, n_max)
        p = rng.uniform(0.15, 0.85)
        labels = [f"v{i}" for i in range(n)]
        edges = [(labels[i], labels[j]) for i in range(n)
                 for j in range(i + 1, n) if rng.random() < p]
        g = build_graph(labels, edges)
        seen = {0}
        stack = [0]
        while stack:
            for u in g.neighbor_indices(stack.pop()):
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        if len(seen) == n:
            out.append(g)
    return out
