"""Exhaustive enumeration of small regular multigraphs (loops count once)."""

from __future__ import annotations

import itertools

import networkx as nx
import numpy as np

from superexpander.graph_core import RegularMultigraph


def symmetric_matrices(n: int, d: int):
    """Every symmetric nonnegative integer matrix of order ``n`` with row sums ``d``."""
    M = np.zeros((n, n), dtype=np.int64)
    cells = [(i, j) for i in range(n) for j in range(i, n)]

    def fill(pos):
        if pos == len(cells):
            yield M.copy()
            return
        i, j = cells[pos]
        room = d - M[i].sum()
        if i != j:
            room = min(room, d - M[j].sum())
        # the last cell of a row has to complete it
        values = [room] if j == n - 1 else range(room + 1)
        for v in values:
            M[i, j] = M[j, i] = v
            yield from fill(pos + 1)
        M[i, j] = M[j, i] = 0

    for M_ in fill(0):
        if np.all(M_.sum(axis=1) == d):
            yield M_


def all_graphs(n: int, d: int) -> list[RegularMultigraph]:
    return [RegularMultigraph(M) for M in symmetric_matrices(n, d)]


def _nx(M: np.ndarray) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from((i, {"loops": int(M[i, i])}) for i in range(len(M)))
    g.add_edges_from((i, j, {"mult": int(M[i, j])}) for i, j in itertools.combinations(range(len(M)), 2) if M[i, j])
    return g


def _same(a, b) -> bool:
    return nx.is_isomorphic(
        a, b, node_match=lambda x, y: x["loops"] == y["loops"], edge_match=lambda x, y: x["mult"] == y["mult"]
    )


class IsomorphismCache:
    """Memoize a function of a graph over isomorphism classes."""

    def __init__(self, func):
        self.func = func
        self.buckets: dict[str, list] = {}
        self.hits = 0

    def __call__(self, G: RegularMultigraph):
        g = _nx(G.to_dense())
        key = nx.weisfeiler_lehman_graph_hash(g, node_attr="loops", edge_attr="mult") + f"/{G.n}/{G.degree}"
        for h, value in self.buckets.get(key, []):
            if _same(g, h):
                self.hits += 1
                return value
        value = self.func(G)
        self.buckets.setdefault(key, []).append((g, value))
        return value


def graph_classes(n: int, d: int) -> list[RegularMultigraph]:
    """One representative per isomorphism class."""
    reps = IsomorphismCache(lambda G: G)
    out = []
    for G in all_graphs(n, d):
        before = reps.hits
        reps(G)
        if reps.hits == before:
            out.append(G)
    return out


def bipartite_graphs(n: int, d: int):
    """Every d-regular bipartite multigraph with sides ``0..n-1`` and ``n..2n-1``."""

    def rows(k, col_room):
        if k == n:
            if not any(col_room):
                yield []
            return
        for row in _compositions(d, col_room):
            rest = [c - r for c, r in zip(col_room, row)]
            for tail in rows(k + 1, rest):
                yield [row] + tail

    for R in rows(0, [d] * n):
        F = np.array(R, dtype=np.int64)
        full = np.zeros((2 * n, 2 * n), dtype=np.int64)
        full[:n, n:] = F
        full[n:, :n] = F.T
        yield RegularMultigraph(full)


def _compositions(total, caps):
    if not caps:
        if total == 0:
            yield []
        return
    for v in range(min(total, caps[0]) + 1):
        for rest in _compositions(total - v, caps[1:]):
            yield [v] + rest
