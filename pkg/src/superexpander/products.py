"""Zigzag, replacement, balanced replacement, derandomized square and tensor products.

Product graphs on ``V1 x V2`` index the pair ``(u, a)`` as ``u * d1 + a``.
The edge endpoints at a vertex ``u`` of ``G1`` are the slots of
:attr:`RegularMultigraph.slots`: one slot per edge copy, sorted by neighbour
id and then copy index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DegreeMismatch
from .graph_core import (
    RegularMultigraph,
    StochasticMatrix,
    as_stochastic,
    check_fits,
)


@dataclass(frozen=True, eq=False)
class RotationLabeling:
    """Slot-to-vertex bijections ``pi`` and neighbour enumerations ``kappa``.

    ``pi[u, s]`` is the vertex of ``G2`` assigned to slot ``s`` at ``u``.
    ``kappa[a, i]`` is the ``i``-th neighbour of ``a`` in ``G2``.
    """

    pi: np.ndarray
    kappa: np.ndarray
    seed: int | None = None

    def validate(self, G1: RegularMultigraph, G2: RegularMultigraph) -> None:
        _check_sizes(G1, G2)
        if self.pi.shape != (G1.n, G1.degree):
            raise ValueError("pi has the wrong shape")
        if not np.array_equal(np.sort(self.pi, axis=1), np.broadcast_to(np.arange(G1.degree), self.pi.shape)):
            raise ValueError("each pi_u must be a bijection onto V2")
        if self.kappa.shape != (G2.n, G2.degree):
            raise ValueError("kappa has the wrong shape")
        if not np.array_equal(np.sort(self.kappa, axis=1), G2.slots[0]):
            raise ValueError("each kappa_a must enumerate the neighbours of a")


def _check_sizes(G1: RegularMultigraph, G2: RegularMultigraph) -> None:
    if G1.degree != G2.n:
        raise DegreeMismatch(
            f"the second graph must have {G1.degree} vertices (degree of the first), has {G2.n}"
        )


def default_labeling(G1: RegularMultigraph, G2: RegularMultigraph) -> RotationLabeling:
    _check_sizes(G1, G2)
    pi = np.tile(np.arange(G1.degree, dtype=np.int64), (G1.n, 1))
    return RotationLabeling(pi, np.array(G2.slots[0]))


def random_labeling(G1: RegularMultigraph, G2: RegularMultigraph, seed: int) -> RotationLabeling:
    _check_sizes(G1, G2)
    rng = np.random.default_rng(seed)
    pi = rng.permuted(np.tile(np.arange(G1.degree, dtype=np.int64), (G1.n, 1)), axis=1)
    kappa = rng.permuted(np.array(G2.slots[0]), axis=1)
    return RotationLabeling(pi, kappa, seed=seed)


def _resolve(G1, G2, labeling):
    _check_sizes(G1, G2)
    if labeling is None:
        labeling = default_labeling(G1, G2)
    else:
        labeling.validate(G1, G2)
    return labeling


def _assemble(n, rows, cols, mults=None) -> RegularMultigraph:
    if mults is None:
        mults = np.ones(len(rows), dtype=np.uint64)
    E = sp.csr_array(sp.coo_array((np.asarray(mults, dtype=np.uint64), (rows, cols)), shape=(n, n)))
    E.sum_duplicates()
    return RegularMultigraph(E)


def zigzag(G1: RegularMultigraph, G2: RegularMultigraph, labeling: RotationLabeling | None = None) -> RegularMultigraph:
    """Small step in the cloud, big step along an edge copy, small step again.

    Degree ``d2**2`` on ``n1 * d1`` vertices.
    """
    L = _resolve(G1, G2, labeling)
    check_fits(G2.degree**2, "degree")
    d1, d2 = G1.degree, G2.degree
    nbr, partner = G1.slots
    u = np.repeat(np.arange(G1.n, dtype=np.int64), d1)
    v = nbr.ravel()
    start = L.pi.ravel()
    end = L.pi[v, partner.ravel()]
    left = L.kappa[start]  # (n1*d1, d2)
    right = L.kappa[end]
    rows = (u[:, None] * d1 + left)[:, :, None]
    cols = (v[:, None] * d1 + right)[:, None, :]
    rows, cols = np.broadcast_arrays(rows, cols)
    return _assemble(G1.n * d1, rows.ravel(), cols.ravel())


def _slot_edges(G1, L):
    d1 = G1.degree
    nbr, partner = G1.slots
    u = np.repeat(np.arange(G1.n, dtype=np.int64), d1)
    v = nbr.ravel()
    rows = u * d1 + L.pi.ravel()
    cols = v * d1 + L.pi[v, partner.ravel()]
    return rows, cols


def _replacement(G1, G2, labeling, weight):
    L = _resolve(G1, G2, labeling)
    n = G1.n * G1.degree
    cloud = sp.coo_array(sp.kron(sp.eye_array(G1.n, dtype=np.uint64), G2.matrix, format="coo"))
    rows, cols = _slot_edges(G1, L)
    all_rows = np.concatenate((cloud.row, rows))
    all_cols = np.concatenate((cloud.col, cols))
    mults = np.concatenate((cloud.data.astype(np.uint64), np.full(len(rows), weight, dtype=np.uint64)))
    return _assemble(n, all_rows, all_cols, mults)


def replacement(G1, G2, labeling=None) -> RegularMultigraph:
    """Copy of ``G2`` in every cloud plus one edge per edge copy of ``G1``; degree d2 + 1."""
    return _replacement(G1, G2, labeling, 1)


def balanced_replacement(G1, G2, labeling=None) -> RegularMultigraph:
    """As :func:`replacement` with each ``G1`` edge repeated d2 times; degree 2 d2."""
    return _replacement(G1, G2, labeling, G2.degree)


def derandomized_square(G1, G2, labeling=None) -> RegularMultigraph:
    """Two-step walks in ``G1`` whose slot pair at the middle vertex is an edge of ``G2``.

    Degree ``d1 * d2`` on the vertices of ``G1``.
    """
    L = _resolve(G1, G2, labeling)
    check_fits(G1.degree * G2.degree, "degree")
    d1, d2 = G1.degree, G2.degree
    nbr, _ = G1.slots
    inverse = np.argsort(L.pi, axis=1)  # inverse[w, a] = slot carrying a
    w = np.repeat(np.arange(G1.n, dtype=np.int64), d1 * d2)
    s = np.tile(np.repeat(np.arange(d1), d2), G1.n)
    a = L.pi[w, s]
    i = np.tile(np.arange(d2), G1.n * d1)
    s2 = inverse[w, L.kappa[a, i]]
    return _assemble(G1.n, nbr[w, s], nbr[w, s2])


def tensor(A, B) -> StochasticMatrix:
    """Kronecker product of two stochastic matrices."""
    A, B = as_stochastic(A), as_stochastic(B)
    if A.is_implicit or B.is_implicit:
        raise ValueError("tensor needs explicit matrices")
    if A.is_dense and B.is_dense:
        return StochasticMatrix(np.kron(A.data, B.data), validate=False)
    return StochasticMatrix(sp.kron(A.data, B.data, format="csr"), validate=False)


def tensor_graph(G1: RegularMultigraph, G2: RegularMultigraph) -> RegularMultigraph:
    """Multiplicity ``E1(u, v) * E2(s, t)`` at ``((u, s), (v, t))``; degree d1 d2."""
    check_fits(G1.degree * G2.degree, "degree")
    return RegularMultigraph(sp.kron(G1.matrix, G2.matrix, format="csr"), validate=False)
