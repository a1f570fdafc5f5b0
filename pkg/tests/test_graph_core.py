import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import regular_graphs
from superexpander.errors import MultiplicityOverflow, NonRegularError, NotBipartite
from superexpander.graph_core import (
    RegularMultigraph,
    StochasticMatrix,
    bipartite_double,
    bipartite_double_graph,
    build_graph,
    cesaro_graph,
    cesaro_matrix,
    collapse_bipartite,
    complete_with_loops,
    cycle,
    cycle_with_loops,
    edge_completion,
    graph_power,
    half_size,
    identity_graph,
    is_bipartite,
    is_connected,
    normalized_adjacency,
    random_expander,
    random_regular,
    random_simple_regular,
    trivial_poincare_bounds,
)


def test_build_two_vertices_triple_edge():
    G = build_graph(2, [(0, 1, 3)])
    assert G.degree == 3
    assert G.to_dense().tolist() == [[0, 3], [3, 0]]


def test_build_single_vertex_loops():
    G = build_graph(1, [(0, 0, 5)])
    assert (G.n, G.degree) == (1, 5)
    assert normalized_adjacency(G).toarray().tolist() == [[1.0]]


def test_build_rejects_irregular():
    with pytest.raises(NonRegularError):
        build_graph(3, [(0, 1, 1), (1, 2, 1)])


def test_build_rejects_bad_vertices_and_multiplicity():
    with pytest.raises(ValueError):
        build_graph(2, [(0, 2, 1)])
    with pytest.raises(ValueError):
        build_graph(2, [(0, 1, 0)])


def test_overflow_is_loud():
    with pytest.raises(MultiplicityOverflow):
        build_graph(1, [(0, 0, 2**64)])


def test_cycles():
    C4 = cycle(4)
    assert C4.degree == 2 and is_bipartite(C4)
    L4 = cycle_with_loops(4)
    assert L4.degree == 3
    assert np.all(np.diag(L4.to_dense()) == 1)
    assert cycle(9).n == 9 and not is_bipartite(cycle(9))
    with pytest.raises(ValueError):
        cycle(2)


def test_normalized_adjacency_examples():
    A = normalized_adjacency(cycle(3)).toarray()
    assert np.allclose(A, (np.ones((3, 3)) - np.eye(3)) / 2)
    assert np.allclose(normalized_adjacency(cycle_with_loops(3)).toarray(), np.full((3, 3), 1 / 3))


def test_graph_power_examples():
    assert graph_power(cycle(5), 1) == cycle(5)
    P = graph_power(cycle(3), 2)
    assert P.degree == 4
    assert P.to_dense().tolist() == [[2, 1, 1], [1, 2, 1], [1, 1, 2]]
    Q = graph_power(cycle(4), 2).to_dense()
    assert Q[0].tolist() == [2, 0, 2, 0]


def test_cesaro_graph_examples():
    I = cesaro_graph(cycle(5), 1)
    assert I == identity_graph(5)
    C = cesaro_graph(cycle(3), 2)
    assert C.degree == 4
    assert np.allclose(normalized_adjacency(C).toarray(), (np.eye(3) + normalized_adjacency(cycle(3)).toarray()) / 2)


def test_cesaro_matrix_examples():
    A = normalized_adjacency(cycle(5)).toarray()
    assert np.allclose(cesaro_matrix(A, 1).toarray(), np.eye(5))
    assert np.allclose(cesaro_matrix(A, 2).toarray(), (np.eye(5) + A) / 2)


def test_edge_completion_examples():
    G = edge_completion(cycle(3), 5)
    assert G.to_dense().tolist() == [[1, 2, 2], [2, 1, 2], [2, 2, 1]]
    assert edge_completion(cycle(7), 2) == cycle(7)
    with pytest.raises(ValueError):
        edge_completion(cycle(7), 1)


def test_edge_completion_of_degree_one():
    G = edge_completion(build_graph(2, [(0, 1, 1)]), 3)
    assert G.to_dense().tolist() == [[0, 3], [3, 0]]


def test_bipartite_double_examples():
    B = bipartite_double(StochasticMatrix(np.array([[1.0]]))).toarray()
    assert B.tolist() == [[0, 1], [1, 0]]
    A = normalized_adjacency(cycle_with_loops(5)).toarray()
    ev = np.sort(np.linalg.eigvalsh(A))
    evd = np.sort(np.linalg.eigvalsh(bipartite_double(A).toarray()))
    assert np.allclose(evd, np.sort(np.concatenate([ev, -ev])))


def test_collapse_examples():
    M = build_graph(2, [(0, 1, 1)])
    assert collapse_bipartite(M).to_dense().tolist() == [[2]]
    K22 = build_graph(4, [(0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 1)])
    F = collapse_bipartite(K22)
    assert F.degree == 4 and F.to_dense().tolist() == [[2, 2], [2, 2]]
    with pytest.raises(NotBipartite):
        collapse_bipartite(cycle_with_loops(4))


def test_half_size_two_triangles():
    two = build_graph(6, [(0, 1, 1), (1, 2, 1), (0, 2, 1), (3, 4, 1), (4, 5, 1), (3, 5, 1)])
    H = half_size(two)
    assert H.n == 3 and is_connected(H)
    assert 4 * two.degree <= H.degree <= 6 * two.degree
    with pytest.raises(ValueError):
        half_size(cycle(3))


def test_half_size_cross_edges_only_gives_4d():
    K33 = build_graph(6, [(u, v, 1) for u in range(3) for v in range(3, 6)])
    assert half_size(K33).degree == 4 * 3


def test_trivial_bounds():
    assert trivial_poincare_bounds(3, 2, 1) == (18, 72)
    assert trivial_poincare_bounds(5, 4, 0) == (10, 20)
    assert trivial_poincare_bounds(9, 2, 1)[1] == 648


def test_random_generators_are_seeded():
    assert random_regular(10, 3, 1) == random_regular(10, 3, 1)
    S = random_simple_regular(10, 3, 2)
    assert S.degree == 3 and np.all(np.diag(S.to_dense()) == 0) and S.to_dense().max() == 1
    E = random_expander(16, 4, 3)
    assert is_connected(E) and not is_bipartite(E)


def test_complete_with_loops_is_uniform():
    assert np.allclose(normalized_adjacency(complete_with_loops(4)).toarray(), 0.25)


def test_stochastic_matrix_validation():
    with pytest.raises(ValueError):
        StochasticMatrix(np.array([[0.5, 0.6], [0.5, 0.4]]))


@given(regular_graphs())
def test_rows_sum_to_degree(G):
    assert np.all(G.to_dense().sum(axis=1) == G.degree)
    assert np.array_equal(G.to_dense(), G.to_dense().T)


@given(regular_graphs(max_n=8, max_d=4), st.integers(1, 4))
def test_power_matches_matrix_power(G, t):
    A = normalized_adjacency(G).toarray()
    assert np.allclose(normalized_adjacency(graph_power(G, t)).toarray(), np.linalg.matrix_power(A, t), atol=1e-12)


@given(regular_graphs(max_n=8, max_d=4), st.integers(1, 5))
def test_cesaro_graph_matches_matrix(G, m):
    C = cesaro_graph(G, m)
    assert C.degree == m * G.degree ** (m - 1)
    A = normalized_adjacency(G).toarray()
    assert np.allclose(normalized_adjacency(C).toarray(), cesaro_matrix(A, m).toarray(), atol=1e-12)


@given(regular_graphs(max_n=8, max_d=4), st.integers(0, 10))
def test_edge_completion_degree(G, extra):
    D = G.degree + extra
    H = edge_completion(G, D)
    q, r = divmod(D, G.degree)
    assert H.degree == D
    assert np.array_equal(H.to_dense(), q * G.to_dense() + r * np.eye(G.n, dtype=np.uint64))


@given(regular_graphs(max_n=6, max_d=4))
def test_bipartite_double_graph_doubles_degree_and_folds_back(G):
    B = bipartite_double_graph(G)
    assert is_bipartite(B)
    F = collapse_bipartite(B)
    assert F.degree == 2 * G.degree
    assert np.array_equal(F.to_dense(), 2 * G.to_dense())


def test_regular_multigraph_equality_and_hash():
    assert cycle(5) == RegularMultigraph(cycle(5).matrix)
    assert hash(cycle(5)) == hash(RegularMultigraph(cycle(5).matrix))
