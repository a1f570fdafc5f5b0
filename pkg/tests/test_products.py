from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from superexpander.errors import DegreeMismatch
from superexpander.graph_core import (
    build_graph,
    complete_with_loops,
    cycle,
    cycle_with_loops,
    graph_power,
    normalized_adjacency,
    random_expander,
    random_regular,
)
from superexpander.poincare import FiniteMetric, gamma_plus_bruteforce
from superexpander.products import (
    RotationLabeling,
    balanced_replacement,
    default_labeling,
    derandomized_square,
    random_labeling,
    replacement,
    tensor,
    tensor_graph,
    zigzag,
)
from superexpander.spectral import gamma_plus_euclid, lambda_abs

TOL = 1e-9


def pair(seed, n1=16, d1=4, d2=2):
    G1 = random_regular(n1, d1, seed)
    G2 = random_regular(d1, d2, seed + 1)
    return G1, G2


def test_labeling_contract():
    G1, G2 = cycle_with_loops(5), cycle(3)
    L = default_labeling(G1, G2)
    L.validate(G1, G2)
    again = default_labeling(G1, G2)
    assert np.array_equal(again.pi, L.pi) and np.array_equal(again.kappa, L.kappa)
    with pytest.raises(DegreeMismatch):
        default_labeling(cycle(5), cycle(3))


def test_random_labeling_is_deterministic():
    G1, G2 = cycle_with_loops(6), cycle(3)
    a, b = random_labeling(G1, G2, 9), random_labeling(G1, G2, 9)
    assert np.array_equal(a.pi, b.pi) and np.array_equal(a.kappa, b.kappa)
    a.validate(G1, G2)


def test_invalid_labeling_rejected():
    G1, G2 = cycle_with_loops(4), cycle(3)
    L = default_labeling(G1, G2)
    bad = RotationLabeling(np.zeros_like(L.pi), L.kappa)
    with pytest.raises(ValueError):
        zigzag(G1, G2, bad)


def test_zigzag_c8_loops_with_triangle():
    G1, G2 = cycle_with_loops(8), cycle(3)
    Z = zigzag(G1, G2)
    assert (Z.n, Z.degree) == (24, 4)
    assert gamma_plus_euclid(normalized_adjacency(Z)) <= (
        gamma_plus_euclid(normalized_adjacency(G1)) * gamma_plus_euclid(normalized_adjacency(G2)) ** 2 * (1 + TOL)
    )


def test_zigzag_general_kernel_oracle():
    G1 = cycle(3)
    G2 = build_graph(2, [(0, 1, 1), (0, 0, 1), (1, 1, 1)])
    K = FiniteMetric.two_point(1)
    Z = zigzag(G1, G2)
    lhs = gamma_plus_bruteforce(Z, K)
    rhs = gamma_plus_bruteforce(G1, K) * gamma_plus_bruteforce(G2, K) ** 2
    assert isinstance(lhs, Fraction) and lhs <= rhs


def test_replacement_degrees():
    G1, G2 = cycle_with_loops(5), cycle(3)
    R = replacement(G1, G2)
    assert (R.n, R.degree) == (15, 3)
    B = balanced_replacement(G1, G2)
    assert (B.n, B.degree) == (15, 4)


def test_nine_regular_replacement_with_nine_cycle_is_cubic():
    H = random_regular(10, 9, 0)
    assert replacement(H, cycle(9)).degree == 3


def test_derandomized_square_with_uniform_partner_is_square():
    G1 = random_regular(4, 3, 4)
    S = derandomized_square(G1, complete_with_loops(3))
    assert S.degree == 9
    assert S == graph_power(G1, 2)


def test_tensor_examples():
    A = normalized_adjacency(cycle(3))
    assert lambda_abs(tensor(A, A)) == pytest.approx(0.5, abs=1e-12)
    B = normalized_adjacency(cycle_with_loops(5)).toarray()
    ev = np.sort(np.linalg.eigvalsh(B))
    got = np.sort(np.linalg.eigvalsh(tensor(np.eye(2), B).toarray()))
    assert np.allclose(got, np.sort(np.concatenate([ev, ev])))
    T = tensor_graph(cycle(3), cycle(4))
    assert (T.n, T.degree) == (12, 4)
    assert T.multiplicity(0 * 4 + 0, 1 * 4 + 1) == 1


@given(st.integers(0, 10**6), st.sampled_from(["default", "random"]))
def test_products_euclid_bounds(seed, policy):
    G1, G2 = pair(seed)
    L = random_labeling(G1, G2, seed) if policy == "random" else None
    g = lambda G: gamma_plus_euclid(normalized_adjacency(G))
    g1, g2 = g(G1), g(G2)
    d2 = G2.degree
    Z, R, B, S = zigzag(G1, G2, L), replacement(G1, G2, L), balanced_replacement(G1, G2, L), derandomized_square(G1, G2, L)
    assert (Z.n, Z.degree) == (G1.n * G1.degree, d2**2)
    assert (R.degree, B.degree, S.degree, S.n) == (d2 + 1, 2 * d2, G1.degree * d2, G1.n)
    assert g(Z) <= g1 * g2 * g2 * (1 + TOL)
    assert g(R) <= 3 * (d2 + 1) * g1 * g2 * g2 * (1 + TOL)
    assert g(B) <= 6 * g1 * g2 * g2 * (1 + TOL)
    assert g(S) <= g(graph_power(G1, 2)) * g2 * (1 + TOL)


@given(st.integers(0, 10**6))
def test_tensor_euclid_bound(seed):
    G1 = random_expander(6, 3, seed)
    G2 = random_expander(8, 3, seed + 1)
    g = lambda G: gamma_plus_euclid(normalized_adjacency(G))
    assert g(tensor_graph(G1, G2)) <= g(G1) * g(G2) * (1 + TOL)
