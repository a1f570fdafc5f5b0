import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from superexpander.errors import NoConvergence, TooLarge
from superexpander.graph_core import (
    cesaro_matrix,
    complete_with_loops,
    cycle,
    identity_graph,
    normalized_adjacency,
    random_expander,
    random_regular,
)
from superexpander.poincare import Configuration, EuclidSq, ratio
from superexpander.spectral import (
    bound_norm_to_poincare,
    bound_poincare_to_norm,
    bound_power_decay,
    eigenvalues_dense,
    gamma_euclid,
    gamma_plus_euclid,
    lambda2,
    lambda_abs,
    power_iteration,
    spectral_report,
)


def A(G):
    return normalized_adjacency(G)


def test_dense_spectra():
    assert np.allclose(eigenvalues_dense(A(cycle(3))), [1, -0.5, -0.5])
    assert np.allclose(eigenvalues_dense(A(cycle(4))), [1, 0, 0, -1], atol=1e-12)
    assert np.allclose(eigenvalues_dense(A(identity_graph(4))), 1)


def test_dense_threshold():
    with pytest.raises(TooLarge):
        eigenvalues_dense(A(cycle(10)), threshold=5)


def test_lambda_examples():
    assert lambda_abs(A(cycle(4))) == pytest.approx(1)
    assert lambda_abs(A(cycle(3))) == pytest.approx(0.5)
    assert lambda2(A(cycle(3))) == pytest.approx(-0.5)
    assert lambda_abs(A(complete_with_loops(5))) == pytest.approx(0, abs=1e-12)


def test_gamma_examples():
    assert gamma_euclid(A(cycle(3))) == pytest.approx(2 / 3)
    assert gamma_plus_euclid(A(cycle(3))) == pytest.approx(2)
    assert gamma_plus_euclid(A(cycle(4))) == math.inf
    U = A(complete_with_loops(6))
    assert gamma_euclid(U) == pytest.approx(1) and gamma_plus_euclid(U) == pytest.approx(1)


def test_report_fields():
    r = spectral_report(cycle(9))
    assert r.order == 9 and r.degree == 2 and r.method == "dense"
    assert r.gamma_plus_euclid == pytest.approx(1 / (1 - math.cos(math.pi / 9)))
    assert spectral_report(A(cycle(4))).to_dict()["gamma_plus_euclid"] == "inf"


def test_power_iteration_gives_up():
    with pytest.raises(NoConvergence) as err:
        power_iteration(A(random_regular(40, 3, 1)), max_iter=3, tol=1e-30)
    assert err.value.iterations == 3


def test_bound_arithmetic():
    assert bound_norm_to_poincare(0.5, 2) == pytest.approx(81)
    assert bound_norm_to_poincare(0, 1) == pytest.approx(5)
    assert bound_poincare_to_norm(2, 2, 1) == pytest.approx(math.sqrt(0.5))
    assert bound_poincare_to_norm(math.inf, 2, 1) == 1
    assert bound_power_decay(10, 20, 2, 1) == pytest.approx(256)
    assert bound_power_decay(100, 10, 2, 1) == pytest.approx(25600)
    with pytest.raises(ValueError):
        bound_norm_to_poincare(1, 2)
    with pytest.raises(ValueError):
        bound_poincare_to_norm(2, 1.5, 1)


def test_norm_to_poincare_dominates_c3():
    assert bound_norm_to_poincare(0.5, 2) >= gamma_plus_euclid(A(cycle(3)))


@given(st.integers(0, 10**6))
def test_dense_iterative_power_agree(seed):
    G = random_expander(60, 4, seed)
    dense = lambda_abs(A(G), method="dense")
    assert abs(lambda_abs(A(G), method="iterative", seed=seed) - dense) <= 1e-7


@given(st.integers(0, 10**6))
def test_power_iteration_finds_second_eigenvalue(seed):
    M = A(random_expander(30, 4, seed))
    mu, v, res = power_iteration(M, seed=seed, tol=1e-7, max_iter=200_000)
    assert res <= 1e-7 and abs(v.sum()) < 1e-8
    assert mu == pytest.approx(lambda2(M, method="dense"), abs=1e-6)


@given(st.integers(0, 10**6))
def test_eigenvector_configurations_attain_gamma_plus(seed):
    G = random_regular(12, 3, seed)
    M = A(G).toarray()
    mu, V = np.linalg.eigh(M)
    K = EuclidSq()
    rng = np.random.default_rng(seed)
    gp = gamma_plus_euclid(A(G))
    for i in range(len(mu)):
        if abs(mu[i] - 1) < 1e-9 and np.allclose(V[:, i], V[0, i]):
            continue
        v = V[:, i][:, None]
        value = ratio(M, K, Configuration(v, np.sign(mu[i]) * v if mu[i] != 0 else v))
        expected = math.inf if 1 - abs(mu[i]) < 1e-9 else 1 / (1 - abs(mu[i]))
        if math.isinf(expected):
            assert value == math.inf or value > 1e8
        else:
            assert value == pytest.approx(expected, rel=1e-9)
    for _ in range(50):
        f, g = rng.standard_normal((12, 2)), rng.standard_normal((12, 2))
        assert ratio(M, K, Configuration(f, g)) <= gp * (1 + 1e-9)


@given(st.integers(0, 10**6), st.integers(1, 16))
def test_cesaro_spectral_mapping(seed, m):
    G = random_regular(10, 3, seed)
    M = A(G).toarray()
    ev = np.linalg.eigvalsh(M)[:-1]
    expected = max(abs(np.mean([mu**s for s in range(m)])) for mu in ev)
    assert lambda_abs(cesaro_matrix(M, m)) == pytest.approx(expected, abs=1e-9)


@given(st.integers(0, 10**6))
def test_poincare_to_norm_self_consistent(seed):
    M = A(random_expander(20, 3, seed))
    assert lambda_abs(M) <= bound_poincare_to_norm(gamma_plus_euclid(M), 2, 1) + 1e-12


@given(st.integers(0, 10**6), st.integers(1, 8))
def test_power_decay_bound_in_euclid(seed, t):
    M = A(random_expander(20, 3, seed)).toarray()
    assert gamma_plus_euclid(np.linalg.matrix_power(M, t)) <= bound_power_decay(gamma_plus_euclid(M), t, 2, 1)
