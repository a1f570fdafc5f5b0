import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from superexpander.estimators import CesaroAverage, PoincareSearch, SpectralGap
from superexpander.graph_core import complete_with_loops, cycle, random_expander
from superexpander.spectral import gamma_plus_euclid


def test_spectral_gap_on_cycle():
    est = SpectralGap().fit(cycle(5).to_dense())
    assert est.n_features_in_ == 5
    assert est.lambda_abs_ == pytest.approx(np.cos(np.pi / 5))
    assert est.gamma_plus_ == pytest.approx(1 / (1 - np.cos(np.pi / 5)))


def test_spectral_gap_accepts_sparse_and_scaled():
    G = random_expander(30, 4, seed=0)
    a = SpectralGap().fit(G.matrix).gamma_plus_
    b = SpectralGap().fit(G.to_dense() / 4).gamma_plus_
    assert a == pytest.approx(b, rel=1e-8)


@pytest.mark.parametrize(
    "X",
    [np.ones((2, 3)), -np.eye(2), np.array([[1.0, 0.0], [1.0, 1.0]]), np.zeros((2, 2))],
)
def test_input_validation(X):
    with pytest.raises(ValueError):
        SpectralGap().fit(X)


def test_cesaro_average_transform():
    A = cycle(4).to_dense()
    est = CesaroAverage(m=2).fit(A)
    x = np.array([1.0, 0.0, 0.0, 0.0])
    assert est.transform(x) == pytest.approx([0.5, 0.25, 0.0, 0.25])
    assert est.fit_transform(A).shape == (4, 4)
    with pytest.raises(ValueError):
        est.transform(np.ones(3))
    with pytest.raises(ValueError):
        CesaroAverage(m=0).fit(A)


def test_cesaro_requires_fit():
    with pytest.raises(NotFittedError):
        CesaroAverage().transform(np.ones(3))


def test_poincare_search_lower_bound():
    G = cycle(6)
    est = PoincareSearch(budget=300, dim=2, random_state=1).fit(G.to_dense())
    assert 1 <= est.gamma_plus_lower_ <= gamma_plus_euclid(G) * (1 + 1e-9)
    assert est.witness_ is not None


def test_poincare_search_lp_and_errors():
    X = complete_with_loops(4).to_dense()
    assert PoincareSearch(kernel="lp", p=3.0, budget=50).fit(X).gamma_plus_lower_ >= 1
    with pytest.raises(ValueError):
        PoincareSearch(kernel="other").fit(X)
    with pytest.raises(ValueError):
        PoincareSearch(budget=0).fit(X)


def test_clone_keeps_params():
    est = clone(PoincareSearch(kernel="lp", p=4.0, budget=7))
    assert est.get_params()["p"] == 4.0 and est.budget == 7
