"""scikit-learn style wrappers around the spectral and Poincare tools.

Each estimator is fitted on a square matrix ``X``: a symmetric nonnegative
matrix with constant row sums (an adjacency matrix of a regular multigraph or
a stochastic matrix).  Rows are divided by the common row sum.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .graph_core import StochasticMatrix, cesaro_matrix
from .poincare import EuclidSq, LpPower, gamma_plus_search
from .spectral import spectral_report


def _stochastic(X) -> StochasticMatrix:
    X = check_array(X, accept_sparse="csr", dtype=np.float64, ensure_min_samples=1)
    if X.shape[0] != X.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {X.shape}")
    dense = X.toarray() if hasattr(X, "toarray") else X
    if np.any(dense < 0):
        raise ValueError("matrix entries must be nonnegative")
    sums = dense.sum(axis=1)
    if not np.allclose(sums, sums[0]) or sums[0] <= 0:
        raise ValueError("all row sums must be equal and positive")
    return StochasticMatrix(dense / sums[0])


class SpectralGap(BaseEstimator):
    """Eigenvalue summary of a regular walk matrix.

    After ``fit`` the attributes ``lambda2_``, ``lambda_abs_``, ``gamma_`` and
    ``gamma_plus_`` hold the second eigenvalue, the largest absolute
    nontrivial eigenvalue and the Euclidean Poincare constants.
    """

    def __init__(self, method: str = "auto", random_state: int = 0):
        self.method = method
        self.random_state = random_state

    def fit(self, X, y=None):
        A = _stochastic(X)
        report = spectral_report(A, method=self.method, seed=self.random_state)
        self.n_features_in_ = A.order
        self.lambda2_ = report.lambda2
        self.lambda_abs_ = report.lambda_abs
        self.gamma_ = report.gamma_euclid
        self.gamma_plus_ = report.gamma_plus_euclid
        self.report_ = report
        return self


class CesaroAverage(TransformerMixin, BaseEstimator):
    """Smooth vertex signals with the Cesaro average ``(1/m) sum_{s<m} A^s``.

    ``fit`` takes the walk matrix; ``transform`` takes signals of shape
    ``(n_vertices, n_columns)`` and returns their averages.
    """

    def __init__(self, m: int = 2):
        self.m = m

    def fit(self, X, y=None):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError("m must be a positive integer")
        A = _stochastic(X)
        self.n_features_in_ = A.order
        self.matrix_ = cesaro_matrix(A.toarray(), int(self.m)).toarray()
        return self

    def transform(self, X):
        check_is_fitted(self, "matrix_")
        X = check_array(X, dtype=np.float64, ensure_2d=False)
        if X.shape[0] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} rows, got {X.shape[0]}")
        return self.matrix_ @ X


class PoincareSearch(BaseEstimator):
    """Local-search lower bound on ``gamma_plus`` for a vector-valued kernel.

    ``kernel`` is ``"euclid"`` (squared Euclidean distance) or ``"lp"`` with
    exponent ``p``; ``dim`` is the dimension of the configuration space.
    """

    def __init__(self, kernel: str = "euclid", p: float = 2.0, budget: int = 1000, dim: int | None = None,
                 random_state: int = 0):
        self.kernel = kernel
        self.p = p
        self.budget = budget
        self.dim = dim
        self.random_state = random_state

    def _kernel(self):
        if self.kernel == "euclid":
            return EuclidSq(self.dim)
        if self.kernel == "lp":
            return LpPower(self.dim or 1, self.p)
        raise ValueError(f"unknown kernel {self.kernel!r}")

    def fit(self, X, y=None):
        if self.budget < 1:
            raise ValueError("budget must be positive")
        A = _stochastic(X)
        value, witness = gamma_plus_search(A, self._kernel(), budget=self.budget, seed=self.random_state,
                                           dim=self.dim)
        self.n_features_in_ = A.order
        self.gamma_plus_lower_ = float(value)
        self.witness_ = witness
        return self
