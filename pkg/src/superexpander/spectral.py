"""Euclidean spectral quantities of symmetric stochastic matrices.

For the squared Euclidean kernel the Poincaré constants have closed forms:
``gamma = 1 / (1 - lambda_2)`` and ``gamma_plus = 1 / (1 - lambda_abs)``,
where ``lambda_abs`` is the largest absolute value of an eigenvalue other
than the trivial eigenvalue 1 carried by the constant vector.

Small matrices are diagonalized densely.  Larger ones go through an iterative
solver restricted to the mean-zero subspace: Lanczos (ARPACK) by default, or
plain power iteration with explicit deflation of the constant vector.  Every
iterative eigenvalue is returned with its residual ``||A v - mu v||``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .errors import NoConvergence, TooLarge
from .graph_core import DENSE_THRESHOLD, RegularMultigraph, as_stochastic

GAP_TOL = 1e-9
RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class SpectralReport:
    order: int
    degree: int | None
    lambda2: float
    lambda_abs: float
    gamma_euclid: float
    gamma_plus_euclid: float
    method: str
    residual: float

    def to_dict(self) -> dict:
        out = asdict(self)
        for key in ("gamma_euclid", "gamma_plus_euclid"):
            if math.isinf(out[key]):
                out[key] = "inf"
        return out


def eigenvalues_dense(A, threshold: int = DENSE_THRESHOLD) -> np.ndarray:
    """Full spectrum in descending order."""
    A = as_stochastic(A)
    if A.order > threshold:
        raise TooLarge(f"order {A.order} exceeds dense threshold {threshold}")
    M = A.toarray()
    return np.linalg.eigvalsh((M + M.T) / 2)[::-1]


def _nontrivial(evals: np.ndarray) -> np.ndarray:
    # drop one copy of the top eigenvalue, which is 1 for a stochastic matrix
    return evals[1:]


def _shifted(A, coefficient: float) -> LinearOperator:
    """``x -> A x - coefficient * mean(x) * 1``; moves the constant vector's eigenvalue."""
    n = A.order

    def apply(x):
        x = np.asarray(x, dtype=np.float64)
        return A.matvec(x) - coefficient * x.mean(axis=0)

    return LinearOperator((n, n), matvec=apply, matmat=apply, rmatvec=apply, dtype=np.float64)


def _residual(A, mu: float, v: np.ndarray) -> float:
    v = v - v.mean()
    v = v / np.linalg.norm(v)
    return float(np.linalg.norm(A.matvec(v) - mu * v))


def _lanczos_extreme(A, which: str, seed: int, tol: float) -> tuple[float, np.ndarray, float]:
    n = A.order
    op = _shifted(A, 3.0 if which == "LA" else -1.0)
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(n)
    v0 -= v0.mean()
    best = None
    for ncv in (min(n - 1, 40), min(n - 1, 120)):
        try:
            vals, vecs = eigsh(op, k=1, which=which, v0=v0, ncv=ncv, tol=1e-12, maxiter=max(1000, 20 * n))
        except ArpackNoConvergence as exc:
            if len(exc.eigenvalues):
                vals, vecs = exc.eigenvalues, exc.eigenvectors
            else:
                continue
        mu, v = float(vals[0]), vecs[:, 0]
        res = _residual(A, mu, v)
        best = (mu, v, res)
        if res <= tol:
            return best
    if best is None:
        raise NoConvergence(20 * n, float("inf"))
    raise NoConvergence(20 * n, best[2])


def power_iteration(A, shift: float = 1.0, *, seed: int = 0, tol: float = RESIDUAL_TOL, max_iter: int | None = None):
    """Top eigenpair of ``(shift * I + A) / (1 + |shift|)`` on the mean-zero subspace.

    With ``shift = 1`` the limit is ``lambda_2``; with ``shift = -1`` applied to
    ``-A`` callers obtain the smallest eigenvalue.  The iterate is
    re-orthogonalized against the constant vector at every step.  Returns
    ``(mu, v, residual)`` where ``mu`` is the Rayleigh quotient of ``A``.
    """
    if not hasattr(A, "matvec"):
        A = as_stochastic(A)
    n = A.order
    if max_iter is None:
        max_iter = int(10 * n * max(1.0, math.log(n)))
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    scale = 1.0 + abs(shift)
    res = float("inf")
    for it in range(1, max_iter + 1):
        v -= v.mean()
        norm = np.linalg.norm(v)
        if norm == 0:
            return 0.0, v, 0.0
        v /= norm
        Av = A.matvec(v)
        mu = float(v @ Av)
        if it % 10 == 0 or it == max_iter:
            res = float(np.linalg.norm(Av - mu * v))
            if res <= tol:
                return mu, v, res
        v = (shift * v + Av) / scale
    raise NoConvergence(max_iter, res)


def _extremes(A, method: str, seed: int, tol: float):
    """(lambda_2, lambda_min over mean-zero vectors, residual, method used)."""
    A = as_stochastic(A)
    n = A.order
    if n == 1:
        return 0.0, 0.0, 0.0, "dense"
    if method == "auto":
        method = "dense" if n <= DENSE_THRESHOLD else "iterative"
    if method == "dense":
        ev = _nontrivial(eigenvalues_dense(A))
        return float(ev[0]), float(ev[-1]), 0.0, "dense"
    if method == "iterative":
        if n <= 3:
            ev = _nontrivial(eigenvalues_dense(A))
            return float(ev[0]), float(ev[-1]), 0.0, "dense"
        top, _, r1 = _lanczos_extreme(A, "LA", seed, tol)
        bottom, _, r2 = _lanczos_extreme(A, "SA", seed + 1, tol)
        return top, bottom, max(r1, r2), "iterative"
    if method == "power":
        top, _, r1 = power_iteration(A, 1.0, seed=seed, tol=tol)
        neg = _Negated(A)
        low, _, r2 = power_iteration(neg, 1.0, seed=seed + 1, tol=tol)
        return top, -low, max(r1, r2), "power"
    raise ValueError(f"unknown method {method!r}")


class _Negated:
    """``-A`` seen through the ``order``/``matvec`` interface."""

    def __init__(self, A):
        self.order = A.order
        self._A = A

    def matvec(self, x):
        return -self._A.matvec(x)


def lambda2(A, method: str = "auto", seed: int = 0) -> float:
    return _extremes(A, method, seed, RESIDUAL_TOL)[0]


def lambda_abs(A, method: str = "auto", seed: int = 0) -> float:
    top, bottom, _, _ = _extremes(A, method, seed, RESIDUAL_TOL)
    return max(abs(top), abs(bottom))


def _reciprocal_gap(lam: float) -> float:
    gap = 1.0 - lam
    return math.inf if gap < GAP_TOL else 1.0 / gap


def gamma_euclid(A, method: str = "auto", seed: int = 0) -> float:
    return _reciprocal_gap(lambda2(A, method, seed))


def gamma_plus_euclid(A, method: str = "auto", seed: int = 0) -> float:
    return _reciprocal_gap(lambda_abs(A, method, seed))


def spectral_report(A, method: str = "auto", seed: int = 0, tol: float = RESIDUAL_TOL) -> SpectralReport:
    degree = A.degree if isinstance(A, RegularMultigraph) else None
    top, bottom, residual, used = _extremes(A, method, seed, tol)
    lam = max(abs(top), abs(bottom))
    return SpectralReport(
        order=as_stochastic(A).order,
        degree=degree,
        lambda2=top,
        lambda_abs=lam,
        gamma_euclid=_reciprocal_gap(top),
        gamma_plus_euclid=_reciprocal_gap(lam),
        method=used,
        residual=residual,
    )


def bound_norm_to_poincare(lambda_p: float, p: float) -> float:
    """Poincaré bound ``(1 + 4 / (1 - lambda))^p`` from a linear operator-norm bound."""
    if not 0 <= lambda_p < 1:
        raise ValueError("lambda must lie in [0, 1)")
    if p < 1:
        raise ValueError("p must be at least 1")
    return (1 + 4 / (1 - lambda_p)) ** p


def bound_poincare_to_norm(gamma_plus: float, p: float, K_p: float) -> float:
    """Operator-norm bound on mean-zero functions for a p-uniformly convex target."""
    if gamma_plus < 1 or p < 2 or K_p < 1:
        raise ValueError("need gamma_plus >= 1, p >= 2 and K_p >= 1")
    if math.isinf(gamma_plus):
        return 1.0
    return (1 - 1 / ((2 ** (p - 1) - 1) * K_p**p * gamma_plus)) ** (1 / p)


def bound_power_decay(gamma_plus: float, t: int, p: float, K_p: float) -> float:
    """Bound on gamma_plus(A^t) for a p-uniformly convex target."""
    if gamma_plus < 1 or t < 1 or p < 2 or K_p < 1:
        raise ValueError("need gamma_plus >= 1, t >= 1, p >= 2 and K_p >= 1")
    return (4 * K_p) ** (p * p) * max(1.0, (gamma_plus / t) ** p)
