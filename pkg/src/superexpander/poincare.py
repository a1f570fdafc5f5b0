"""Nonlinear Poincaré constants of symmetric stochastic matrices.

For a kernel ``K`` and maps ``f, g`` from the vertices to the ground set, the
Poincaré ratio is

    [ (1/n^2) sum_{i,j} K(f_i, g_j) ] / [ (1/n) sum_{i,j} a_ij K(f_i, g_j) ].

``gamma_plus`` is its supremum over pairs ``(f, g)`` and ``gamma`` the
supremum over ``f = g``.  A ratio ``0/0`` counts as 1 and ``c/0`` with
``c > 0`` as infinity.

On a finite target the supremum is a maximum over finitely many maps.  For a
fixed ``f`` the numerator and the denominator are sums of independent terms
in the coordinates of ``g``, so the best ``g`` is found exactly by Dinkelbach's
iteration instead of enumerating all ``|X|^n`` choices.  With a graph and an
integer distance matrix everything runs in exact integer arithmetic and the
result is a :class:`fractions.Fraction`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import shortest_path

from .errors import CapExceeded
from .graph_core import (
    RegularMultigraph,
    StochasticMatrix,
    as_stochastic,
    cesaro_graph,
    cesaro_matrix,
    is_connected,
    normalized_adjacency,
)
from .spectral import GAP_TOL, eigenvalues_dense, gamma_plus_euclid

ENUMERATION_CAP = 10**7


# --------------------------------------------------------------------------- kernels


class KernelSpec:
    """Symmetric nonnegative kernel on a ground set.

    ``kappa`` is the exponent of the quasi-metric constant ``2**kappa`` when the
    kernel is a metric raised to a power ``p`` (``kappa = p - 1``).
    """

    kappa: float

    def pairwise(self, X, Y) -> np.ndarray:
        raise NotImplementedError

    def paired(self, X, Y) -> np.ndarray:
        """``K(X[k], Y[k])`` for each ``k``."""
        raise NotImplementedError

    def coerce(self, points, n: int):
        points = np.asarray(points)
        if len(points) != n:
            raise ValueError(f"configuration has {len(points)} points, matrix has order {n}")
        return points

    def total(self, X, Y) -> float:
        out = 0.0
        step = _chunk(len(Y), X)
        for start in range(0, len(X), step):
            out += float(self.pairwise(X[start : start + step], Y).sum())
        return out


def _chunk(columns: int, X) -> int:
    """Rows per block so that a block of pairwise work stays near 4M entries."""
    width = X.shape[1] if np.ndim(X) == 2 else 1
    return max(1, 2**22 // max(1, columns * width))


class _VectorKernel(KernelSpec):
    def coerce(self, points, n):
        points = np.asarray(points, dtype=np.float64)
        if points.ndim == 1:
            points = points[:, None]
        if len(points) != n:
            raise ValueError(f"configuration has {len(points)} points, matrix has order {n}")
        if getattr(self, "dim", None) is not None and points.shape[1] != self.dim:
            raise ValueError(f"points must have dimension {self.dim}")
        return points


@dataclass(frozen=True)
class EuclidSq(_VectorKernel):
    """``K(x, y) = ||x - y||_2^2``."""

    dim: int | None = None
    kappa = 1.0

    def pairwise(self, X, Y):
        diff = X[:, None, :] - Y[None, :, :]
        return np.einsum("ijk,ijk->ij", diff, diff)

    def paired(self, X, Y):
        diff = X - Y
        return np.einsum("ij,ij->i", diff, diff)

    def total(self, X, Y):
        n = len(X)
        return float(n * np.sum(X * X) + n * np.sum(Y * Y) - 2 * X.sum(axis=0) @ Y.sum(axis=0))


@dataclass(frozen=True)
class LpPower(_VectorKernel):
    """``K(x, y) = ||x - y||_p^p`` on ``R^dim``."""

    dim: int
    p: float

    def __post_init__(self):
        if self.p < 1 or self.dim < 1:
            raise ValueError("need p >= 1 and dim >= 1")

    @property
    def kappa(self):
        return self.p - 1

    def pairwise(self, X, Y):
        return np.sum(np.abs(X[:, None, :] - Y[None, :, :]) ** self.p, axis=2)

    def paired(self, X, Y):
        return np.sum(np.abs(X - Y) ** self.p, axis=1)


@dataclass(frozen=True)
class LogLinf(_VectorKernel):
    """``K(x, y) = log(1 + ||x - y||_inf)^p`` on integer vectors.

    ``box`` optionally bounds the coordinates (inclusive) for search moves.
    """

    dim: int
    p: float = 2.0
    box: tuple[int, int] | None = None

    @property
    def kappa(self):
        return self.p - 1

    def coerce(self, points, n):
        points = super().coerce(points, n)
        if not np.array_equal(points, np.round(points)):
            raise ValueError("LogLinf points must be integer vectors")
        return points

    def distances(self, X, Y):
        return np.max(np.abs(X[:, None, :] - Y[None, :, :]), axis=2)

    def pairwise(self, X, Y):
        return np.log1p(self.distances(X, Y)) ** self.p

    def paired(self, X, Y):
        return np.log1p(np.max(np.abs(X - Y), axis=1)) ** self.p


class FiniteMetric(KernelSpec):
    """``K(x, y) = D[x, y]^p`` on the points ``0..k-1`` of a finite metric space."""

    def __init__(self, D, p: float = 1):
        D = np.asarray(D)
        if D.ndim != 2 or D.shape[0] != D.shape[1] or len(D) < 1:
            raise ValueError("distance matrix must be square and nonempty")
        if np.any(D < 0) or np.any(np.diag(D) != 0):
            raise ValueError("distances must be nonnegative with zero diagonal")
        if np.max(np.abs(D - D.T)) > 1e-12:
            raise ValueError("distance matrix must be symmetric")
        k = len(D)
        Df = D.astype(np.float64)
        # D[x, z] <= D[x, y] + D[y, z], checked a block of x values at a time
        step = max(1, 2**22 // (k * k))
        for start in range(0, k, step):
            rows = Df[start : start + step]
            if np.any(rows[:, None, :] > rows[:, :, None] + Df[None, :, :] + 1e-12):
                raise ValueError("distance matrix violates the triangle inequality")
        if p < 1:
            raise ValueError("p must be at least 1")
        self.D = D
        self.p = p
        self.kappa = p - 1
        self.size = k
        self.integral = bool(np.issubdtype(D.dtype, np.integer) and float(p).is_integer())
        if self.integral:
            self.table = D.astype(np.int64) ** int(p)
        else:
            self.table = Df**p

    @classmethod
    def two_point(cls, p: float = 1) -> "FiniteMetric":
        return cls(np.array([[0, 1], [1, 0]]), p)

    @classmethod
    def path(cls, k: int, p: float = 1) -> "FiniteMetric":
        idx = np.arange(k)
        return cls(np.abs(idx[:, None] - idx[None, :]), p)

    def coerce(self, points, n):
        points = np.asarray(points, dtype=np.int64)
        if points.shape != (n,):
            raise ValueError(f"configuration must be {n} point indices")
        if points.min() < 0 or points.max() >= self.size:
            raise ValueError("point index out of range")
        return points

    def pairwise(self, X, Y):
        return self.table[np.asarray(X)[:, None], np.asarray(Y)[None, :]]

    def paired(self, X, Y):
        return self.table[X, Y]

    def total(self, X, Y):
        counts_x = np.bincount(X, minlength=self.size)
        counts_y = np.bincount(Y, minlength=self.size)
        return counts_x @ self.table @ counts_y

    def __repr__(self):
        return f"FiniteMetric(size={self.size}, p={self.p})"


# --------------------------------------------------------------------------- ratios


@dataclass(frozen=True)
class Configuration:
    f: np.ndarray
    g: np.ndarray

    @classmethod
    def symmetric(cls, f) -> "Configuration":
        return cls(f, f)


def _divide(num: float, den: float) -> float:
    if den <= GAP_TOL * num or den == 0:
        return 1.0 if num == 0 else math.inf
    return num / den


def _weighted_sum(A: StochasticMatrix, K: KernelSpec, f, g) -> float:
    """``sum_{i,j} a_ij K(f_i, g_j)``."""
    if isinstance(K, EuclidSq):
        return float(np.sum(f * f) + np.sum(g * g) - 2 * np.sum(f * A.matvec(g)))
    if A.is_implicit:
        raise ValueError("non-Euclidean kernels need an explicit matrix")
    coo = sp.coo_array(A.data) if sp.issparse(A.data) else None
    if coo is None:
        total = 0.0
        step = _chunk(len(g), f)
        for start in range(0, A.order, step):
            block = K.pairwise(f[start : start + step], g)
            total += float(np.sum(A.data[start : start + step] * block))
        return total
    return float(np.sum(coo.data * K.paired(f[coo.row], g[coo.col])))


def ratio_terms(A, K: KernelSpec, config: Configuration) -> tuple[float, float]:
    """Numerator and denominator of the Poincaré ratio."""
    A = as_stochastic(A)
    n = A.order
    f = K.coerce(config.f, n)
    g = K.coerce(config.g, n)
    return K.total(f, g) / n**2, _weighted_sum(A, K, f, g) / n


def ratio(A, K: KernelSpec, config: Configuration) -> float:
    num, den = ratio_terms(A, K, config)
    return _divide(max(num, 0.0), max(den, 0.0))


def exact_ratio(G: RegularMultigraph, K: FiniteMetric, config: Configuration) -> Fraction:
    """Exact ratio for a graph and an integer-valued finite metric kernel.

    Returns ``Fraction`` or ``math.inf``.
    """
    if not K.integral:
        raise ValueError("exact ratios need integer distances and an integer power")
    n, d = G.n, G.degree
    f = K.coerce(config.f, n)
    g = K.coerce(config.g, n)
    S = int(K.total(f, g))
    coo = sp.coo_array(G.matrix)
    T = int(np.sum(coo.data.astype(object) * K.paired(f[coo.row], g[coo.col]).astype(object)))
    return _exact_value(S * d, T * n)


def _exact_value(num: int, den: int):
    if den == 0:
        return Fraction(1) if num == 0 else math.inf
    return Fraction(num, den)


# --------------------------------------------------------------------------- brute force


def _weights(A):
    """(weight matrix, scale) with ratio = scale * S / T, exact for graphs."""
    if isinstance(A, RegularMultigraph):
        return A.to_dense().astype(np.int64), Fraction(A.degree, A.n), True
    M = as_stochastic(A).toarray()
    return M, 1.0 / M.shape[0], False


def _all_maps(k: int, n: int) -> np.ndarray:
    return np.array(list(itertools.product(range(k), repeat=n)), dtype=np.int64).reshape(-1, n)


@dataclass(frozen=True)
class BruteForceResult:
    value: object
    witness: Configuration
    evaluated: int


def gamma_plus_bruteforce(A, K: FiniteMetric, cap: int = ENUMERATION_CAP, *, full: bool = False):
    """Exact ``gamma_plus(A, K)`` over all pairs of maps into a finite metric space.

    ``A`` may be a graph (exact rational arithmetic when ``K`` is integral) or
    a stochastic matrix (floating point).  ``cap`` bounds ``|X|^(2n)``.
    With ``full=True`` the value is returned together with the witness.
    """
    W, scale, exact = _weights(A)
    exact = exact and K.integral
    n, k = len(W), K.size
    if k ** (2 * n) > cap:
        raise CapExceeded(f"{k}^{2 * n} configurations exceed the cap {cap}")
    table = K.table if exact else K.table.astype(np.float64)
    if not exact:
        W = W.astype(np.float64)
    best_value, best_cfg, evaluated = None, None, 0
    maps = _all_maps(k, n)
    for start in range(0, len(maps), 4096):
        F = maps[start : start + 4096]
        Kf = table[F]  # (B, n, k): K(f_i, x)
        N = Kf.sum(axis=1)  # (B, k)
        D = np.einsum("ij,bix->bjx", W, Kf)  # (B, n, k)
        values, G, count = _dinkelbach(N, D, exact, 1 / scale)
        evaluated += count
        for b in range(len(F)):
            v = values[b]
            if best_value is None or _greater(v, best_value):
                best_value, best_cfg = v, Configuration(F[b].copy(), G[b].copy())
            if best_value is math.inf:
                break
        if best_value is math.inf:
            break
    value = _scaled(best_value, scale, exact)
    check = exact_ratio(A, K, best_cfg) if exact else ratio(A, K, best_cfg)
    if exact:
        assert check == value, ("witness does not reproduce the maximum", check, value, best_cfg)
    result = BruteForceResult(value, best_cfg, evaluated)
    return result if full else value


def _scaled(value, scale, exact):
    if value is math.inf:
        return math.inf
    if exact:
        return value * scale if isinstance(value, Fraction) else value
    return float(value) * scale


def _greater(a, b) -> bool:
    if b is math.inf:
        return False
    if a is math.inf:
        return True
    return a > b


def _dinkelbach(N, D, exact, one):
    """Per-row maximum of ``sum_j N[g_j] / sum_j D[j, g_j]`` over ``g``.

    ``one`` is the value of ``S/T`` that corresponds to a Poincaré ratio of 1,
    used for the 0/0 convention.  Returns the values (Fraction or float, or
    ``inf``), maximizing maps and the number of evaluations.
    """
    B, n, k = D.shape
    values = [None] * B
    G = np.zeros((B, n), dtype=np.int64)
    zero = D == 0
    has_zero = zero.any(axis=2).all(axis=1)
    masked_N = np.where(zero, N[:, None, :], -1)
    inf_rows = has_zero & (masked_N.max(axis=2).sum(axis=1) > 0)
    evaluations = 0
    for b in range(B):
        if inf_rows[b]:
            values[b] = math.inf
            G[b] = masked_N[b].argmax(axis=1)
            evaluations += 1
            continue
        g = np.broadcast_to(N[b].argmax(), (n,)).copy()
        S = N[b][g].sum()
        T = D[b][np.arange(n), g].sum()
        evaluations += 1
        if S == 0:
            # every kernel value vanishes, so every ratio is 0/0
            values[b] = one
            G[b] = g
            continue
        P, Q = S, T
        for _ in range(10 * n + 10):
            score = Q * N[b][None, :] - P * D[b]
            g_new = score.argmax(axis=1)
            gain = score[np.arange(n), g_new].sum()
            evaluations += 1
            if gain <= 0 or np.array_equal(g_new, g):
                break
            g = g_new
            P = N[b][g].sum()
            Q = D[b][np.arange(n), g].sum()
        value = Fraction(int(P), int(Q)) if exact else float(P) / float(Q)
        if has_zero[b] and value < one:
            # some g makes both sums vanish, and 0/0 counts as 1
            value = one
            g = masked_N[b].argmax(axis=1)
        G[b] = g
        values[b] = value
    return values, G, evaluations


def gamma_bruteforce(A, K: FiniteMetric, cap: int = ENUMERATION_CAP, *, full: bool = False):
    """Exact ``gamma(A, K)``: the supremum over single maps ``f = g``.

    Maps whose ratio is 0/0 (constant maps, among others) carry no information
    and are skipped; when every map is of that kind the value is 1.
    """
    W, scale, exact = _weights(A)
    exact = exact and K.integral
    n, k = len(W), K.size
    if k**n > cap:
        raise CapExceeded(f"{k}^{n} configurations exceed the cap {cap}")
    table = K.table if exact else K.table.astype(np.float64)
    if not exact:
        W = W.astype(np.float64)
    maps = _all_maps(k, n)
    best_value, best_f = None, None
    for start in range(0, len(maps), 8192):
        F = maps[start : start + 8192]
        Kff = table[F[:, :, None], F[:, None, :]]
        S = Kff.sum(axis=(1, 2))
        T = np.einsum("ij,bij->b", W, Kff)
        for b in np.flatnonzero(S):
            v = _exact_value(int(S[b]), int(T[b])) if exact else _divide(float(S[b]), float(T[b]))
            if best_value is None or _greater(v, best_value):
                best_value, best_f = v, F[b].copy()
    if best_value is None:
        value, best_f = (Fraction(1) if exact else 1.0), maps[0].copy()
    else:
        value = _scaled(best_value, scale, exact)
    result = BruteForceResult(value, Configuration.symmetric(best_f), len(maps))
    return result if full else value


# --------------------------------------------------------------------------- search


def _eigen_configurations(A: StochasticMatrix):
    """Eigenvector configurations ``(v, sign(mu) v)`` for every nontrivial eigenpair."""
    M = A.toarray()
    vals, vecs = np.linalg.eigh((M + M.T) / 2)
    order = np.argsort(-np.abs(vals))
    ones = np.ones(A.order) / math.sqrt(A.order)
    for idx in order:
        v = vecs[:, idx]
        v = v - ones * (ones @ v)
        if np.linalg.norm(v) < 1e-8:
            continue
        yield vals[idx], Configuration(v.copy(), math.copysign(1.0, vals[idx]) * v)


def gamma_plus_search(A, K: KernelSpec, budget: int = 1000, seed: int = 0, *, dim: int | None = None):
    """Certified lower bound on ``gamma_plus(A, K)`` by deterministic local search.

    One unit of ``budget`` is one ratio evaluation.  The search starts from a
    random configuration (not charged), tries eigenvector configurations for
    the Euclidean kernel, and then improves coordinates one at a time,
    accepting strict improvements only.  Returns ``(value, witness)`` where
    ``value`` is the ratio of ``witness``.
    """
    A = as_stochastic(A)
    n = A.order
    rng = np.random.default_rng(seed)
    best_cfg = _random_configuration(K, n, rng, dim)
    best = ratio(A, K, best_cfg)
    spent = 0

    def consider(cfg):
        nonlocal best, best_cfg, spent
        spent += 1
        value = ratio(A, K, cfg)
        if value > best:
            best, best_cfg = value, cfg
        return value

    if isinstance(K, EuclidSq) and n <= 4096:
        for _, cfg in _eigen_configurations(A):
            if spent >= budget:
                break
            width = dim or K.dim or 1
            pad = np.zeros((n, width - 1))
            consider(Configuration(np.hstack([cfg.f[:, None], pad]), np.hstack([cfg.g[:, None], pad])))
            break
    while spent < budget and best < math.inf:
        improved = False
        for side in (0, 1):
            for i in range(n):
                for candidate in _moves(K, best_cfg, side, i, rng):
                    if spent >= budget:
                        break
                    before = best
                    consider(candidate)
                    if best > before:
                        improved = True
                        break
        if not improved and spent < budget:
            consider(_random_configuration(K, n, rng, dim))
    return best, best_cfg


def _random_configuration(K, n, rng, dim):
    if isinstance(K, FiniteMetric):
        return Configuration(rng.integers(K.size, size=n), rng.integers(K.size, size=n))
    width = dim or getattr(K, "dim", None) or 1
    if isinstance(K, LogLinf):
        lo, hi = K.box or (0, n)
        return Configuration(
            rng.integers(lo, hi + 1, size=(n, width)).astype(np.float64),
            rng.integers(lo, hi + 1, size=(n, width)).astype(np.float64),
        )
    return Configuration(rng.standard_normal((n, width)), rng.standard_normal((n, width)))


def _moves(K, cfg, side, i, rng):
    base = [np.array(cfg.f, copy=True), np.array(cfg.g, copy=True)]
    if isinstance(K, FiniteMetric):
        for x in range(K.size):
            if x == base[side][i]:
                continue
            trial = [base[0].copy(), base[1].copy()]
            trial[side][i] = x
            yield Configuration(*trial)
        return
    width = base[side].shape[1]
    if isinstance(K, LogLinf):
        lo, hi = K.box or (-np.inf, np.inf)
        for c in range(width):
            for step in (1, -1):
                trial = [base[0].copy(), base[1].copy()]
                trial[side][i, c] = np.clip(trial[side][i, c] + step, lo, hi)
                yield Configuration(*trial)
        return
    trial = [base[0].copy(), base[1].copy()]
    trial[side][i] += rng.standard_normal(width) * 0.5
    yield Configuration(*trial)


# --------------------------------------------------------------------------- cotype


@dataclass(frozen=True)
class CotypeParams:
    p: float
    q: float
    K_p: float
    m: int

    def __post_init__(self):
        if self.p < 2:
            raise ValueError("p must be at least 2")
        if self.q <= 1:
            raise ValueError("q must exceed 1")
        if self.K_p < 1:
            raise ValueError("K_p must be at least 1")
        if self.m < 1 or int(self.m) != self.m:
            raise ValueError("m must be a positive integer")

    @property
    def constant(self) -> float:
        """Scale applied to the edge term of the cotype inequality."""
        p, q = self.p, self.q
        return ((1 - 1 / p) * (1 - 1 / q)) ** (1 - 1 / p) / (32 * 5 ** (1 - 1 / p) * self.K_p)


def cotype_witness(A, x, m: int) -> np.ndarray:
    """``y_i = (1/m) sum_{s<m} (A^s x)_i`` by repeated application of ``A``."""
    if m < 1:
        raise ValueError("m must be at least 1")
    A = as_stochastic(A)
    x = np.asarray(x, dtype=np.float64)
    acc = x.copy()
    walk = x
    for _ in range(1, m):
        walk = A.matvec(walk)
        acc = acc + walk
    return acc / m


def _lp_pairs(X, Y, p, q):
    return np.sum(np.abs(X[:, None, :] - Y[None, :, :]) ** p, axis=2) ** (q / p)


@dataclass(frozen=True)
class CotypeCheck:
    holds: bool
    displacement: float
    edge_term: float
    rhs: float
    slack: float
    combined_lhs: float | None
    combined_rhs: float | None
    combined_holds: bool | None


def check_cotype(A, x, params: CotypeParams) -> CotypeCheck:
    """Evaluate both sides of the metric Markov cotype inequality in ``l_p^dim``.

    The left side is the maximum of the displacement ``sum ||x_i - y_i||^q``
    and ``c^q m^min(1, q/p) sum a_ij ||y_i - y_j||^q``; the right side is
    ``sum Cesaro(A)_ij ||x_i - x_j||^q``.  For ``q = 2`` the combined form
    ``displacement + m^(2/p) * edge sum <= (32 K_p)^2 * rhs`` is evaluated too.
    ``slack`` is ``rhs - max(left terms)``.
    """
    A = as_stochastic(A)
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    p, q, m = params.p, params.q, params.m
    y = cotype_witness(A, x, m)
    M = A.toarray()
    disp = float(np.sum(np.sum(np.abs(x - y) ** p, axis=1) ** (q / p)))
    edges = float(np.sum(M * _lp_pairs(y, y, p, q)))
    rhs = float(np.sum(cesaro_matrix(M, m).toarray() * _lp_pairs(x, x, p, q)))
    edge_term = params.constant**q * m ** min(1.0, q / p) * edges
    worst = max(disp, edge_term)
    combined = None
    if q == 2:
        lhs = disp + m ** (2 / p) * edges
        bound = (32 * params.K_p) ** 2 * rhs
        combined = (lhs, bound, lhs <= bound * (1 + 1e-12) + 1e-12)
    return CotypeCheck(
        holds=worst <= rhs * (1 + 1e-12) + 1e-12,
        displacement=disp,
        edge_term=edge_term,
        rhs=rhs,
        slack=rhs - worst,
        combined_lhs=None if combined is None else combined[0],
        combined_rhs=None if combined is None else combined[1],
        combined_holds=None if combined is None else combined[2],
    )


@dataclass(frozen=True)
class DecayCheck:
    holds: bool
    gamma_plus: object
    gamma_plus_cesaro: object
    bound: float
    tightness: float


def check_calculus_decay(
    A,
    m: int,
    C: float = 32.0,
    eps: float = 1.0,
    kernel: KernelSpec | None = None,
    q: float = 2.0,
    cap: int = ENUMERATION_CAP,
) -> DecayCheck:
    """Check ``gamma_plus(Cesaro_m(A)) <= (45 C)^q max(1, gamma_plus(A) / m^eps)``.

    The constants are exact for the Euclidean kernel (spectral formula) and
    for finite metric targets (brute force).  ``tightness`` is
    ``gamma_plus(Cesaro_m(A)) / max(1, gamma_plus(A) / m^eps)``.
    """
    kernel = kernel or EuclidSq()
    if isinstance(kernel, EuclidSq):
        before = gamma_plus_euclid(A)
        after = gamma_plus_euclid(cesaro_matrix(as_stochastic(A), m))
    elif isinstance(kernel, FiniteMetric):
        before = gamma_plus_bruteforce(A, kernel, cap)
        avg = cesaro_graph(A, m) if isinstance(A, RegularMultigraph) else cesaro_matrix(as_stochastic(A).toarray(), m)
        after = gamma_plus_bruteforce(avg, kernel, cap)
    else:
        raise ValueError("decay checks need an exactly computable kernel")
    reference = max(1.0, float(before) / m**eps)
    bound = (45 * C) ** q * reference
    return DecayCheck(
        holds=float(after) <= bound,
        gamma_plus=before,
        gamma_plus_cesaro=after,
        bound=bound,
        tightness=float(after) / reference,
    )


# --------------------------------------------------------------------------- non-decay demo


def frechet_embed(D) -> np.ndarray:
    """Rows of the distance matrix; the l_inf distance between rows u, v equals D[u, v]."""
    D = np.asarray(D)
    FiniteMetric(D)  # validates the metric axioms
    return D.copy()


def shortest_path_metric(G_or_matrix) -> np.ndarray:
    """Hop distances on the support of a graph or matrix; unreachable pairs are inf."""
    M = G_or_matrix.matrix if isinstance(G_or_matrix, RegularMultigraph) else G_or_matrix
    M = sp.csr_array(M)
    return shortest_path(M, method="D", unweighted=True, directed=False)


def _identity_bound(M: np.ndarray, D: np.ndarray) -> tuple[float, np.ndarray]:
    phi = frechet_embed(D)
    n = len(D)
    kernel = LogLinf(dim=n, p=2)
    value = ratio(StochasticMatrix(M, validate=False), kernel, Configuration(phi, phi))
    return value, phi


def nondecay_experiment(G: RegularMultigraph, t: int) -> dict:
    """Identity-embedding lower bounds for the kernel log(1 + ||.||_inf)^2.

    Each side uses the shortest-path metric of its own graph, embedded
    isometrically into l_inf by :func:`frechet_embed`.  When ``t = 1`` the
    averaged graph is the identity, whose support metric is taken to be the
    discrete metric (every off-diagonal distance 1).
    """
    if not is_connected(G):
        raise ValueError("nondecay_experiment needs a connected graph")
    if t < 1:
        raise ValueError("t must be at least 1")
    A = normalized_adjacency(G).toarray()
    avg = cesaro_matrix(A, t).toarray()
    D_G = shortest_path_metric(G).astype(np.int64)
    if t == 1:
        D_avg = 1 - np.eye(G.n, dtype=np.int64)
    else:
        D_avg = shortest_path_metric(sp.csr_array(np.where(avg > 0, 1.0, 0.0))).astype(np.int64)
    base_value, _ = _identity_bound(A, D_G)
    avg_value, _ = _identity_bound(avg, D_avg)
    ev = eigenvalues_dense(A)[1:]
    lam = float(np.max(np.abs(ev))) if len(ev) else 0.0
    lam_avg = float(np.max(np.abs([np.mean([mu**s for s in range(t)]) for mu in ev]))) if len(ev) else 0.0
    return {
        "n": G.n,
        "degree": G.degree,
        "t": t,
        "lower_bound_graph": base_value,
        "lower_bound_cesaro": avg_value,
        "diameter_graph": int(D_G.max()),
        "diameter_cesaro": int(D_avg.max()),
        "loglog_n_squared": math.log(math.log(G.n)) ** 2 if G.n > 2 else 0.0,
        "gamma_plus_euclid_graph": math.inf if 1 - lam < GAP_TOL else 1 / (1 - lam),
        "gamma_plus_euclid_cesaro": math.inf if 1 - lam_avg < GAP_TOL else 1 / (1 - lam_avg),
    }
