"""Discretized heat kernel on the hypercube and its quotient by a linear code.

With ``tau = (1 - exp(-t)) / 2`` and ``a = 4 tau n`` the normalizer is
``sigma = tau^a (1 - tau)^(n - a)`` and two words at Hamming distance ``k`` are
joined by

    e(k) = floor(tau^k (1 - tau)^(n - k) / sigma) = floor(r^(k - a)),
    r = tau / (1 - tau),

parallel edges.  Floors are exact: rational ``tau`` with integral ``a`` uses
:class:`fractions.Fraction`; otherwise the floor is certified with interval
arithmetic at two working precisions that must agree.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import mpmath
import numpy as np
import scipy.sparse as sp

from .codes import LinearCode, coset_indices
from .errors import HypothesisViolation, PrecisionError, TooLarge
from .graph_core import RegularMultigraph, check_fits

BASE_PRECISION = 256
MAX_HEAT_EXPONENT = 20
MAX_HEAT_EDGES = 5 * 10**7


@contextmanager
def _iv_precision(prec: int):
    saved = mpmath.iv.prec
    mpmath.iv.prec = prec
    try:
        yield
    finally:
        mpmath.iv.prec = saved


@dataclass(frozen=True)
class HeatParams:
    """Heat time ``t`` and dimension ``n``; ``tau`` may be given exactly instead of ``t``."""

    t: float
    n: int
    exact_tau: Fraction | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.exact_tau is None and not self.t > 0:
            raise ValueError("t must be positive")
        if self.exact_tau is not None and not 0 < self.exact_tau < Fraction(1, 2):
            raise ValueError("tau must lie in (0, 1/2)")

    @classmethod
    def from_tau(cls, tau, n: int) -> "HeatParams":
        tau = Fraction(tau)
        return cls(-math.log1p(-2 * float(tau)), n, tau)

    def tau_interval(self, prec: int):
        with _iv_precision(prec):
            if self.exact_tau is not None:
                return mpmath.iv.mpf(self.exact_tau.numerator) / self.exact_tau.denominator
            return -mpmath.iv.expm1(-mpmath.iv.mpf(self.t)) / 2

    @property
    def tau(self) -> float:
        if self.exact_tau is not None:
            return float(self.exact_tau)
        return -math.expm1(-self.t) / 2

    @property
    def rational(self) -> bool:
        """True when every e(k) is a rational number computable exactly."""
        return self.exact_tau is not None and (4 * self.exact_tau * self.n).denominator == 1

    @property
    def center(self) -> float:
        """``4 tau n``; weights up to this value have e(k) >= 1."""
        return 4 * self.tau * self.n

    @property
    def log_sigma(self) -> float:
        tau, n = self.tau, self.n
        return 4 * tau * n * math.log(tau) + (1 - 4 * tau) * n * math.log1p(-tau)

    @property
    def sigma(self) -> float:
        if self.rational:
            return float(self.sigma_exact)
        return math.exp(self.log_sigma)

    @property
    def sigma_exact(self) -> Fraction:
        if not self.rational:
            raise ValueError("sigma is rational only for rational tau with integral 4 tau n")
        tau, n = self.exact_tau, self.n
        a = int(4 * tau * n)
        return tau**a * (1 - tau) ** (n - a)

    @cached_property
    def weights(self) -> tuple[int, ...]:
        return tuple(e_t_n(self, k) for k in range(self.n + 1))


def _interval_floor(value, prec: int) -> int | None:
    # endpoints must not be rounded to the default 53-bit context
    with mpmath.mp.workprec(prec):
        lo, hi = mpmath.floor(mpmath.mpf(value.a)), mpmath.floor(mpmath.mpf(value.b))
    return int(lo) if lo == hi else None


def _log_ratio_interval(params: HeatParams, k: int, prec: int):
    """Interval for ``(k - 4 tau n) * log(tau / (1 - tau))``."""
    with _iv_precision(prec):
        tau = params.tau_interval(prec)
        return (k - 4 * tau * params.n) * (mpmath.iv.log(tau) - mpmath.iv.log(1 - tau))


def e_t_n(params: HeatParams, k: int) -> int:
    """Number of edges joining two words at Hamming distance ``k``."""
    n = params.n
    if not 0 <= k <= n:
        raise ValueError("k must lie in 0..n")
    if params.rational:
        tau = params.exact_tau
        a = int(4 * tau * n)
        value = (tau / (1 - tau)) ** (k - a)
        return value.numerator // value.denominator
    results = []
    for extra in (0, 64):
        prec = BASE_PRECISION + extra
        log_value = _log_ratio_interval(params, k, prec)
        # enough bits to resolve the integer part of exp(log_value)
        digits_needed = int(max(0.0, float(log_value.b)) / math.log(2)) + 64
        prec = max(prec, digits_needed + extra)
        log_value = _log_ratio_interval(params, k, prec + 64)
        with _iv_precision(prec + 64):
            floor = _interval_floor(mpmath.iv.exp(log_value), prec + 64)
        if floor is None:
            raise PrecisionError(f"cannot certify e({k}) at {prec} bits")
        results.append(floor)
    if results[0] != results[1]:
        raise PrecisionError(f"e({k}) differs between working precisions")
    return results[0]


def heat_degree(params: HeatParams) -> int:
    """``sum_k C(n, k) e(k)``, the common degree of the heat graph and its quotients."""
    return sum(math.comb(params.n, k) * w for k, w in enumerate(params.weights))


def _weight_classes(n: int) -> np.ndarray:
    return np.bitwise_count(np.arange(2**n, dtype=np.uint64)).astype(np.int64)


def heat_graph(params: HeatParams) -> RegularMultigraph:
    """Graph on ``F_2^n`` where ``x, y`` share ``e(|x + y|)`` edges."""
    n = params.n
    if n > MAX_HEAT_EXPONENT:
        raise TooLarge(f"n = {n} exceeds {MAX_HEAT_EXPONENT}")
    weights = [check_fits(w) for w in params.weights]
    check_fits(heat_degree(params), "degree")
    wt = _weight_classes(n)
    shifts = np.nonzero(np.array([weights[k] for k in wt]) > 0)[0].astype(np.uint64)
    N = 2**n
    if N * len(shifts) > MAX_HEAT_EDGES:
        raise TooLarge(f"{N * len(shifts)} nonzero entries exceed {MAX_HEAT_EDGES}")
    x = np.repeat(np.arange(N, dtype=np.uint64), len(shifts))
    y = x ^ np.tile(shifts, N)
    mult = np.array(weights, dtype=np.uint64)[wt[np.tile(shifts, N).astype(np.int64)]]
    E = sp.csr_array(sp.coo_array((mult, (x.astype(np.int64), y.astype(np.int64))), shape=(N, N)))
    return RegularMultigraph(E)


def syndrome_weights(params: HeatParams, C: LinearCode) -> list[int]:
    """``W(s) = sum of e(|w|)`` over words ``w`` with syndrome ``s``."""
    if C.n != params.n:
        raise ValueError(f"code length {C.n} differs from n = {params.n}")
    if params.n > MAX_HEAT_EXPONENT:
        raise TooLarge(f"n = {params.n} exceeds {MAX_HEAT_EXPONENT}")
    weights = params.weights
    wt = _weight_classes(params.n)
    idx = coset_indices(C)
    totals = [0] * 2**C.dimension
    # group by (syndrome, weight) so the big-integer sums stay short
    pairs, counts = np.unique(idx * (params.n + 1) + wt, return_counts=True)
    for key, count in zip(pairs.tolist(), counts.tolist()):
        s, k = divmod(key, params.n + 1)
        totals[s] += count * weights[k]
    return totals


def quotient_heat_graph(params: HeatParams, C: LinearCode) -> RegularMultigraph:
    """Heat graph modulo the dual code, on the ``2^D`` cosets indexed by syndrome.

    Cosets ``c1, c2`` share ``W(c1 xor c2)`` edges, which equals the sum of
    ``e(|rep(c1) + rep(c2) + u|)`` over ``u`` in the dual code.
    """
    W = [check_fits(w) for w in syndrome_weights(params, C)]
    check_fits(sum(W), "degree")
    m = 2**C.dimension
    c = np.arange(m)
    table = np.array(W, dtype=np.uint64)[c[:, None] ^ c[None, :]]
    return RegularMultigraph(sp.csr_array(table))


@dataclass(frozen=True)
class TauEstimates:
    tau: float
    sigma_log10: float
    useful1_lower: float
    useful1_upper: float
    useful1_ok: bool
    useful2_even: float
    useful2_odd: float
    useful2_ok_all_s: bool


def tau_estimates_check(t: float, n: int, prec: int = 128) -> TauEstimates:
    """Interval-arithmetic check of the two binomial-sum estimates.

    All quantities are multiplied by ``sigma``.  Since ``e(k) = floor(x_k)``
    with ``x_k = r^(k - a)``, the term ``C(n,k) sigma e(k)`` lies between
    ``C(n,k) sigma (x_k - 1)`` and the binomial probability ``C(n,k) sigma x_k``.
    The first estimate asks the sum over ``k <= a`` to lie in ``[1/3, 1]``; the
    upper side follows from the binomial theorem.  For every ``s`` in ``(a, n]``
    the second sum runs over ``k <= a`` with ``k = s mod 2`` (terms with
    ``k > a`` vanish because ``x_k < 1``), so it suffices to bound the even and
    odd partial sums below by ``1/18``.  Log-terms are accumulated
    incrementally in interval arithmetic, so every reported lower bound is
    certified.
    """
    if not 0 < t < 0.25:
        raise HypothesisViolation("t must lie in (0, 1/4)")
    if n < 8000:
        raise HypothesisViolation("n must be at least 8000")
    tau = -math.expm1(-t) / 2
    if tau < 1 / (3 * math.sqrt(n)):
        raise HypothesisViolation("tau must be at least 1/(3 sqrt(n))")
    iv = mpmath.iv
    with _iv_precision(prec):
        T = -iv.expm1(-iv.mpf(t)) / 2
        log_tau, log_rest = iv.log(T), iv.log(1 - T)
        a = 4 * T * n
        log_sigma = a * log_tau + (n - a) * log_rest
        a_hi = min(int(mpmath.floor(a.b)), n)
        lower = [iv.mpf(0), iv.mpf(0)]
        upper = iv.mpf(0)
        log_binom = iv.mpf(0)
        log_mass = n * log_rest
        log_r = log_tau - log_rest
        for k in range(a_hi + 1):
            if k:
                step = iv.log(iv.mpf(n - k + 1) / k)
                log_binom += step
                log_mass += step + log_r
            mass = iv.exp(log_mass)
            term_low = mass - iv.exp(log_binom + log_sigma)
            if term_low.a > 0:
                lower[k % 2] += iv.mpf(term_low.a)
            upper += mass
        total_low = lower[0] + lower[1]
        upper_bound = min(float(upper.b), 1.0)
        return TauEstimates(
            tau=tau,
            sigma_log10=float(log_sigma.a) / math.log(10),
            useful1_lower=float(total_low.a),
            useful1_upper=upper_bound,
            useful1_ok=bool(total_low.a >= mpmath.mpf(1) / 3 and upper_bound <= 1),
            useful2_even=float(lower[0].a),
            useful2_odd=float(lower[1].a),
            useful2_ok_all_s=bool(min(lower[0].a, lower[1].a) >= mpmath.mpf(1) / 18),
        )


def heat_matrix_entry(t: float, x, y) -> float:
    """``(e^{-t Delta} delta_x)(y)`` for words ``x, y`` of equal length."""
    x, y = np.asarray(x), np.asarray(y)
    if x.shape != y.shape:
        raise ValueError("words must have equal length")
    n = x.size
    dist = int(np.count_nonzero(x != y))
    flip = -math.expm1(-t) / 2
    stay = (1 + math.exp(-t)) / 2
    return flip**dist * stay ** (n - dist)


def heat_l1_ratio(n: int, t: float, prec: int = BASE_PRECISION) -> float:
    """``sum_m C(n, m) |flip^m stay^(n-m) - 2^-n|``, the L1 norm of the evolved delta."""
    if n > 60:
        raise ValueError("n is capped at 60")
    with mpmath.workprec(prec):
        T = mpmath.mpf(t)
        flip = -mpmath.expm1(-T) / 2
        stay = (1 + mpmath.exp(-T)) / 2
        base = mpmath.mpf(2) ** (-n)
        total = mpmath.fsum(
            math.comb(n, m) * abs(flip**m * stay ** (n - m) - base) for m in range(n + 1)
        )
        return float(total)


def heat_sandwich(params: HeatParams, f, g, kernel_table) -> tuple[float, float, float]:
    """The three averages of the discretization sandwich for maps into a finite target.

    Returns ``(left, middle, right)``: a third and three times the edge
    average of ``K(f(x), g(y))`` over the heat graph, and the heat-kernel
    average.  The lemma asserts ``left <= middle <= right`` for large ``n``.
    """
    n = params.n
    if n > 12:
        raise TooLarge("the sandwich report enumerates all pairs; n is capped at 12")
    N = 2**n
    f, g = np.asarray(f), np.asarray(g)
    K = np.asarray(kernel_table, dtype=np.float64)[f[:, None], g[None, :]]
    words = np.arange(N, dtype=np.uint64)
    dist = np.bitwise_count(words[:, None] ^ words[None, :]).astype(np.int64)
    weights = np.array([float(w) for w in params.weights])
    E = weights[dist]
    edge_avg = float(np.sum(E * K) / np.sum(E))
    flip = params.tau
    heat = flip**dist * (1 - flip) ** (n - dist)
    middle = float(np.sum(heat * K) / N)
    return edge_avg / 3, middle, 3 * edge_avg
