"""Inequality batteries run by ``superexpander verify``.

Each suite draws seeded instances, evaluates both sides of a family of
inequalities and reports every comparison.  A comparison passes when the
left side does not exceed the right side; exact (rational) values are compared
exactly and floating values with a relative tolerance.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import base_graph, codes
from .graph_core import (
    bipartite_double,
    bipartite_double_graph,
    cesaro_matrix,
    collapse_bipartite,
    edge_completion,
    graph_power,
    half_size,
    half_size_bipartite,
    normalized_adjacency,
    random_expander,
    random_regular,
)
from .poincare import (
    CotypeParams,
    FiniteMetric,
    check_calculus_decay,
    check_cotype,
    gamma_plus_bruteforce,
)
from .products import (
    balanced_replacement,
    derandomized_square,
    random_labeling,
    replacement,
    tensor_graph,
    zigzag,
)
from .spectral import eigenvalues_dense, gamma_euclid, gamma_plus_euclid, lambda_abs

SUITES = (
    "products-euclid",
    "products-oracle",
    "cotype",
    "calculus",
    "prelim-lemmas",
    "base-arith",
    "pipeline-toy",
)
# factor applied to every right side when the harness is asked to fail on purpose
CORRUPTION = 1e-3
# three-point targets on eight vertices
ORACLE_CAP = 3**16


@dataclass(frozen=True)
class VerifySuiteConfig:
    suite: str
    count: int = 20
    seed: int = 0
    tolerance: float = 1e-9
    p: float = 2.0
    q: float = 2.0
    K_p: float = 1.0
    corrupt: bool = False

    def __post_init__(self):
        if self.suite not in SUITES:
            raise ValueError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if self.suite == "cotype":
            CotypeParams(self.p, self.q, self.K_p, 1)


@dataclass
class Comparison:
    check: str
    instance: int
    seed: list
    lhs: object
    rhs: object
    slack: float
    passed: bool


class _Recorder:
    def __init__(self, cfg: VerifySuiteConfig):
        self.cfg = cfg
        self.rows: list[Comparison] = []

    def compare(self, check, instance, lhs, rhs, exact=False):
        if self.cfg.corrupt:
            rhs = rhs * Fraction(1, 1000) if isinstance(rhs, Fraction) else rhs * CORRUPTION
        passed = _leq(lhs, rhs, None if exact else self.cfg.tolerance)
        slack = math.inf if _is_inf(rhs) else (-math.inf if _is_inf(lhs) else float(rhs) - float(lhs))
        self.rows.append(
            Comparison(check, instance, [self.cfg.seed, instance], _plain(lhs), _plain(rhs), slack, bool(passed))
        )


def _is_inf(x) -> bool:
    return isinstance(x, float) and math.isinf(x)


def _plain(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if _is_inf(x):
        return "inf"
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x


def _leq(lhs, rhs, tol) -> bool:
    if _is_inf(rhs):
        return True
    if _is_inf(lhs):
        return False
    if tol is None:
        return lhs <= rhs
    return float(lhs) <= float(rhs) + tol * max(1.0, abs(float(rhs)))


def _rng(cfg, instance):
    return np.random.default_rng([cfg.seed, instance])


def _seed(rng) -> int:
    return int(rng.integers(2**31))


def _expander(rng, n: int, degrees):
    """Connected non-bipartite sample on ``n`` vertices, trying degrees in random order.

    Falls back to an unconstrained sample when no listed degree admits one.
    """
    degrees = [int(d) for d in rng.permutation(list(degrees))]
    for d in degrees:
        try:
            return random_expander(n, d, _seed(rng), max_tries=50)
        except RuntimeError:
            continue
    return random_regular(n, degrees[0], _seed(rng))


# --------------------------------------------------------------------------- suites


def _products_euclid(cfg, rec):
    for i in range(cfg.count):
        rng = _rng(cfg, i)
        d1 = int(rng.integers(3, 6))
        n1 = int(rng.integers(4, 33))
        if n1 * d1 % 2:
            n1 += 1
        G1 = _expander(rng, n1, [d1])
        G2 = _expander(rng, d1, [2, 3])
        L = random_labeling(G1, G2, _seed(rng))
        g1, g2 = gamma_plus_euclid(G1), gamma_plus_euclid(G2)
        d2 = G2.degree
        rec.compare("zigzag_submultiplicative", i, gamma_plus_euclid(zigzag(G1, G2, L)), g1 * g2 * g2)
        rec.compare("replacement_metric", i, gamma_plus_euclid(replacement(G1, G2, L)), 3 * (d2 + 1) * g1 * g2 * g2)
        rec.compare("balanced_metric", i, gamma_plus_euclid(balanced_replacement(G1, G2, L)), 6 * g1 * g2 * g2)
        rec.compare(
            "derandomized_square", i,
            gamma_plus_euclid(derandomized_square(G1, G2, L)),
            gamma_plus_euclid(graph_power(G1, 2)) * g2,
        )
        rec.compare("tensor_submultiplicative", i, gamma_plus_euclid(tensor_graph(G1, G2)), g1 * g2)


def _oracle_metrics():
    return [FiniteMetric.two_point(1), FiniteMetric.two_point(2), FiniteMetric.path(3, 1), FiniteMetric.path(3, 2)]


def _products_oracle(cfg, rec):
    for i in range(cfg.count):
        rng = _rng(cfg, i)
        d1 = int(rng.integers(2, 5))
        n1 = max(1, 8 // d1)
        G1 = _expander(rng, n1, [d1])
        G2 = _expander(rng, d1, [1, 2, 3])
        L = random_labeling(G1, G2, _seed(rng))
        d2 = G2.degree
        built = {
            "zig": zigzag(G1, G2, L),
            "rep": replacement(G1, G2, L),
            "bal": balanced_replacement(G1, G2, L),
            "sq": derandomized_square(G1, G2, L),
            "sq_ref": graph_power(G1, 2),
            "ten": tensor_graph(G1, G2),
        }
        for K in _oracle_metrics():
            g = {name: gamma_plus_bruteforce(G, K, ORACLE_CAP) for name, G in built.items()}
            g1, g2 = gamma_plus_bruteforce(G1, K, ORACLE_CAP), gamma_plus_bruteforce(G2, K, ORACLE_CAP)
            tag = f"[{K.size}pt,p={K.p:g}]"
            c = 3 ** (int(K.p) - 1)
            rec.compare("zigzag_submultiplicative" + tag, i, g["zig"], _mul(g1, g2, g2), exact=True)
            rec.compare("tensor_submultiplicative" + tag, i, g["ten"], _mul(g1, g2), exact=True)
            rec.compare("derandomized_square" + tag, i, g["sq"], _mul(g["sq_ref"], g2), exact=True)
            rec.compare("replacement_metric" + tag, i, g["rep"], _mul(c * (d2 + 1), g1, g2, g2), exact=True)
            rec.compare("balanced_metric" + tag, i, g["bal"], _mul(2 * c, g1, g2, g2), exact=True)


def _mul(*factors):
    if any(_is_inf(f) for f in factors):
        return math.inf
    out = Fraction(1)
    for f in factors:
        out *= Fraction(f)
    return out


def _cotype(cfg, rec):
    dim = 5 if cfg.p == 2 else 4
    for i in range(cfg.count):
        rng = _rng(cfg, i)
        n = int(rng.integers(3, 13))
        d = int(rng.integers(1, 5))
        G = random_regular(n, d, _seed(rng))
        # at m = 1 the average is the identity and the edge term cannot be bounded
        m = int(rng.integers(2, 9))
        x = rng.standard_normal((n, dim))
        res = check_cotype(normalized_adjacency(G), x, CotypeParams(cfg.p, cfg.q, cfg.K_p, m))
        rec.compare("cotype_displacement", i, res.displacement, res.rhs)
        rec.compare("cotype_edge_energy", i, res.edge_term, res.rhs)


def _calculus(cfg, rec):
    for i in range(cfg.count):
        rng = _rng(cfg, i)
        n = int(rng.integers(4, 41))
        d = int(rng.integers(2, 6))
        G = _expander(rng, n, [d, d + 1])
        # the average of one power is the identity, whose gamma_plus is infinite;
        # the decay estimate needs at least two powers
        m = int(rng.integers(2, 17))
        res = check_calculus_decay(G, m)
        rec.compare("calculus_decay", i, res.gamma_plus_cesaro, res.bound)
        A = normalized_adjacency(G)
        ev = eigenvalues_dense(A)[1:]
        mapped = max(abs(np.mean([mu**s for s in range(m)])) for mu in ev)
        measured = lambda_abs(cesaro_matrix(A.toarray(), m))
        rec.compare("cesaro_spectral_mapping", i, abs(measured - mapped), 0.0)


def _prelim(cfg, rec):
    kappa = 1
    for i in range(cfg.count):
        rng = _rng(cfg, i)
        n = int(rng.integers(3, 25))
        d = int(rng.integers(2, 6))
        G = _expander(rng, n, [d, d + 1])
        A = normalized_adjacency(G).toarray()
        gp = gamma_plus_euclid(A)
        g_double = gamma_euclid(bipartite_double(A))
        rec.compare("two_cover_upper", i, gp, 2 * g_double)
        rec.compare("two_cover_lower", i, 2 * g_double / (2 ** (kappa + 1) + 1), gp)
        m = int(rng.integers(1, 9))
        rec.compare(
            "two_cover_cesaro", i,
            gamma_euclid(bipartite_double(cesaro_matrix(A, m))),
            (2 ** (kappa + 2) + 1) * gamma_euclid(cesaro_matrix(bipartite_double(A).toarray(), m)),
        )
        B = bipartite_double_graph(G)
        rec.compare("bipartite_fold", i, gamma_plus_euclid(collapse_bipartite(B)), 2 * gamma_euclid(B))
        H = _expander(rng, 2 * n, [d])
        D_H = half_size_bipartite(H).degree
        rec.compare(
            "half_size", i, gamma_plus_euclid(half_size(H)), 2 ** (kappa + 1) * D_H / H.degree * gamma_euclid(H)
        )
        d = G.degree
        D = int(rng.integers(d, 4 * d + 1))
        C = edge_completion(G, D)
        rec.compare("edge_completion_gamma", i, gamma_euclid(C), 2 * gamma_euclid(G))
        rec.compare("edge_completion_gamma_plus", i, gamma_plus_euclid(C), 2 * gp)


def _base_arith(cfg, rec):
    p = base_graph.HeatParams.from_tau(Fraction(1, 4), 4)
    rec.compare("heat_weights_match", 0, int(p.weights != (81, 27, 9, 3, 1)), 0, exact=True)
    rec.compare("heat_degree_is_inverse_sigma", 0, abs(Fraction(base_graph.heat_degree(p)) - 1 / p.sigma_exact), 0, exact=True)
    grid = _tau_grid(cfg.count)
    for i, (t, n) in enumerate(grid):
        res = base_graph.tau_estimates_check(t, n)
        rec.compare("tau_estimates_mass_lower", i, 1.0 / 3.0, res.useful1_lower)
        rec.compare("tau_estimates_mass_upper", i, res.useful1_upper, 1.0)
        rec.compare("tau_estimates_parity", i, 1.0 / 18.0, min(res.useful2_even, res.useful2_odd))
    for i, (code, t) in enumerate(
        [(codes.repetition_code(8), 0.2), (codes.extended_hamming_code(), 0.3), (codes.single_parity_check_code(10), 0.1)]
    ):
        params = base_graph.HeatParams(t, code.n)
        total = sum(base_graph.syndrome_weights(params, code))
        rec.compare("quotient_conservation", i, abs(total - base_graph.heat_degree(params)), 0, exact=True)


def _tau_grid(count: int) -> list[tuple[float, int]]:
    """Points with t in (0, 1/4), n >= 8000 and tau >= 1 / (3 sqrt n)."""
    pts = []
    for n in (8000, 12000, 20000, 50000):
        for t in (0.01, 0.03, 0.06, 0.12, 0.2):
            tau = -math.expm1(-t) / 2
            if tau >= 1 / (3 * math.sqrt(n)):
                pts.append((t, n))
    return pts[: max(count, 1)]


def _pipeline_toy(cfg, rec):
    from .pipeline import PipelineConfig, initial_iteration

    G0 = random_expander(32, 4, cfg.seed)
    _, trace = initial_iteration(PipelineConfig(G0, 2, j_max=min(cfg.count + 1, 3), seed=cfg.seed))
    for step in trace.steps[1:]:
        rec.compare("initial_zigzag_stage", step.index, step.gamma_plus, step.zigzag_bound, exact=False)
        rec.compare("initial_chain", step.index, step.gamma_plus, step.chain_bound, exact=False)


_RUNNERS = {
    "products-euclid": _products_euclid,
    "products-oracle": _products_oracle,
    "cotype": _cotype,
    "calculus": _calculus,
    "prelim-lemmas": _prelim,
    "base-arith": _base_arith,
    "pipeline-toy": _pipeline_toy,
}


def run_verify(cfg: VerifySuiteConfig) -> dict:
    """Run one suite.  ``report["passed"]`` is true iff every comparison passed."""
    rec = _Recorder(cfg)
    _RUNNERS[cfg.suite](cfg, rec)
    failures = [asdict(r) for r in rec.rows if not r.passed]
    finite = [r.slack for r in rec.rows if not math.isinf(r.slack)]
    return {
        "suite": cfg.suite,
        "config": asdict(cfg),
        "comparisons": len(rec.rows),
        "passed": not failures,
        "min_slack": min(finite) if finite else None,
        "failures": failures,
        "rows": [asdict(r) for r in rec.rows],
    }


def summary_table(report: dict) -> str:
    by_check: dict[str, list] = {}
    for row in report["rows"]:
        by_check.setdefault(row["check"], []).append(row)
    width = max([len(c) for c in by_check] + [5])
    lines = [f"{'check':<{width}}  {'n':>4}  {'fail':>4}  min slack"]
    for check, rows in by_check.items():
        slacks = [r["slack"] for r in rows if not math.isinf(r["slack"])]
        low = f"{min(slacks):.3e}" if slacks else "inf"
        lines.append(f"{check:<{width}}  {len(rows):>4}  {sum(not r['passed'] for r in rows):>4}  {low}")
    lines.append(f"suite {report['suite']}: {'PASS' if report['passed'] else 'FAIL'}")
    for f in report["failures"][:10]:
        lines.append(f"  reproduce: --suite {report['suite']} --seed {f['seed'][0]} (instance {f['instance']}, {f['check']})")
    return "\n".join(lines) + "\n"
