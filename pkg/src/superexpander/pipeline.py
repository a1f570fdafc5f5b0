"""Iterative constructions: the initial zigzag iteration, the main iteration
schedule, and the final reduction to degree 3.

Every stage records the Euclidean absolute spectral gap of the graphs it
builds, together with the chain of sub-multiplicativity bounds that the
construction relies on.  Construction never aborts because an eigensolver
failed; the affected fields are left as ``None``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Mapping

from .errors import InfeasibleSchedule, NoConvergence, TooLarge
from .graph_core import (
    RegularMultigraph,
    cesaro_graph,
    cycle,
    cycle_with_loops,
    edge_completion,
    is_connected,
)
from .products import default_labeling, random_labeling, replacement, zigzag
from .spectral import spectral_report

CHAIN_TOL = 1e-7
LABELINGS = ("default", "random")
# comparisons against numbers with more bits than this are refused
MAX_THRESHOLD_BITS = 10**6


def _spectrum(G: RegularMultigraph, seed: int) -> dict:
    try:
        rep = spectral_report(G, seed=seed)
    except (NoConvergence, TooLarge):
        return {"lambda_abs": None, "gamma_plus": None, "residual": None, "method": "unavailable"}
    return {
        "lambda_abs": rep.lambda_abs,
        "gamma_plus": rep.gamma_plus_euclid,
        "residual": rep.residual,
        "method": rep.method,
    }


def _product(*factors):
    if any(f is None for f in factors):
        return None
    out = 1.0
    for f in factors:
        out *= f
    return out


def _below(value, bound) -> bool | None:
    if value is None or bound is None:
        return None
    if math.isinf(bound):
        return True
    return value <= bound * (1 + CHAIN_TOL) + CHAIN_TOL


def _labeling(policy: str, G1, G2, seed: int):
    if policy == "default":
        return default_labeling(G1, G2)
    return random_labeling(G1, G2, seed)


def _jsonable(obj):
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


# --------------------------------------------------------------------------- initial iteration


@dataclass(frozen=True)
class PipelineConfig:
    G0: RegularMultigraph
    t: int
    j_max: int = 3
    labeling: str = "default"
    seed: int = 0
    spectral: bool = True

    def __post_init__(self):
        if self.t < 1:
            raise ValueError("t must be at least 1")
        if self.j_max < 1:
            raise ValueError("j_max must be at least 1")
        if self.labeling not in LABELINGS:
            raise ValueError(f"labeling must be one of {LABELINGS}")
        m, d = self.G0.n, self.G0.degree
        if self.t * d ** (2 * (self.t - 1)) > m:
            raise InfeasibleSchedule(
                f"t * d^(2(t-1)) = {self.t * d ** (2 * (self.t - 1))} exceeds m = {m}"
            )

    @property
    def m(self) -> int:
        return self.G0.n

    @property
    def d(self) -> int:
        return self.G0.degree


@dataclass
class StepRecord:
    index: int
    vertices: int
    degree: int
    lambda_abs: float | None
    gamma_plus: float | None
    residual: float | None
    method: str
    gamma_plus_cesaro: float | None = None
    gamma_plus_completion: float | None = None
    zigzag_bound: float | None = None
    chain_bound: float | None = None
    chain_holds: bool | None = None


@dataclass
class IterationTrace:
    steps: list = field(default_factory=list)
    gamma_plus_base: float | None = None
    notes: list = field(default_factory=list)

    @property
    def chain_holds(self) -> bool:
        return all(s.chain_holds is not False for s in self.steps)

    def to_dict(self) -> dict:
        return _jsonable(
            {
                "steps": [asdict(s) for s in self.steps],
                "gamma_plus_base": self.gamma_plus_base,
                "notes": list(self.notes),
                "chain_holds": self.chain_holds,
            }
        )


def initial_iteration(cfg: PipelineConfig) -> tuple[list[RegularMultigraph], IterationTrace]:
    """``F_1 = C_{d^2}(G0)`` and ``F_{j+1} = C_m(A_t(F_j)) zigzag G0``.

    Each ``F_j`` has ``m^j`` vertices and degree ``d^2``.  The trace checks
    ``gamma_plus(F_{j+1}) <= 2 gamma_plus(A_t(F_j)) gamma_plus(G0)^2`` and the
    intermediate zigzag bound through the completed graph.
    """
    G0, m, d, t = cfg.G0, cfg.m, cfg.d, cfg.t
    trace = IterationTrace()
    base = _spectrum(G0, cfg.seed) if cfg.spectral else None
    trace.gamma_plus_base = base["gamma_plus"] if base else None
    F = edge_completion(G0, d * d)
    graphs = [F]
    trace.steps.append(_record(1, F, cfg))
    for j in range(1, cfg.j_max):
        averaged = cesaro_graph(F, t)
        completed = edge_completion(averaged, m)
        F = zigzag(completed, G0, _labeling(cfg.labeling, completed, G0, cfg.seed + j))
        if F.n != m ** (j + 1) or F.degree != d * d:
            raise AssertionError("size accounting broke")
        graphs.append(F)
        rec = _record(j + 1, F, cfg)
        if cfg.spectral:
            g_avg = _spectrum(averaged, cfg.seed)["gamma_plus"]
            g_comp = _spectrum(completed, cfg.seed)["gamma_plus"]
            g0 = trace.gamma_plus_base
            rec.gamma_plus_cesaro = g_avg
            rec.gamma_plus_completion = g_comp
            rec.zigzag_bound = _product(g_comp, g0, g0)
            rec.chain_bound = _product(2.0, g_avg, g0, g0)
            rec.chain_holds = (
                None
                if rec.gamma_plus is None or rec.chain_bound is None
                else bool(_below(rec.gamma_plus, rec.zigzag_bound) and _below(rec.gamma_plus, rec.chain_bound))
            )
        trace.steps.append(rec)
    if t == 1:
        trace.notes.append("t = 1: every averaged graph is the identity, so the chain bounds are infinite")
    return graphs, trace


def _record(index: int, G: RegularMultigraph, cfg) -> StepRecord:
    spectrum = _spectrum(G, cfg.seed) if cfg.spectral else {
        "lambda_abs": None, "gamma_plus": None, "residual": None, "method": "skipped"
    }
    return StepRecord(
        index, G.n, G.degree, spectrum["lambda_abs"], spectrum["gamma_plus"], spectrum["residual"], spectrum["method"]
    )


# --------------------------------------------------------------------------- main iteration


def cesaro_parameter(k: int, overrides: Mapping[int, int] | None = None) -> int:
    """``(2 k^3)^k`` unless overridden."""
    if k < 1:
        raise ValueError("k must be positive")
    if overrides and k in overrides:
        M = int(overrides[k])
        if M < 2:
            raise InfeasibleSchedule(f"override M_{k} = {M} must be at least 2")
        return M
    return (2 * k**3) ** k


def _as_degree_function(degrees) -> Callable[[int], int]:
    if callable(degrees):
        return degrees
    if isinstance(degrees, Mapping):
        return lambda k: degrees[k]
    seq = list(degrees)
    return lambda k: seq[k - 1]


def _as_size_function(sizes) -> tuple[Callable[[int, int], int], Callable[[int], int]]:
    """``(n(j, k), largest j to search)``; tables map k to ``[n_1(k), n_2(k), ...]``."""
    if callable(sizes):
        return sizes, lambda k: 64
    return (lambda j, k: sizes[k][j - 1]), (lambda k: len(sizes[k]))


def _describe(value: int) -> str:
    return str(value) if value.bit_length() < 256 else f"a {value.bit_length()}-bit number"


def _walk_degree(M: int, d: int) -> int:
    """Degree ``M d^(2(M-1))`` of the Cesaro average of a graph with degree ``d^2``."""
    if (2 * (M - 1)) * math.log2(max(d, 2)) > MAX_THRESHOLD_BITS:
        raise InfeasibleSchedule(
            f"M = {M} with degree {d} gives a threshold beyond {MAX_THRESHOLD_BITS} bits; supply an override"
        )
    return M * d ** (2 * (M - 1))


@dataclass(frozen=True)
class ScheduleStep:
    h: int
    j: int
    completion_degree: int
    cesaro: int
    degree: int
    vertices: int


@dataclass(frozen=True)
class Schedule:
    k: int
    j: int
    start_vertices: int
    start_degree: int
    steps: tuple
    cesaro_values: dict
    overridden: tuple

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def h_sequence(self) -> list[int]:
        return [self.k] + [s.h for s in self.steps]

    @property
    def final_degree(self) -> int:
        return self.steps[-1].degree if self.steps else self.start_degree

    @property
    def final_vertices(self) -> int:
        return self.steps[-1].vertices if self.steps else self.start_vertices

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "j": self.j,
            "start_vertices": self.start_vertices,
            "start_degree": self.start_degree,
            "steps": [asdict(s) for s in self.steps],
            "h": self.h_sequence,
            "cesaro_values": {str(k): v for k, v in self.cesaro_values.items()},
            "overridden": list(self.overridden),
        }


def main_iteration_bookkeeping(degrees, sizes, k: int, M_override: Mapping[int, int] | None = None) -> Schedule:
    """Plan the main iteration for index ``k`` without building graphs.

    ``j(h)`` is the first ``j`` with ``n_j(h) > 2 d_1^2 + M_{h+1} d_{h+1}^(2(M_{h+1}-1))``.
    Starting from ``h_0 = k`` each step picks the smallest ``h`` whose graph
    ``F_{j(h)}(h)`` has at least as many vertices as the current degree, and
    the chosen ``h`` must strictly decrease until it reaches 1.
    """
    if k < 1:
        raise ValueError("k must be positive")
    deg = _as_degree_function(degrees)
    size, j_limit = _as_size_function(sizes)
    overrides = dict(M_override or {})
    cesaro_values: dict[int, int] = {}

    def M(h):
        if h not in cesaro_values:
            cesaro_values[h] = cesaro_parameter(h, overrides)
        return cesaro_values[h]

    chosen_j: dict[int, int] = {}

    def j_of(h):
        if h in chosen_j:
            return chosen_j[h]
        threshold = 2 * deg(1) ** 2 + _walk_degree(M(h + 1), deg(h + 1))
        previous = None
        for j in range(1, j_limit(h) + 1):
            n = size(j, h)
            if previous is not None and n <= previous:
                raise InfeasibleSchedule(f"sizes n_j({h}) are not strictly increasing")
            previous = n
            if n > threshold:
                chosen_j[h] = j
                return j
        raise InfeasibleSchedule(f"no n_j({h}) exceeds {_describe(threshold)}")

    def reach(h):
        return size(j_of(h), h)

    j_k = j_of(k)
    start_vertices = reach(k)
    steps = []
    current_h, current_degree, vertices = k, deg(k), start_vertices
    while current_h > 1:
        h = next((c for c in range(1, current_h) if reach(c) >= current_degree), None)
        if h is None:
            raise InfeasibleSchedule(
                f"no h < {current_h} has a graph with at least {_describe(current_degree)} vertices"
            )
        completion = reach(h)
        Mh = M(h)
        new_degree = _walk_degree(Mh, deg(h))
        vertices *= completion
        steps.append(ScheduleStep(h, j_of(h), completion, Mh, new_degree, vertices))
        current_h, current_degree = h, new_degree
    if len(steps) > k:
        raise AssertionError("schedule longer than k")
    return Schedule(
        k=k,
        j=j_k,
        start_vertices=start_vertices,
        start_degree=deg(k),
        steps=tuple(steps),
        cesaro_values=dict(sorted(cesaro_values.items())),
        overridden=tuple(sorted(h for h in overrides if h in cesaro_values)),
    )


@dataclass
class MainStepRecord:
    h: int
    vertices: int
    degree: int
    gamma_plus_previous: float | None
    gamma_plus_partner: float | None
    gamma_plus: float | None
    crude_bound: float | None
    crude_holds: bool | None


def main_iteration_build(
    schedule: Schedule,
    supplier: Callable[[int, int], RegularMultigraph],
    *,
    labeling: str = "default",
    seed: int = 0,
    spectral: bool = True,
    calculus_constant: float = 2.0,
) -> tuple[RegularMultigraph, dict]:
    """Run ``W^i = A_M(C_n(W^(i-1)) zigzag F_(j(h))(h))`` along the schedule.

    ``calculus_constant`` is the factor in ``gamma_plus(A_M(G)) <= c gamma_plus(G)``;
    for the Euclidean kernel and ``M >= 2`` it may be taken to be 2.  The
    trace checks ``gamma_plus(W^i) <= 2 c gamma_plus(W^(i-1)) gamma_plus(F)^2``.
    """
    if labeling not in LABELINGS:
        raise ValueError(f"labeling must be one of {LABELINGS}")
    cache: dict[tuple[int, int], RegularMultigraph] = {}

    def graph(j, h):
        if (j, h) not in cache:
            cache[(j, h)] = supplier(j, h)
        return cache[(j, h)]

    W = graph(schedule.j, schedule.k)
    if W.n != schedule.start_vertices or W.degree != schedule.start_degree:
        raise InfeasibleSchedule("the supplied starting graph does not match the schedule")
    g_prev = _spectrum(W, seed)["gamma_plus"] if spectral else None
    records = []
    for i, step in enumerate(schedule.steps, start=1):
        partner = graph(step.j, step.h)
        if partner.n != step.completion_degree:
            raise InfeasibleSchedule(f"F_{step.j}({step.h}) has {partner.n} vertices, expected {step.completion_degree}")
        completed = edge_completion(W, step.completion_degree)
        Z = zigzag(completed, partner, _labeling(labeling, completed, partner, seed + i))
        W = cesaro_graph(Z, step.cesaro)
        if W.n != step.vertices or W.degree != step.degree:
            raise AssertionError("size accounting broke")
        if spectral:
            g_partner = _spectrum(partner, seed)["gamma_plus"]
            g_new = _spectrum(W, seed)["gamma_plus"]
            bound = _product(2 * calculus_constant, g_prev, g_partner, g_partner)
            holds = _below(g_new, bound)
        else:
            g_partner = g_new = bound = holds = None
        records.append(MainStepRecord(step.h, W.n, W.degree, g_prev, g_partner, g_new, bound, holds))
        g_prev = g_new
    trace = {
        "schedule": schedule.to_dict(),
        "gamma_plus_start": records[0].gamma_plus_previous if records else g_prev,
        "steps": [asdict(r) for r in records],
        "notes": [f"M_{h} overridden" for h in schedule.overridden],
    }
    return W, _jsonable(trace)


# --------------------------------------------------------------------------- degree 3


@dataclass
class RegularizationResult:
    graph: RegularMultigraph
    precompleted: bool
    connected: bool | None
    gamma_plus_input: float | None = None
    gamma_plus_cycle_loops: float | None = None
    gamma_plus_nine_cycle: float | None = None
    gamma_plus: float | None = None
    lambda_abs: float | None = None
    residual: float | None = None
    chain_bound: float | None = None
    chain_holds: bool | None = None

    def to_dict(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if k != "graph"}
        out["vertices"] = self.graph.n
        out["degree"] = self.graph.degree
        return _jsonable(out)


def three_regularize(H: RegularMultigraph, labeling=None) -> RegularMultigraph:
    """``(H zigzag C_d^loops) replacement C_9``: degree 3 on ``9 d |V(H)|`` vertices.

    Graphs of degree 1 or 2 are first completed to degree 3.
    """
    return _three_regularize(H, labeling)[0]


def _three_regularize(H, labeling):
    precompleted = H.degree < 3
    if precompleted:
        H = edge_completion(H, 3)
    d = H.degree
    small = cycle_with_loops(d)
    Z = zigzag(H, small, labeling)
    return replacement(Z, cycle(9)), precompleted, H, small


def three_regularize_traced(
    H: RegularMultigraph, *, labeling=None, seed: int = 0, spectral: bool = True
) -> RegularizationResult:
    """:func:`three_regularize` plus connectivity and the bound
    ``gamma_plus(out) <= 9 gamma_plus(H) gamma_plus(C_d^loops)^2 gamma_plus(C_9)^2``."""
    out, precompleted, H_used, small = _three_regularize(H, labeling)
    connected = is_connected(out)
    if is_connected(H) and not connected:
        raise AssertionError("degree reduction disconnected a connected graph")
    result = RegularizationResult(out, precompleted, connected)
    if spectral:
        result.gamma_plus_input = _spectrum(H_used, seed)["gamma_plus"]
        result.gamma_plus_cycle_loops = _spectrum(small, seed)["gamma_plus"]
        result.gamma_plus_nine_cycle = _spectrum(cycle(9), seed)["gamma_plus"]
        spectrum = _spectrum(out, seed)
        result.gamma_plus = spectrum["gamma_plus"]
        result.lambda_abs = spectrum["lambda_abs"]
        result.residual = spectrum["residual"]
        g_small, g_nine = result.gamma_plus_cycle_loops, result.gamma_plus_nine_cycle
        result.chain_bound = _product(9.0, result.gamma_plus_input, g_small, g_small, g_nine, g_nine)
        result.chain_holds = _below(result.gamma_plus, result.chain_bound)
    return result
