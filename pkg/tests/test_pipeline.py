import pytest

from superexpander.errors import InfeasibleSchedule
from superexpander.graph_core import (
    cycle,
    cycle_with_loops,
    graph_power,
    identity_graph,
    is_connected,
    random_expander,
    random_regular,
)
from superexpander.pipeline import (
    PipelineConfig,
    cesaro_parameter,
    initial_iteration,
    main_iteration_bookkeeping,
    main_iteration_build,
    three_regularize,
    three_regularize_traced,
)
from superexpander.spectral import gamma_plus_euclid

SIZES = {h: [2 ** (j + 3) for j in range(1, 30)] for h in (1, 2, 3)}
ALL_TWO = {1: 2, 2: 2, 3: 2}


def test_cesaro_parameter():
    assert cesaro_parameter(1) == 2
    assert cesaro_parameter(2) == 256
    assert cesaro_parameter(3) == 54**3
    assert cesaro_parameter(2, {2: 5}) == 5
    with pytest.raises(InfeasibleSchedule):
        cesaro_parameter(2, {2: 1})
    with pytest.raises(ValueError):
        cesaro_parameter(0)


def test_schedule_example():
    s = main_iteration_bookkeeping([3, 4, 5], SIZES, 2, ALL_TWO)
    # thresholds: 2*9 + 2*5^2 = 68 for h = 2 and 2*9 + 2*4^2 = 50 for h = 1
    assert (s.j, s.start_vertices, s.start_degree) == (4, 128, 4)
    assert s.h_sequence == [2, 1]
    (step,) = s.steps
    assert (step.h, step.j, step.completion_degree, step.cesaro) == (1, 3, 64, 2)
    assert (s.final_degree, s.final_vertices) == (18, 8192)
    assert s.overridden == (1, 2, 3)


def test_schedule_k1_is_empty():
    s = main_iteration_bookkeeping([3, 4], SIZES, 1, {2: 2})
    assert s.length == 0 and s.final_vertices == 64 and s.final_degree == 3


def test_schedule_without_overrides_is_infeasible():
    with pytest.raises(InfeasibleSchedule, match="bit"):
        main_iteration_bookkeeping([3, 4, 5], SIZES, 2)


def test_schedule_rejects_non_increasing_sizes():
    sizes = {h: [8, 8, 8] for h in (1, 2, 3)}
    with pytest.raises(InfeasibleSchedule):
        main_iteration_bookkeeping([3, 4, 5], sizes, 2, ALL_TWO)


def test_schedule_accepts_callables():
    s = main_iteration_bookkeeping(lambda h: h + 2, lambda j, h: 2 ** (j + 3), 2, ALL_TWO)
    assert s.to_dict() == main_iteration_bookkeeping([3, 4, 5], SIZES, 2, ALL_TWO).to_dict()


def test_main_iteration_build_small():
    s = main_iteration_bookkeeping([3, 4, 5], SIZES, 2, ALL_TWO)
    degrees = {1: 3, 2: 4}

    def supplier(j, h):
        return random_expander(2 ** (j + 3), degrees[h], seed=j + 10 * h)

    W, trace = main_iteration_build(s, supplier)
    assert (W.n, W.degree) == (8192, 18)
    assert all(step["crude_holds"] for step in trace["steps"])
    assert trace["notes"] == ["M_1 overridden", "M_2 overridden", "M_3 overridden"]


def test_main_iteration_build_checks_supplier():
    s = main_iteration_bookkeeping([3, 4, 5], SIZES, 2, ALL_TWO)
    with pytest.raises(InfeasibleSchedule):
        main_iteration_build(s, lambda j, h: random_regular(16, 4, 0))


def test_initial_iteration_small():
    G0 = random_expander(20, 3, seed=1)
    graphs, trace = initial_iteration(PipelineConfig(G0, t=2, j_max=3))
    assert [(F.n, F.degree) for F in graphs] == [(20, 9), (400, 9), (8000, 9)]
    assert trace.chain_holds
    for step in trace.steps[1:]:
        assert step.gamma_plus <= step.chain_bound
        assert step.gamma_plus <= step.zigzag_bound * (1 + 1e-7)
    d = trace.to_dict()
    assert d["chain_holds"] and len(d["steps"]) == 3


def test_initial_iteration_t1_smoke():
    G0 = random_expander(12, 3, seed=2)
    graphs, trace = initial_iteration(PipelineConfig(G0, t=1, j_max=2))
    assert graphs[-1].n == 144
    assert trace.steps[1].chain_bound == float("inf")
    assert trace.notes


def test_initial_iteration_without_spectra():
    G0 = random_expander(20, 3, seed=1)
    _, trace = initial_iteration(PipelineConfig(G0, t=2, j_max=2, spectral=False))
    assert all(s.gamma_plus is None for s in trace.steps)
    assert trace.chain_holds


def test_pipeline_config_validation():
    G0 = random_expander(12, 3, seed=0)
    with pytest.raises(InfeasibleSchedule):
        PipelineConfig(G0, t=2)
    with pytest.raises(ValueError):
        PipelineConfig(G0, t=0)
    with pytest.raises(ValueError):
        PipelineConfig(G0, t=1, labeling="other")


def test_random_labeling_is_deterministic():
    G0 = random_expander(20, 3, seed=1)
    cfg = PipelineConfig(G0, t=2, j_max=2, labeling="random", seed=5, spectral=False)
    assert initial_iteration(cfg)[0][-1] == initial_iteration(cfg)[0][-1]


@pytest.mark.parametrize("d", [3, 4, 6])
def test_three_regularize(d):
    H = random_expander(10, d, seed=d)
    out = three_regularize(H)
    assert (out.n, out.degree) == (9 * d * 10, 3)
    assert is_connected(out)


def test_three_regularize_precompletes_small_degree():
    r = three_regularize_traced(cycle(6))
    assert r.precompleted and r.graph.degree == 3 and r.graph.n == 9 * 3 * 6
    r = three_regularize_traced(identity_graph(4))
    assert r.precompleted and r.graph.n == 9 * 3 * 4


def test_three_regularize_chain():
    r = three_regularize_traced(random_expander(12, 4, seed=3))
    assert r.connected and r.chain_holds
    assert r.to_dict()["degree"] == 3


@pytest.mark.parametrize("d", [3, 5, 8, 12])
def test_cycle_with_loops_bound(d):
    assert gamma_plus_euclid(cycle_with_loops(d)) <= 12 * d * d


def test_graph_power_of_cycle_loops_is_connected():
    assert is_connected(graph_power(cycle_with_loops(5), 3))
