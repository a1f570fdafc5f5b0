"""Command-line interface.

Commands that produce a graph write an edge list (see :mod:`superexpander.io`)
with ``--format text`` and a JSON report holding the edges with
``--format json``; graph inputs may be either.  Exit codes: 0 success,
1 verification failure, 2 usage error, 3 resource or overflow error.

The thread count for BLAS and OpenMP pools is read from ``SUPEREXPANDER_THREADS``.
"""

from __future__ import annotations

import functools
import os
import sys
from fractions import Fraction
from pathlib import Path

import click
import numpy as np
from threadpoolctl import threadpool_limits

from . import graph_core as gc
from . import products
from .base_graph import HeatParams, heat_degree, heat_graph, quotient_heat_graph, tau_estimates_check
from .codes import dual, extended_hamming_code, random_code, read_code, repetition_code, single_parity_check_code, write_code
from .errors import (
    CapExceeded,
    HypothesisViolation,
    MultiplicityOverflow,
    NoConvergence,
    ParseError,
    PrecisionError,
    TooLarge,
)
from .io import format_edge_list, load_report, parse_edge_list, report_json, report_text
from .pipeline import (
    PipelineConfig,
    initial_iteration,
    main_iteration_bookkeeping,
    three_regularize_traced,
)
from .poincare import (
    CotypeParams,
    EuclidSq,
    FiniteMetric,
    LpPower,
    check_cotype,
    gamma_bruteforce,
    gamma_plus_bruteforce,
    gamma_plus_search,
    nondecay_experiment,
)
from .spectral import spectral_report
from .verify import SUITES, VerifySuiteConfig, run_verify, summary_table

THREADS_ENV = "SUPEREXPANDER_THREADS"
SEED = click.IntRange(0, 2**64 - 1)
RESOURCE_ERRORS = (TooLarge, MultiplicityOverflow, CapExceeded, NoConvergence, PrecisionError, MemoryError,
                   OverflowError)


class _Group(click.Group):
    """Maps library exceptions onto exit codes 2 and 3."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (click.exceptions.Exit, click.ClickException, click.Abort):
            raise
        except RESOURCE_ERRORS as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(3)
        except (ValueError, KeyError, FileNotFoundError) as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(2)


def common(func):
    """``--seed``, ``--out`` and ``--format`` for every subcommand."""

    @click.option("--seed", type=SEED, default=0, show_default=True, help="Seed for all randomness.")
    @click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None,
                  help="Output file (default: stdout).")
    @click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json", show_default=True)
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        return func(*args, **kwargs)

    return wrapper


def _write(text: str, out) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text)


def _emit(kind: str, payload: dict, fmt: str, out) -> None:
    _write(report_json(kind, payload) if fmt == "json" else report_text(payload), out)


def _emit_graph(G: gc.RegularMultigraph, fmt: str, out, **extra) -> None:
    if fmt == "text":
        _write(format_edge_list(G), out)
    else:
        _emit("graph", {"n": G.n, "degree": G.degree, "edges": G.edges(), **extra}, fmt, out)


def _load(path) -> gc.RegularMultigraph:
    """Edge-list file, or a JSON graph report written by another subcommand."""
    text = Path(path).read_text()
    if not text.lstrip().startswith("{"):
        return parse_edge_list(text)
    data = load_report(text)
    if data.get("kind") != "graph":
        raise ParseError(f"{path} holds a {data.get('kind')!r} report, not a graph")
    G = gc.build_graph(data["n"], [tuple(e) for e in data["edges"]])
    if G.degree != data["degree"]:
        raise ParseError(f"{path}: recorded degree {data['degree']} but edges give {G.degree}")
    return G


@click.group(cls=_Group)
@click.version_option(package_name="superexpander")
def main():
    """Build expander graphs and check nonlinear spectral-gap inequalities."""
    threads = os.environ.get(THREADS_ENV)
    if threads:
        limiter = threadpool_limits(int(threads))
        click.get_current_context().call_on_close(limiter.restore_original_limits)


# --------------------------------------------------------------------------- graphs


BUILDERS = ("cycle", "cycle-loops", "complete-loops", "identity", "random", "random-simple", "expander")


@main.command()
@click.option("--kind", type=click.Choice(BUILDERS), required=True)
@click.option("--n", "n", type=click.IntRange(1), required=True, help="Number of vertices.")
@click.option("--d", "d", type=click.IntRange(1), default=None, help="Degree (random kinds); loops for identity.")
@common
def build(kind, n, d, seed, out, fmt):
    """Generate a standard or random regular multigraph."""
    if kind == "cycle":
        G = gc.cycle(n)
    elif kind == "cycle-loops":
        G = gc.cycle_with_loops(n)
    elif kind == "complete-loops":
        G = gc.complete_with_loops(n)
    elif kind == "identity":
        G = gc.identity_graph(n, d or 1)
    else:
        if d is None:
            raise click.UsageError(f"--d is required for --kind {kind}")
        if kind == "random":
            G = gc.random_regular(n, d, seed)
        elif kind == "random-simple":
            G = gc.random_simple_regular(n, d, seed)
        else:
            try:
                G = gc.random_expander(n, d, seed)
            except RuntimeError as exc:
                raise ValueError(str(exc)) from None
    _emit_graph(G, fmt, out)


PRODUCTS = {
    "zigzag": products.zigzag,
    "replacement": products.replacement,
    "balanced": products.balanced_replacement,
    "square": products.derandomized_square,
}


@main.command()
@click.argument("kind", type=click.Choice([*PRODUCTS, "tensor"]))
@click.argument("first", type=click.Path(exists=True, dir_okay=False))
@click.argument("second", type=click.Path(exists=True, dir_okay=False))
@click.option("--labeling", type=click.Choice(["canonical", "random"]), default="canonical", show_default=True)
@common
def product(kind, first, second, labeling, seed, out, fmt):
    """Combine two graphs; the second must have as many vertices as the first's degree."""
    G1, G2 = _load(first), _load(second)
    if kind == "tensor":
        G = products.tensor_graph(G1, G2)
    else:
        L = products.random_labeling(G1, G2, seed) if labeling == "random" else None
        G = PRODUCTS[kind](G1, G2, L)
    _emit_graph(G, fmt, out)


@main.command()
@click.argument("graph", type=click.Path(exists=True, dir_okay=False))
@click.option("--t", "t", type=click.IntRange(1), required=True, help="Walk length.")
@common
def power(graph, t, seed, out, fmt):
    """Walks of length t as edges."""
    _emit_graph(gc.graph_power(_load(graph), t), fmt, out)


@main.command()
@click.argument("graph", type=click.Path(exists=True, dir_okay=False))
@click.option("--m", "m", type=click.IntRange(1), required=True, help="Number of averaged powers.")
@common
def cesaro(graph, m, seed, out, fmt):
    """Integer graph of the Cesaro average of the first m powers."""
    _emit_graph(gc.cesaro_graph(_load(graph), m), fmt, out)


@main.command()
@click.argument("graph", type=click.Path(exists=True, dir_okay=False))
@click.option("--degree", type=click.IntRange(1), required=True, help="Target degree D.")
@common
def complete(graph, degree, seed, out, fmt):
    """Raise the degree to D by duplicating edges and adding loops."""
    _emit_graph(gc.edge_completion(_load(graph), degree), fmt, out)


@main.command()
@click.argument("graph", type=click.Path(exists=True, dir_okay=False))
@click.option("--method", type=click.Choice(["auto", "dense", "iterative", "power"]), default="auto",
              show_default=True)
@common
def spectrum(graph, method, seed, out, fmt):
    """Second and absolute eigenvalues with the Euclidean Poincare constants."""
    G = _load(graph)
    report = spectral_report(gc.normalized_adjacency(G), method=method, seed=seed).to_dict()
    report["degree"] = G.degree
    _emit("spectrum", report, fmt, out)


# --------------------------------------------------------------------------- inequalities


KERNELS = ("euclid", "lp", "two-point", "path")


def _kernel(name, p, points, dim):
    if name == "euclid":
        return EuclidSq(dim)
    if name == "lp":
        return LpPower(dim or 1, p)
    if name == "two-point":
        return FiniteMetric.two_point(p)
    return FiniteMetric.path(points, p)


def _configuration(cfg) -> dict:
    return {"f": np.asarray(cfg.f).tolist(), "g": np.asarray(cfg.g).tolist()}


@main.command()
@click.argument("graph", type=click.Path(exists=True, dir_okay=False))
@click.option("--kernel", type=click.Choice(KERNELS), default="euclid", show_default=True)
@click.option("--p", "p", type=float, default=1.0, show_default=True, help="Power of the metric or l_p exponent.")
@click.option("--points", type=click.IntRange(2), default=3, show_default=True, help="Points of the path metric.")
@click.option("--dim", type=click.IntRange(1), default=None, help="Dimension for vector kernels.")
@click.option("--mode", type=click.Choice(["bruteforce", "search"]), default="search", show_default=True)
@click.option("--which", type=click.Choice(["gamma-plus", "gamma"]), default="gamma-plus", show_default=True)
@click.option("--budget", type=click.IntRange(1), default=1000, show_default=True, help="Search evaluations.")
@click.option("--cap", type=click.IntRange(1), default=10**7, show_default=True, help="Enumeration cap.")
@common
def poincare(graph, kernel, p, points, dim, mode, which, budget, cap, seed, out, fmt):
    """Poincare constant by exhaustive enumeration or a certified lower bound by search."""
    G = _load(graph)
    K = _kernel(kernel, p, points, dim)
    meta = {"kernel": kernel, "p": p, "mode": mode, "which": which}
    if mode == "bruteforce":
        if not isinstance(K, FiniteMetric):
            raise click.UsageError("bruteforce needs a finite metric kernel (two-point or path)")
        solver = gamma_plus_bruteforce if which == "gamma-plus" else gamma_bruteforce
        res = solver(G, K, cap, full=True)
        payload = {**meta, "value": res.value, "witness": _configuration(res.witness),
                   "evaluated": res.evaluated, "exact": K.integral}
    else:
        if which != "gamma-plus":
            raise click.UsageError("search only bounds gamma-plus")
        if isinstance(K, FiniteMetric):
            raise click.UsageError("search needs a vector kernel (euclid or lp)")
        value, witness = gamma_plus_search(gc.normalized_adjacency(G), K, budget=budget, seed=seed, dim=dim)
        payload = {**meta, "value": value, "witness": _configuration(witness), "budget": budget,
                   "lower_bound": True}
    _emit("poincare", payload, fmt, out)


@main.command()
@click.argument("graph", type=click.Path(exists=True, dir_okay=False))
@click.option("--p", "p", type=float, default=2.0, show_default=True)
@click.option("--q", "q", type=float, default=2.0, show_default=True)
@click.option("--K", "K_p", type=float, default=1.0, show_default=True, help="p-convexity constant of the target.")
@click.option("--m", "m", type=click.IntRange(1), default=2, show_default=True)
@click.option("--dim", type=click.IntRange(1), default=5, show_default=True)
@click.option("--count", type=click.IntRange(1), default=10, show_default=True, help="Random point sets to try.")
@common
def cotype(graph, p, q, K_p, m, dim, count, seed, out, fmt):
    """Metric Markov cotype inequality for random points in l_p^dim."""
    params = CotypeParams(p, q, K_p, m)
    A = gc.normalized_adjacency(_load(graph))
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(count):
        c = check_cotype(A, rng.standard_normal((A.order, dim)), params)
        rows.append({"instance": i, "holds": c.holds, "displacement": c.displacement,
                     "edge_term": c.edge_term, "rhs": c.rhs, "slack": c.slack})
    ok = all(r["holds"] for r in rows)
    _emit("cotype", {"p": p, "q": q, "K_p": K_p, "m": m, "dim": dim, "constant": params.constant,
                     "holds": ok, "instances": rows}, fmt, out)
    if not ok:
        sys.exit(1)


# --------------------------------------------------------------------------- codes and base graphs


@main.group()
def code():
    """Binary linear codes: "n D min_dist" header, then D rows of n bits."""


PRESETS = ("random", "repetition", "parity", "hamming8")


@code.command("gen")
@click.option("--preset", type=click.Choice(PRESETS), default="random", show_default=True)
@click.option("--n", "n", type=click.IntRange(1), default=10, show_default=True)
@click.option("--D", "D", type=click.IntRange(0), default=1, show_default=True, help="Dimension (random codes).")
@click.option("--min-dist", type=click.IntRange(1), default=1, show_default=True, help="Distance (random codes).")
@common
def code_gen(preset, n, D, min_dist, seed, out, fmt):
    """Generate a code with verified minimum distance."""
    if preset == "repetition":
        C = repetition_code(n)
    elif preset == "parity":
        C = single_parity_check_code(n)
    elif preset == "hamming8":
        C = extended_hamming_code()
    else:
        C = random_code(n, D, min_dist, seed)
    _emit_code(C, fmt, out)


def _emit_code(C, fmt, out):
    if fmt == "text":
        _write(write_code(C), out)
    else:
        _emit("code", {"n": C.n, "dimension": C.dimension, "min_distance": C.min_distance,
                       "generator": C.generator.tolist(), "meets_tenth_thresholds": C.meets_tenth_thresholds},
              fmt, out)


@code.command("verify")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@common
def code_verify(path, seed, out, fmt):
    """Check that the recorded minimum distance matches the generator."""
    C = read_code(Path(path).read_text(), verify=False)
    actual = C.verified(C.generator).min_distance
    ok = actual == C.min_distance
    _emit("code-verify", {"n": C.n, "dimension": C.dimension, "recorded": C.min_distance,
                          "computed": actual, "holds": ok}, fmt, out)
    if not ok:
        sys.exit(1)


@code.command("dual")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@common
def code_dual(path, seed, out, fmt):
    """Dual code (the orthogonal complement)."""
    _emit_code(dual(read_code(Path(path).read_text())), fmt, out)


def _fraction(ctx, param, value):
    if value is None:
        return None
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter(f"{value!r} is not a rational number") from None


@main.command("base-graph")
@click.option("--t", "t", type=float, default=None, help="Heat time.")
@click.option("--tau", type=str, default=None, callback=_fraction, help="Exact tau such as 1/4 (instead of --t).")
@click.option("--n", "n", type=click.IntRange(1), required=True, help="Hypercube dimension.")
@click.option("--code", "code_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Quotient by the dual of this code.")
@click.option("--graph", "graph_out", type=click.Path(dir_okay=False, writable=True), default=None,
              help="Write the edge list here.")
@common
def base_graph(t, tau, n, code_path, graph_out, seed, out, fmt):
    """Discretized heat graph on the hypercube, optionally quotiented by a code."""
    if (t is None) == (tau is None):
        raise click.UsageError("give exactly one of --t and --tau")
    params = HeatParams.from_tau(tau, n) if tau is not None else HeatParams(t, n)
    payload = {"t": params.t, "n": n, "tau": params.tau, "sigma": params.sigma, "degree": heat_degree(params),
               "weights": list(params.weights)}
    if code_path is not None:
        C = read_code(Path(code_path).read_text())
        G = quotient_heat_graph(params, C)
        payload["code"] = {"n": C.n, "dimension": C.dimension, "min_distance": C.min_distance}
    else:
        G = heat_graph(params)
    payload.update(vertices=G.n, graph_degree=G.degree)
    try:
        payload["bounds_check"] = tau_estimates_check(params.t, n).__dict__
    except HypothesisViolation as exc:
        payload["bounds_check"] = {"applicable": False, "reason": str(exc)}
    if graph_out is not None:
        Path(graph_out).write_text(format_edge_list(G))
    _emit("base-graph", payload, fmt, out)


# --------------------------------------------------------------------------- pipeline


CONFIG_KEYS = {"g0", "g0_n", "g0_d", "t", "j_max", "labeling", "seed", "spectral", "regularize",
               "main_k", "main_degrees", "main_sizes", "m_override"}


def parse_config(text: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment; values may be quoted."""
    cfg = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ParseError(f"unknown key {key!r}", lineno)
        if key in cfg:
            raise ParseError(f"duplicate key {key!r}", lineno)
        cfg[key] = (value.strip("\"'"), lineno)
    return cfg


def _int_list(value, lineno):
    try:
        return [int(v) for v in value.replace(",", " ").split()]
    except ValueError:
        raise ParseError("expected a list of integers", lineno) from None


def _overrides(value, lineno):
    out = {}
    for item in value.replace(",", " ").split():
        try:
            h, M = item.split(":")
            out[int(h)] = int(M)
        except ValueError:
            raise ParseError(f"override {item!r} must look like h:M", lineno) from None
    return out


@main.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@click.option("--graphs-dir", type=click.Path(file_okay=False), default=None,
              help="Write F_1, F_2, ... (and the 3-regular graph) as edge lists here.")
@common
def pipeline(config, graphs_dir, seed, out, fmt):
    """Initial iteration F_j from a config file, with optional degree reduction and main schedule.

    Keys: g0 (edge-list path) or g0_n and g0_d (seeded random expander); t; j_max;
    labeling (default|random); seed; spectral (true|false); regularize (index j);
    main_k, main_degrees, main_sizes and m_override (h:M pairs) for main-iteration bookkeeping.
    """
    raw = parse_config(Path(config).read_text())

    def get(key, conv=str, default=None):
        if key not in raw:
            return default
        value, lineno = raw[key]
        try:
            return conv(value)
        except ValueError:
            raise ParseError(f"bad value for {key}: {value!r}", lineno) from None

    run_seed = get("seed", int, seed)
    if "g0" in raw:
        G0 = _load(Path(config).parent / get("g0"))
    elif "g0_n" in raw and "g0_d" in raw:
        G0 = gc.random_expander(get("g0_n", int), get("g0_d", int), run_seed)
    else:
        raise ParseError("config needs g0 or both g0_n and g0_d")
    if "t" not in raw:
        raise ParseError("config needs t")
    spectral = get("spectral", lambda v: v.lower() in ("1", "true", "yes"), True)
    cfg = PipelineConfig(G0, get("t", int), j_max=get("j_max", int, 3), labeling=get("labeling", str, "default"),
                         seed=run_seed, spectral=spectral)
    graphs, trace = initial_iteration(cfg)
    payload = {"g0": {"n": G0.n, "degree": G0.degree}, "t": cfg.t, "j_max": cfg.j_max, "seed": run_seed,
               "trace": trace.to_dict()}
    if graphs_dir is not None:
        Path(graphs_dir).mkdir(parents=True, exist_ok=True)
        for j, F in enumerate(graphs, start=1):
            (Path(graphs_dir) / f"F{j}.txt").write_text(format_edge_list(F))
    ok = trace.chain_holds
    if "regularize" in raw:
        j = get("regularize", int)
        if not 1 <= j <= len(graphs):
            raise ParseError(f"regularize must lie in 1..{len(graphs)}", raw["regularize"][1])
        res = three_regularize_traced(graphs[j - 1], seed=run_seed, spectral=spectral)
        payload["regularized"] = {"source": j, **res.to_dict()}
        ok = ok and res.chain_holds is not False and res.connected is not False
        if graphs_dir is not None:
            (Path(graphs_dir) / f"F{j}_degree3.txt").write_text(format_edge_list(res.graph))
    if "main_k" in raw:
        degrees = _int_list(*raw["main_degrees"]) if "main_degrees" in raw else None
        sizes = _int_list(*raw["main_sizes"]) if "main_sizes" in raw else None
        if degrees is None or sizes is None:
            raise ParseError("main_k needs main_degrees and main_sizes")
        overrides = _overrides(*raw["m_override"]) if "m_override" in raw else None
        schedule = main_iteration_bookkeeping(degrees, {h: sizes for h in range(1, len(degrees) + 1)},
                                              get("main_k", int), overrides)
        payload["main_schedule"] = schedule.to_dict()
    payload["holds"] = ok
    _emit("pipeline", payload, fmt, out)
    if not ok:
        sys.exit(1)


# --------------------------------------------------------------------------- batteries


@main.command()
@click.option("--suite", type=click.Choice(SUITES), required=True)
@click.option("--count", type=click.IntRange(1), default=20, show_default=True, help="Instances.")
@click.option("--tolerance", type=float, default=1e-9, show_default=True)
@click.option("--p", "p", type=float, default=2.0, show_default=True, help="Cotype suite: p.")
@click.option("--q", "q", type=float, default=2.0, show_default=True, help="Cotype suite: q.")
@click.option("--K", "K_p", type=float, default=1.0, show_default=True, help="Cotype suite: K_p.")
@click.option("--corrupt", is_flag=True, hidden=True, help="Shrink every right side (harness self-test).")
@common
def verify(suite, count, tolerance, p, q, K_p, corrupt, seed, out, fmt):
    """Run an inequality battery and report slacks; exit 1 on any failure."""
    cfg = VerifySuiteConfig(suite, count=count, seed=seed, tolerance=tolerance, p=p, q=q, K_p=K_p,
                            corrupt=corrupt)
    report = run_verify(cfg)
    if fmt == "json":
        _write(report_json("verify", report), out)
    else:
        _write(summary_table(report), out)
    if not report["passed"]:
        sys.exit(1)


@main.command("nondecay-demo")
@click.option("--n", "sizes", type=click.IntRange(3), multiple=True, default=(64, 128, 256, 512, 1024),
              show_default=True)
@click.option("--t", "times", type=click.IntRange(1), multiple=True, default=(2, 4), show_default=True)
@click.option("--d", "d", type=click.IntRange(3), default=4, show_default=True)
@common
def nondecay_demo(sizes, times, d, seed, out, fmt):
    """Lower bounds for the log(1 + l_inf) kernel on a seeded expander family."""
    rows = []
    for n in sorted(sizes):
        G = gc.random_expander(n, d, seed)
        for t in times:
            rows.append(nondecay_experiment(G, t))
    monotone = {}
    for t in times:
        series = [r["lower_bound_cesaro"] for r in rows if r["t"] == t]
        monotone[str(t)] = all(a <= b * (1 + 1e-12) for a, b in zip(series, series[1:]))
    payload = {"degree": d, "seed": seed, "rows": rows, "monotone_in_n": monotone}
    if fmt == "text":
        header = f"{'n':>6} {'t':>3} {'graph':>10} {'cesaro':>10} {'loglog^2':>10}"
        lines = [header] + [
            f"{r['n']:>6} {r['t']:>3} {r['lower_bound_graph']:>10.4f} {r['lower_bound_cesaro']:>10.4f}"
            f" {r['loglog_n_squared']:>10.4f}" for r in rows
        ]
        lines += [f"monotone in n (t={t}): {v}" for t, v in monotone.items()]
        _write("\n".join(lines) + "\n", out)
    else:
        _emit("nondecay", payload, fmt, out)


if __name__ == "__main__":  # pragma: no cover
    main()
