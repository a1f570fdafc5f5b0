"""Edge-list files and versioned JSON reports.

Edge-list format: a header line ``n d`` followed by ``u v mult`` lines with
``u <= v``, sorted lexicographically; a self loop is ``u u mult``.  Blank
lines and ``#`` comments are ignored on input and never written.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import NonRegularError, ParseError
from .graph_core import RegularMultigraph, build_graph

SCHEMA_VERSION = 1


def format_edge_list(G: RegularMultigraph) -> str:
    lines = [f"{G.n} {G.degree}"]
    lines += [f"{u} {v} {m}" for u, v, m in G.edges()]
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> RegularMultigraph:
    header = None
    edges = []
    last = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        try:
            values = [int(v) for v in fields]
        except ValueError:
            raise ParseError(f"non-integer field in {raw.strip()!r}", lineno) from None
        if header is None:
            if len(values) != 2:
                raise ParseError("header must be 'n d'", lineno)
            header = (values[0], values[1], lineno)
            if values[0] < 1 or values[1] < 1:
                raise ParseError("n and d must be positive", lineno)
            continue
        if len(values) != 3:
            raise ParseError("edge lines must be 'u v mult'", lineno)
        u, v, m = values
        n = header[0]
        if not (0 <= u <= v < n):
            raise ParseError(f"need 0 <= u <= v < {n}, got {u} {v}", lineno)
        if m < 1:
            raise ParseError("multiplicity must be positive", lineno)
        if last is not None and (u, v) <= last:
            raise ParseError("edges must be strictly increasing in (u, v)", lineno)
        last = (u, v)
        edges.append((u, v, m))
    if header is None:
        raise ParseError("missing header", 1)
    n, d, lineno = header
    try:
        G = build_graph(n, edges)
    except NonRegularError as exc:
        raise ParseError(str(exc), lineno) from None
    if G.degree != d:
        raise ParseError(f"header degree {d} but rows sum to {G.degree}", lineno)
    return G


def read_graph(path) -> RegularMultigraph:
    return parse_edge_list(Path(path).read_text())


def write_graph(G: RegularMultigraph, path) -> None:
    Path(path).write_text(format_edge_list(G))


def _encode(obj):
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
        return obj
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else obj.numerator
    if isinstance(obj, np.generic):
        return _encode(obj.item())
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    return obj


def report_json(kind: str, payload: dict) -> str:
    """Deterministic JSON: sorted keys, infinities as strings, schema version attached."""
    body = {"schema": SCHEMA_VERSION, "kind": kind, **_encode(payload)}
    return json.dumps(body, sort_keys=True, indent=2) + "\n"


def load_report(text: str) -> dict:
    data = json.loads(text)
    if data.get("schema") != SCHEMA_VERSION:
        raise ParseError(f"unsupported report schema {data.get('schema')!r}")
    return data


def report_text(payload: dict, indent: int = 0) -> str:
    """Plain ``key: value`` rendering for ``--format text``."""
    pad = " " * indent
    lines = []
    for key, value in _encode(payload).items():
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines.append(report_text(value, indent + 2).rstrip("\n"))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{pad}{key}:")
            for item in value:
                lines.append(report_text(item, indent + 2).rstrip("\n"))
                lines.append(f"{pad}  --")
        else:
            lines.append(f"{pad}{key}: {value}")
    return "\n".join(lines) + "\n"
