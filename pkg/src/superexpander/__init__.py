"""Expander graphs from zigzag and Cesaro calculus, with checks of nonlinear spectral-gap inequalities."""

from .errors import ExpanderError
from .graph_core import (
    RegularMultigraph,
    StochasticMatrix,
    build_graph,
    cesaro_graph,
    cesaro_matrix,
    cycle,
    cycle_with_loops,
    edge_completion,
    normalized_adjacency,
    random_expander,
)
from .products import balanced_replacement, derandomized_square, replacement, tensor, tensor_graph, zigzag
from .spectral import SpectralReport, gamma_plus_euclid, spectral_report

__version__ = "0.1.0"

__all__ = [
    "ExpanderError",
    "RegularMultigraph",
    "SpectralReport",
    "StochasticMatrix",
    "balanced_replacement",
    "build_graph",
    "cesaro_graph",
    "cesaro_matrix",
    "cycle",
    "cycle_with_loops",
    "derandomized_square",
    "edge_completion",
    "gamma_plus_euclid",
    "normalized_adjacency",
    "random_expander",
    "replacement",
    "spectral_report",
    "tensor",
    "tensor_graph",
    "zigzag",
]
