"""Optimal-transport graph barycenters and supervised graph prediction."""

from fgwbary._core import (
    FgwError,
    Krr,
    deserialize_graph,
    make_dataset,
    sample_sbm,
    serialize_graph,
    solve_barycenter,
    solve_exact,
    solve_fgw,
    solve_sinkhorn,
)

__all__ = [
    "FgwError",
    "Krr",
    "deserialize_graph",
    "make_dataset",
    "sample_sbm",
    "serialize_graph",
    "solve_barycenter",
    "solve_exact",
    "solve_fgw",
    "solve_sinkhorn",
]
