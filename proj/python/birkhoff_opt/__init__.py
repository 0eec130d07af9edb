"""Riemannian optimization on doubly stochastic, symmetric stochastic and
definite symmetric stochastic matrices under the Fisher metric."""

from ._core import (
    Manifold,
    SolverResult,
    adjusted_rand_index,
    balanced_start,
    block_model,
    certify_gradient,
    convex_cluster,
    dad_balance,
    denoise,
    dykstra_projection,
    extract_clusters,
    lowrank_cluster,
    minimize,
    sinkhorn_knopp,
)

__all__ = [
    "Manifold",
    "SolverResult",
    "adjusted_rand_index",
    "balanced_start",
    "block_model",
    "certify_gradient",
    "convex_cluster",
    "dad_balance",
    "denoise",
    "dykstra_projection",
    "extract_clusters",
    "lowrank_cluster",
    "minimize",
    "sinkhorn_knopp",
]
