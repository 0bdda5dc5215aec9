"""Prescribed scalar curvature Yamabe flow on periodic grids."""

from ._core import (
    Background,
    Error,
    Grid,
    Mask,
    build_supersolution,
    check_hypotheses,
    conformal_op,
    dirichlet_eigen,
    dissipation_identity_error,
    energy,
    growth_fit,
    laplacian,
    load_scenario,
    run,
    scalar_curvature,
    stable_dt,
    stationary_residual,
    superlevel_mask,
    velocity,
    weighted_mass,
)

__all__ = [
    "Background",
    "Error",
    "Grid",
    "Mask",
    "build_supersolution",
    "check_hypotheses",
    "conformal_op",
    "dirichlet_eigen",
    "dissipation_identity_error",
    "energy",
    "growth_fit",
    "laplacian",
    "load_scenario",
    "run",
    "scalar_curvature",
    "stable_dt",
    "stationary_residual",
    "superlevel_mask",
    "velocity",
    "weighted_mass",
]
