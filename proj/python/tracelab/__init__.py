"""Numerical lab for trace and lifting constructions on the half-space."""

from ._core import (
    BoundaryGrid,
    ConvergenceError,
    DomainError,
    ParseError,
    ResourceError,
    corpus,
    experiments,
    exponents,
    gagliardo_seminorm,
    geometric_levels,
    is_c_elliptic,
    kernel_dimensions,
    lp_norm,
    maximal_function,
    poisson_extend,
    run_experiment,
    sample,
    staircase_bounds,
    truncation_extend,
    truncation_levels,
)

__all__ = [
    "BoundaryGrid",
    "ConvergenceError",
    "DomainError",
    "ParseError",
    "ResourceError",
    "corpus",
    "experiments",
    "exponents",
    "gagliardo_seminorm",
    "geometric_levels",
    "is_c_elliptic",
    "kernel_dimensions",
    "lp_norm",
    "maximal_function",
    "poisson_extend",
    "run_experiment",
    "sample",
    "staircase_bounds",
    "truncation_extend",
    "truncation_levels",
]
