"""Numerical toolkit for fractional Orlicz-Sobolev analysis.

Builds N-function calculus (growth indices, convex conjugates, Sobolev
conjugates), discretises nonlocal Orlicz modulars and Luxemburg norms on
one-dimensional meshes, verifies the functional inequalities of the theory
by seeded randomized sweeps, and solves the singular fractional g-Laplacian
problem by regularized energy minimization with epsilon-continuation.
"""

__version__ = "0.1.0"

from .nfunctions import (
    NFunction,
    DerivedNFunction,
    construct_nfunction,
    power_nfunction,
    power_log_nfunction,
    power_sum_nfunction,
    tabulated_nfunction,
    estimate_indices,
    complementary,
    inverse_nfunction,
    sobolev_conjugate,
    compose_power,
    essentially_faster,
)
from .grid import Mesh, GridFunction, modular, seminorm_modular, luxemburg_norm
from .solver import ProblemSpec, SolveResult, solve_singular, minimize_energy

__all__ = [
    "NFunction", "DerivedNFunction", "construct_nfunction",
    "power_nfunction", "power_log_nfunction", "power_sum_nfunction",
    "tabulated_nfunction", "estimate_indices", "complementary",
    "inverse_nfunction", "sobolev_conjugate", "compose_power",
    "essentially_faster",
    "Mesh", "GridFunction", "modular", "seminorm_modular", "luxemburg_norm",
    "ProblemSpec", "SolveResult", "solve_singular", "minimize_energy",
    "__version__",
]
