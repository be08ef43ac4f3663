"""Best uniform approximation over finite point sets by point exchange."""

from .bases import custom, gaussians, monomials, trig
from .core import (BasisFamily, DeviationProfile, DiscreteDomain, Problem,
                   deviation_profile, evaluate_model, extreme_sets)
from .geometry import OptimalityCertificate, Refusal, hulls_intersect, radon_partition
from .interpolation import SignedBasis, chebyshev_interpolant
from .oracle import lp_minimax
from .solver import SolveOptions, SolveResult, certify_optimality, initial_basis, solve_minimax

__version__ = "0.1.0"

__all__ = [
    "BasisFamily", "DeviationProfile", "DiscreteDomain", "OptimalityCertificate",
    "Problem", "Refusal", "SignedBasis", "SolveOptions", "SolveResult",
    "certify_optimality", "chebyshev_interpolant", "custom", "deviation_profile",
    "evaluate_model", "extreme_sets", "gaussians", "hulls_intersect", "initial_basis",
    "lp_minimax", "monomials", "radon_partition", "solve_minimax", "trig",
]
