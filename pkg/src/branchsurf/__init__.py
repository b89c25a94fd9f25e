"""Branched pseudospherical surfaces from hyperbolic Chebyshev nets."""
from .hyperbolic import complete_rhombus, geodesic_points, hyp_distance, mobius, vertex_angle
from .netgen import build_periodic_amsler, run_greedy
from .quadgraph import AsymptoticComplex, branch_index, validate_complex

__version__ = "0.1.0"

__all__ = [
    "AsymptoticComplex", "branch_index", "build_periodic_amsler", "complete_rhombus", "geodesic_points",
    "hyp_distance", "mobius", "run_greedy", "validate_complex", "vertex_angle",
]
