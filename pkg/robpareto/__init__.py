"""
Robust multiobjective optimization over finite scenario sets.

Certifies robust, convex hull and objectivewise efficiency of candidate
decisions and minimizes worst-case scalarized objectives.
"""
from .config import DEFAULT_TOLERANCES, Tolerances
from .core import (AffineFamilyMap, Candidate, Instance, LinearInSMap, ObjectiveImage, Polyhedron,
                   ScenarioSet, SimplexDomain, TableMap, rescaled)
from .distro import AmbiguitySet, ExpectationConstraint, che_equals_robust_check, to_robust
from .efficiency import classify, set_valued_minimizers
from .geometry import DominanceMode, dominated_by_hull, dominated_by_point_set, signed_distance
from .instances import builtin, load_instance, save_instance
from .scalarize import (Chebyshev, SignedDistance, WeightedPNorm, WeightedSum, constructive_scalarizer,
                        dual_reformulate, epigraph_form, parse_scalarizer, worst_case)
from .solve import minimize_scalarized, sweep_front

__version__ = "1.0.0"
