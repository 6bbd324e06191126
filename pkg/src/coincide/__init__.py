"""Exact Lefschetz coincidence invariants for simplicial maps of pairs."""

from .coincidence import (
    AbstractProblem,
    CoincidenceProblem,
    CoincidenceReport,
    ProblemError,
    case2_abstract,
    coincidence_index,
    condition_A,
    disjointness_check,
    generalized_lefschetz,
    lefschetz_number,
    multivalued_fixed_point,
    theta_evaluation_check,
    transfer,
    verify_main_theorem,
)
from .duality import PAIRING_SIGN, fundamental_class, intersection_pairing, manifold_duality, manifold_pair
from .homology import GradedLinearMap, homology, induced_homology_map
from .linalg import Matrix
from .simplicial import SimplicialComplex, SimplicialMap, SimplicialPair

__version__ = "0.1.0"

__all__ = [
    "AbstractProblem",
    "CoincidenceProblem",
    "CoincidenceReport",
    "GradedLinearMap",
    "Matrix",
    "PAIRING_SIGN",
    "ProblemError",
    "SimplicialComplex",
    "SimplicialMap",
    "SimplicialPair",
    "case2_abstract",
    "coincidence_index",
    "condition_A",
    "disjointness_check",
    "fundamental_class",
    "generalized_lefschetz",
    "homology",
    "induced_homology_map",
    "intersection_pairing",
    "lefschetz_number",
    "manifold_duality",
    "manifold_pair",
    "multivalued_fixed_point",
    "theta_evaluation_check",
    "transfer",
    "verify_main_theorem",
]
