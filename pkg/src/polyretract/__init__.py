"""Retractions of polytopal algebras over the rationals."""

from .geometry import LatticePolytope, hull, join, lattice_width, minimal_lattice_width, segment_embeddings, simplex_segment
from .groups import AutomorphismWord, ColumnVector, Elementary, Symmetry, Toric, column_vectors
from .laurent import LaurentPolynomial, newton_polytope
from .semigroup import AffineSemigroup, normality_check, polytopal_semigroup
from .retraction import GradedAlgebraMap, LatticeFibration, check_idempotent, kernel_monomials

__version__ = "0.1.0"

__all__ = [
    "AffineSemigroup",
    "AutomorphismWord",
    "ColumnVector",
    "Elementary",
    "GradedAlgebraMap",
    "LatticeFibration",
    "LatticePolytope",
    "LaurentPolynomial",
    "Symmetry",
    "Toric",
    "check_idempotent",
    "column_vectors",
    "hull",
    "join",
    "kernel_monomials",
    "lattice_width",
    "minimal_lattice_width",
    "newton_polytope",
    "normality_check",
    "polytopal_semigroup",
    "segment_embeddings",
    "simplex_segment",
]
