"""Graded endomorphisms of polytopal algebras, retractions and their normal forms.

Bases, corrections, certificates and the polygon pipeline live in the
submodules; only the map layer is re-exported here because the groups
module imports it.
"""

from .maps import (
    FibrationError,
    GradedAlgebraMap,
    HomomorphismViolation,
    KernelMismatch,
    LatticeFibration,
    check_homomorphism,
    check_idempotent,
    codimension,
    face_retraction,
    facet_valuation,
    fibration_retraction,
    identity_map,
    image_dimension,
    kernel_monomials,
)

__all__ = [
    "FibrationError",
    "GradedAlgebraMap",
    "HomomorphismViolation",
    "KernelMismatch",
    "LatticeFibration",
    "check_homomorphism",
    "check_idempotent",
    "codimension",
    "face_retraction",
    "facet_valuation",
    "fibration_retraction",
    "identity_map",
    "image_dimension",
    "kernel_monomials",
]
