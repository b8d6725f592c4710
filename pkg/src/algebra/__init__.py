"""Exact homogeneity arithmetic and graded linear maps."""

from .graded import (
    GradedIndexSet,
    GradedMap,
    TriangularityReport,
    check_lower_triangular,
)
from .homogeneity import ZERO, Homogeneity, hom_add, hom_compare
from .polynomial import monomials, polynomial_gamma, polynomial_space

__all__ = [
    "GradedIndexSet",
    "GradedMap",
    "Homogeneity",
    "TriangularityReport",
    "ZERO",
    "check_lower_triangular",
    "hom_add",
    "hom_compare",
    "monomials",
    "polynomial_gamma",
    "polynomial_space",
]
