"""Compactly supported orthonormal scaling functions and their property checks."""

from .checks import (
    DetailFamily,
    ReproductionReport,
    WaveletReport,
    check_poly_reproduction,
    nesting_residual,
    orthonormality_residual,
    wavelet_family,
    wavelet_report,
)
from .families import FAMILIES, WaveletFamily, get_family
from .grid import DyadicGrid
from .scaling import (
    ScalingFunction,
    cached_scaling_function,
    cascade_evaluate,
    detail_moments,
    from_family,
    inner_product,
    pair_smooth,
    phi_scaled,
    refine_to_level,
    refinement_residual,
    scaling_moments,
)

__all__ = [
    "DetailFamily",
    "DyadicGrid",
    "FAMILIES",
    "ReproductionReport",
    "ScalingFunction",
    "WaveletFamily",
    "WaveletReport",
    "cached_scaling_function",
    "cascade_evaluate",
    "check_poly_reproduction",
    "detail_moments",
    "from_family",
    "get_family",
    "inner_product",
    "nesting_residual",
    "orthonormality_residual",
    "pair_smooth",
    "phi_scaled",
    "refine_to_level",
    "refinement_residual",
    "scaling_moments",
    "wavelet_family",
    "wavelet_report",
]
