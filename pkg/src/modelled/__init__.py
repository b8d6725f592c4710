"""Modelled distributions, the reconstruction operator, products and rough integration."""

from .distribution import (
    ModelledDistribution,
    SeminormReport,
    constant_distribution,
    dgamma_seminorm,
    linear_combination,
    polynomial_jet,
    zero_distribution,
)
from .pairing import noise_jet, pairing_product
from .products import (
    ProductTable,
    ToyProductReport,
    compose,
    covariance_residual,
    multiply,
    polynomial_product_table,
    toy_modelled,
    toy_product_experiment,
    toy_product_table,
)
from .reconstruct import (
    ReconstructionRate,
    WaveletExpansion,
    check_reconstructible,
    reconstruct,
    reconstruct_pointwise,
    reconstruction_increments,
    reconstruction_rate,
    wavelet_coefficients,
)
from .rough import (
    LevelComparison,
    RoughIntegral,
    integrand_distribution,
    integrate_by_reconstruction,
    remainder_fit,
    rough_integral_levels,
    rough_integrate,
)

__all__ = [
    "LevelComparison",
    "ModelledDistribution",
    "ProductTable",
    "ReconstructionRate",
    "RoughIntegral",
    "SeminormReport",
    "ToyProductReport",
    "WaveletExpansion",
    "check_reconstructible",
    "compose",
    "constant_distribution",
    "covariance_residual",
    "dgamma_seminorm",
    "integrand_distribution",
    "integrate_by_reconstruction",
    "linear_combination",
    "multiply",
    "noise_jet",
    "pairing_product",
    "polynomial_jet",
    "polynomial_product_table",
    "reconstruct",
    "reconstruct_pointwise",
    "reconstruction_increments",
    "reconstruction_rate",
    "remainder_fit",
    "rough_integral_levels",
    "rough_integrate",
    "toy_modelled",
    "toy_product_experiment",
    "toy_product_table",
    "wavelet_coefficients",
    "zero_distribution",
]
