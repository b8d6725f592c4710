"""Renormalisation numerics: Wick combinatorics, chaos checks, divergent constants."""

from .constants import (
    HORIZON,
    MOLLIFIERS,
    C1_constant,
    C2_constant,
    C2_log_coefficient,
    DivergenceFit,
    DivergenceReport,
    Mollifier,
    create_mollifier,
    divergence_report,
    fit_divergence,
)
from .distribution import (
    CappedRenormalizationReport,
    RenormalizedDistribution,
    capped_kernel,
    capped_renormalization_check,
    inverse_distance_kernel,
    kernel_mass,
    plain_pairing,
    renormalized_distribution,
)
from .pi2 import (
    Pi2Result,
    Pi2Sweep,
    default_psi,
    pi2_experiment,
    pi2_sweep,
    surrogate_C1,
    surrogate_covariance,
)
from .wick import (
    ChaosReport,
    PairingDiagram,
    batch_generators,
    chaos_inner_product,
    chaos_integral,
    chaos_isometry_check,
    contraction_profile,
    enumerate_wick,
    grid_kernel,
    hermite_wick,
    symmetrize,
    telephone_number,
    wick_expand,
)

__all__ = [
    "HORIZON",
    "MOLLIFIERS",
    "C1_constant",
    "C2_constant",
    "C2_log_coefficient",
    "CappedRenormalizationReport",
    "ChaosReport",
    "DivergenceFit",
    "DivergenceReport",
    "Mollifier",
    "PairingDiagram",
    "Pi2Result",
    "Pi2Sweep",
    "RenormalizedDistribution",
    "batch_generators",
    "capped_kernel",
    "capped_renormalization_check",
    "chaos_inner_product",
    "chaos_integral",
    "chaos_isometry_check",
    "contraction_profile",
    "create_mollifier",
    "default_psi",
    "divergence_report",
    "enumerate_wick",
    "fit_divergence",
    "grid_kernel",
    "hermite_wick",
    "inverse_distance_kernel",
    "kernel_mass",
    "pi2_experiment",
    "pi2_sweep",
    "plain_pairing",
    "renormalized_distribution",
    "surrogate_C1",
    "surrogate_covariance",
    "symmetrize",
    "telephone_number",
    "wick_expand",
]
