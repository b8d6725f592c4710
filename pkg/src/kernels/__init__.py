"""Singular kernels, their dyadic pieces and abstract integration."""

from .decompose import (
    PROFILES,
    BoundCheck,
    HeatSplit,
    KernelPiece,
    KernelProfile,
    SingularKernel,
    create_profile,
    cutoff,
    decompose_kernel,
    heat_profile,
    heaviside_profile,
    moment_exponents,
    moment_order,
    riesz_profile,
    scaled_norm,
    split_heat_kernel,
)
from .integration import (
    AdmissibleModel,
    ConvolvedProxy,
    KernelTest,
    K_operator,
    J_operator,
    N_operator,
    JetConvolutionReport,
    SchauderReport,
    TaylorCoefficients,
    convolve_direct,
    integrated_label,
    jet_convolution_check,
    polynomial_labels,
    schauder_identity_check,
    taylor_indices,
)

__all__ = [
    "PROFILES",
    "AdmissibleModel",
    "BoundCheck",
    "ConvolvedProxy",
    "HeatSplit",
    "J_operator",
    "JetConvolutionReport",
    "K_operator",
    "KernelPiece",
    "KernelProfile",
    "KernelTest",
    "N_operator",
    "SchauderReport",
    "SingularKernel",
    "TaylorCoefficients",
    "convolve_direct",
    "create_profile",
    "cutoff",
    "decompose_kernel",
    "heat_profile",
    "heaviside_profile",
    "integrated_label",
    "jet_convolution_check",
    "moment_exponents",
    "moment_order",
    "polynomial_labels",
    "riesz_profile",
    "scaled_norm",
    "schauder_identity_check",
    "split_heat_kernel",
    "taylor_indices",
]
