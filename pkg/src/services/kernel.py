"""Kernel decomposition, Schauder identity and heat jet convolution service."""

import logging
from typing import List

import numpy as np

from ..kernels import (
    PROFILES,
    AdmissibleModel,
    create_profile,
    decompose_kernel,
    jet_convolution_check,
    moment_order,
    schauder_identity_check,
    split_heat_kernel,
)
from ..modelled import noise_jet, polynomial_jet
from ..models import AnalyticFn, mollified_noise_model, polynomial_model
from . import ExperimentResult, ExperimentService
from .config import ExperimentConfig

logger = logging.getLogger(__name__)

MOMENT_TOLERANCE = 1e-8
SCHAUDER_GAMMA = 1.1
SCHAUDER_ALPHA = 0.4
N_LEVELS = 6
HEAT_JET_GAMMA = 0.5
HEAT_POINTS = ((0.5, 0.3), (0.7, 0.55), (0.9, 0.8))


def _smooth_noise(y):
    return np.cos(2 * np.pi * np.asarray(y, dtype=float)) + 0.5


def _jet_values(y):
    return (1 + y**2) * _smooth_noise(y)


JET = [lambda y: 1 + y**2, lambda y: 2 * y]


def _heat_g(z):
    return np.exp(-z[:, 0]) * np.cos(2 * np.pi * z[:, 1])


# (t, x) multi-indices of e^-t cos(2 pi x)
HEAT_DERIVATIVES = {
    (0, 0): _heat_g,
    (1, 0): lambda z: -_heat_g(z),
    (0, 1): lambda z: -2 * np.pi * np.exp(-z[:, 0]) * np.sin(2 * np.pi * z[:, 1]),
    (0, 2): lambda z: -4 * np.pi**2 * _heat_g(z),
}


class KernelCheckService(ExperimentService):
    """
    Decompose a singular kernel into moment-free dyadic pieces and fit their
    scaling bounds. For the Riesz kernel the identity ``R K f = K * R f`` is
    checked on a mollified-noise model as well; for the heat kernel the
    Taylor coefficients of ``K f`` on a parabolic polynomial model are
    compared with direct convolutions of the derivatives of ``f``.
    """

    name = "kernel-check"
    description = "Per-piece moment residuals, scaling-bound fits and the Schauder identity"
    parameters = ("kernel", "levels")

    def extra_problems(self, config: ExperimentConfig) -> List[str]:
        if config.kernel not in PROFILES:
            return [f"unknown kernel '{config.kernel}'. Available: {', '.join(sorted(PROFILES))}"]
        return []

    def run(self, config: ExperimentConfig) -> ExperimentResult:
        n_levels = max(config.levels) if config.levels else N_LEVELS
        summary = {}
        if config.kernel == "heat":
            split = split_heat_kernel(order=4, n_levels=n_levels)
            kernel = split.kernel
        else:
            profile = create_profile(config.kernel)
            kernel = decompose_kernel(profile, moment_order(SCHAUDER_GAMMA, profile.beta), n_levels)
        report = kernel.report()
        summary["decomposition"] = report
        checks = {
            "moments": max(kernel.moment_residuals()) < MOMENT_TOLERANCE,
            "scaling_bounds": report["passed"],
        }
        if config.kernel == "heat":
            base = polynomial_model(2, 2, scaling=kernel.scaling)
            f = polynomial_jet(base, HEAT_JET_GAMMA, {(0, 0): _heat_g})
            jets = jet_convolution_check(f, AdmissibleModel(base, kernel), HEAT_DERIVATIVES, HEAT_POINTS)
            checks["heat_jet_convolution"] = jets.passed
            summary["heat_jet_convolution"] = jets.to_dict()
        if config.kernel == "riesz":
            model = AdmissibleModel(
                mollified_noise_model(AnalyticFn(_smooth_noise), 1, SCHAUDER_ALPHA), kernel
            )
            f = noise_jet(model.base, SCHAUDER_GAMMA, JET)
            schauder = schauder_identity_check(f, model, _jet_values)
            checks["schauder_identity"] = schauder.passed
            summary["schauder"] = schauder.to_dict()
        rows = [
            {"n": piece["n"], "radius": piece["radius"], "moment_residual": piece["moment_residual"]}
            for piece in report["pieces"]
        ]
        return ExperimentResult(success=True, checks=checks, summary=summary, artifacts={"pieces": rows})
