"""Wavelet, model, reconstruction, rough integration and toy product services."""

import logging
from typing import Dict, List

import numpy as np

from ..modelled import (
    ModelledDistribution,
    reconstruction_rate,
    remainder_fit,
    rough_integrate,
    toy_product_experiment,
)
from ..models import (
    ControlledPath,
    ModelFactory,
    rough_path_model,
    sample_rough_path,
    verify_model,
)
from ..wavelets import FAMILIES, cached_scaling_function, wavelet_report
from . import ExperimentResult, ExperimentService
from .config import ExperimentConfig

logger = logging.getLogger(__name__)

STOCHASTIC_MODELS = ("rough-path", "mollified-noise")
RECONSTRUCTION_LEVEL = 14
RECONSTRUCTION_N_MAX = 11
CENTER_COUNT = 20
RIEMANN_TOLERANCE = 1e-6


class WaveletCheckService(ExperimentService):
    name = "wavelet-check"
    description = "Orthonormality, refinement, reproduction and moment residuals per family"

    def run(self, config: ExperimentConfig) -> ExperimentResult:
        rows = []
        for name in FAMILIES:
            report = wavelet_report(cached_scaling_function(name))
            rows.append(report.to_dict())
        return ExperimentResult(
            success=True,
            checks={row["name"]: row["passed"] for row in rows},
            summary={"families": rows},
            artifacts={"wavelets": rows},
        )


def _model_kwargs(config: ExperimentConfig) -> Dict:
    level = max(config.levels) if config.levels else 10
    if config.model == "rough-path":
        return {"kind": "brownian", "level": level, "seed": config.seed, "alpha": config.alpha}
    if config.model == "mollified-noise":
        return {"noise": "white", "level": level, "seed": config.seed}
    if config.model == "toy-limit":
        return {"c": config.c}
    if config.model == "toy-sine":
        return {"c": config.c, "n": config.sine_n}
    return {}


class ModelCheckService(ExperimentService):
    name = "model-check"
    description = "Analytic bound fits and algebraic identities of a named model"
    parameters = ("model", "seed", "alpha", "levels", "c", "sine_n")

    def extra_problems(self, config: ExperimentConfig) -> List[str]:
        problems = []
        if config.model not in ModelFactory.list_available_models():
            available = ", ".join(ModelFactory.list_available_models())
            problems.append(f"unknown model '{config.model}'. Available: {available}")
        elif config.model in STOCHASTIC_MODELS and config.seed is None:
            problems.append(f"model {config.model} is stochastic and needs an explicit --seed")
        if config.model == "toy-sine" and config.sine_n < 1:
            problems.append(f"sine_n must be a positive integer, got {config.sine_n}")
        return problems

    def run(self, config: ExperimentConfig) -> ExperimentResult:
        model = ModelFactory.create_model(config.model, **_model_kwargs(config))
        report = verify_model(model)
        rows = [
            {
                "label": b.label,
                "degree": b.degree,
                "exponent": b.fit.to_dict()["exponent"],
                "constant": b.fit.constant,
                "passed": b.passed,
            }
            for b in report.pi_bounds
        ]
        return ExperimentResult(
            success=True,
            checks={
                "algebraic": report.algebraic_passed,
                "pi_bounds": all(b.passed for b in report.pi_bounds),
                "gamma_bounds": all(g.passed for g in report.gamma_bounds),
            },
            summary=report.to_dict(),
            artifacts={"bounds": rows},
        )


class ReconstructConvergenceService(ExperimentService):
    """Local reconstruction error on the Brownian rough-path model."""

    name = "reconstruct-convergence"
    description = "Fitted rate of |(Rf - Pi_x f(x))(phi^lambda_x)| against lambda"
    stochastic = True
    parameters = ("alpha", "gamma", "levels", "seed", "family")

    def extra_problems(self, config: ExperimentConfig) -> List[str]:
        problems = []
        if not 1.0 / 3.0 < config.alpha < 0.5:
            problems.append(f"alpha must lie in (1/3, 1/2), got {config.alpha}")
        if config.gamma <= 0:
            problems.append(f"gamma must be positive, got {config.gamma}")
        if any(p < 1 or p > RECONSTRUCTION_N_MAX for p in config.levels):
            problems.append(f"levels must lie in 1..{RECONSTRUCTION_N_MAX}")
        return problems

    def run(self, config: ExperimentConfig) -> ExperimentResult:
        rp = sample_rough_path("brownian", 1, RECONSTRUCTION_LEVEL, seed=config.seed, alpha=config.alpha)
        model = rough_path_model(rp)
        path = ControlledPath.from_function(
            rp, lambda X: np.sin(X[:, 0]), lambda X: np.cos(X[:, 0])[:, None]
        )
        table = model.controlled_coefficients(path.Y, path.Yprime)
        f = ModelledDistribution.from_table(model, config.gamma, rp.times, table, sector=("1", "W1"))
        grid = 2.0**RECONSTRUCTION_LEVEL
        centers = np.round(np.linspace(0.3, 0.7, CENTER_COUNT) * grid) / grid
        levels = config.levels or list(range(2, 8))
        lambdas = [2.0**-p for p in levels]
        rate = reconstruction_rate(f, centers, lambdas, RECONSTRUCTION_N_MAX, config.family)
        target = 2 * config.alpha - 0.1
        rows = [{"lambda": lam, "error": err} for lam, err in zip(rate.lambdas, rate.errors)]
        return ExperimentResult(
            success=True,
            checks={"rate": rate.fit.at_least(target)},
            summary={**rate.to_dict(), "target_exponent": target, "centers": len(centers)},
            artifacts={"convergence": rows},
        )


def _trig_integrand(rp) -> ControlledPath:
    return ControlledPath.from_function(
        rp,
        lambda X: np.sin(X[:, 0]) + X[:, 1] ** 2,
        lambda X: np.stack([np.cos(X[:, 0]), 2 * X[:, 1]], axis=1),
    )


def _trig_reference(times: np.ndarray) -> np.ndarray:
    """``int_0^t (sin(cos r) + sin(r)^2) d(cos r)`` cell by cell."""
    nodes, weights = np.polynomial.legendre.leggauss(8)
    out = np.zeros(len(times))
    for k in range(len(times) - 1):
        s, t = times[k], times[k + 1]
        r = 0.5 * (s + t) + 0.5 * (t - s) * nodes
        integrand = (np.sin(np.cos(r)) + np.sin(r) ** 2) * (-np.sin(r))
        out[k + 1] = out[k] + 0.5 * (t - s) * np.dot(weights, integrand)
    return out


class RoughIntegrateService(ExperimentService):
    """
    ``int Y dX`` by compensated sums.

    Without a seed the path is ``(cos t, sin t)`` and the result is compared
    with a Riemann integral; with a seed the path is Brownian and the
    remainder exponent is fitted instead.
    """

    name = "rough-integrate"
    description = "Rough integral of a controlled path and its consistency checks"
    parameters = ("alpha", "levels", "seed")

    def extra_problems(self, config: ExperimentConfig) -> List[str]:
        if config.alpha <= 1.0 / 3.0:
            return [f"rough integration needs alpha > 1/3, got {config.alpha}"]
        return []

    def run(self, config: ExperimentConfig) -> ExperimentResult:
        level = max(config.levels) if config.levels else 12
        kind = "trig" if config.seed is None else "brownian"
        rp = sample_rough_path(kind, 2, level, seed=config.seed, alpha=config.alpha)
        ones = ControlledPath(np.ones(len(rp.times)), np.zeros((len(rp.times), 2)))
        identity = rough_integrate(ones, rp, 1)
        checks = {"unit_integrand": bool(np.allclose(identity.Z, rp.X[:, 1] - rp.X[0, 1], atol=1e-12))}
        summary = {"kind": kind, "level": level}
        if kind == "trig":
            path = _trig_integrand(rp)
            Z = rough_integrate(path, rp, 0)
            reference = _trig_reference(rp.times)
            error = float(np.max(np.abs(Z.Z - reference)) / np.max(np.abs(reference)))
            checks["riemann_agreement"] = error < RIEMANN_TOLERANCE
            summary["relative_sup_error"] = error
        else:
            path = ControlledPath.from_function(
                rp,
                lambda X: np.cos(X[:, 1]),
                lambda X: np.stack([np.zeros(len(X)), -np.sin(X[:, 1])], axis=1),
            )
            Z = rough_integrate(path, rp, 0)
            fit = remainder_fit(Z, path, rp)
            target = 3 * config.alpha - 0.15
            checks["remainder_exponent"] = fit.at_least(target)
            summary["remainder_fit"] = fit.to_dict()
            summary["target_exponent"] = target
        return ExperimentResult(success=True, checks=checks, summary=summary, artifacts={"integral": Z.rows()})


class ToyProductService(ExperimentService):
    name = "toy-product"
    description = "Product identity on the limiting toy model and convergence of the sine models"
    parameters = ("c",)

    def run(self, config: ExperimentConfig) -> ExperimentResult:
        report = toy_product_experiment(config.c)
        rows = [{"n": n, "error": err} for n, err in zip(report.ns, report.errors)]
        return ExperimentResult(
            success=True,
            checks={
                "limit_identity": report.limit_residual < report.tolerance,
                "sine_convergence": report.fit.identically_zero or report.fit.exponent > 0,
            },
            summary=report.to_dict(),
            artifacts={"toy_product": rows},
        )
