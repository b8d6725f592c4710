"""
Numerical verification of the model axioms.

``verify_model`` fits the decay of ``|(Pi_x tau)(phi^lam_x)|`` in ``lam`` and of
the components of ``Gamma_xy tau`` in ``|x - y|``, and measures the algebraic
identities ``Gamma_xx = 1``, ``Gamma_xy Gamma_yz = Gamma_xz`` and
``Pi_x Gamma_xy = Pi_y`` on sampled configurations.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from ..algebra import GradedMap
from .base import KAPPA_NUM, Model
from .fits import RateFit, fit_rate
from .proxies import DistributionProxy
from .testfns import Bump

logger = logging.getLogger(__name__)

DEFAULT_LAMBDAS = tuple(2.0**-p for p in range(2, 8))
ASYMPTOTIC_LAMBDAS = tuple(2.0**-p for p in range(5, 9))


@dataclass(frozen=True)
class VerifySpec:
    """Sampling parameters for ``verify_model``."""

    lambdas: Tuple[float, ...] = DEFAULT_LAMBDAS
    window: Tuple[float, float] = (0.25, 0.75)
    points: int = 8
    pi_lambdas: Tuple[float, ...] = ASYMPTOTIC_LAMBDAS
    pi_window: Tuple[float, float] = (0.1, 0.9)
    pi_points: int = 128
    triples: int = 6
    slack: float = 0.1
    kappa: float = KAPPA_NUM
    algebraic_tol: float = 1e-8
    pairing_scale: float = 0.25
    seed: int = 0


@dataclass(frozen=True)
class BoundFit:
    label: str
    degree: float
    fit: RateFit
    passed: bool

    def to_dict(self) -> Dict:
        return {"label": self.label, "degree": self.degree, "passed": self.passed, **self.fit.to_dict()}


@dataclass(frozen=True)
class GammaFit:
    label: str
    target_degree: float
    expected: float
    fit: RateFit
    passed: bool

    def to_dict(self) -> Dict:
        return {
            "label": self.label,
            "target_degree": self.target_degree,
            "expected": self.expected,
            "passed": self.passed,
            **self.fit.to_dict(),
        }


@dataclass(frozen=True)
class ModelReport:
    model: str
    pi_bounds: List[BoundFit]
    gamma_bounds: List[GammaFit]
    algebraic: Dict[str, float]
    algebraic_tol: float
    flagged: List[str] = field(default_factory=list)

    @property
    def algebraic_passed(self) -> bool:
        return all(v <= self.algebraic_tol for v in self.algebraic.values())

    @property
    def passed(self) -> bool:
        return (
            self.algebraic_passed
            and all(b.passed for b in self.pi_bounds)
            and all(g.passed for g in self.gamma_bounds)
        )

    def to_dict(self) -> Dict:
        return {
            "model": self.model,
            "passed": self.passed,
            "algebraic": self.algebraic,
            "algebraic_passed": self.algebraic_passed,
            "flagged": self.flagged,
            "pi_bounds": [b.to_dict() for b in self.pi_bounds],
            "gamma_bounds": [g.to_dict() for g in self.gamma_bounds],
        }


def scaled_distance(x, y, scaling: Sequence[int]) -> float:
    """``|x - y|_s = sum_i |x_i - y_i|^(1/s_i)``."""
    diff = np.abs(np.atleast_1d(np.asarray(x, dtype=float) - np.asarray(y, dtype=float)))
    return float(sum(d ** (1.0 / s) for d, s in zip(diff, scaling)))


def _center(x, dim: int) -> Tuple[float, ...]:
    return tuple(np.atleast_1d(np.asarray(x, dtype=float)).reshape(dim).tolist())


def _shift(x, d: float, scaling: Sequence[int]):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = x + np.array([d**s for s in scaling])
    return out if len(out) > 1 else float(out[0])


def _pi_bounds(m: Model, points, spec: VerifySpec) -> List[BoundFit]:
    """
    Fit the root mean square of ``|(Pi_x tau)(phi^lam_x)|`` over ``points``.

    For ``|tau| <= 0`` values are floored at 1: with ``lam <= 1`` those are
    already below ``lam^|tau|``.
    """
    # about min(points, width / lam) independent pairings at scale lam
    width = spec.pi_window[1] - spec.pi_window[0]
    weights = [np.sqrt(min(len(points), width / lam)) for lam in spec.pi_lambdas]
    out = []
    for label in m.labels:
        degree = m.degree_value(label, spec.kappa)
        values = []
        for lam in spec.pi_lambdas:
            pairs = [m.pi(x, label).pair(Bump(_center(x, m.dim), lam, m.scaling)) for x in points]
            values.append(float(np.sqrt(np.mean(np.square(pairs)))))
        if degree <= 0:
            values = [max(1.0, v) for v in values]
        fit = fit_rate(spec.pi_lambdas, values, weights=weights)
        passed = fit.at_least(degree, spec.slack)
        if not passed:
            logger.info("bound for %s: exponent %.3f < %.3f", label, fit.exponent, degree)
        out.append(BoundFit(str(label), degree, fit, passed))
    return out


def _gamma_bounds(m: Model, points, spec: VerifySpec) -> List[GammaFit]:
    space = m.structure
    degrees = space.degrees
    distances = [m.dim * d for d in spec.lambdas]
    gammas = {
        d: [(x, m.gamma(x, _shift(x, d, m.scaling))) for x in points] for d in spec.lambdas
    }
    out = []
    for label in m.labels:
        deg_tau = space.degree(label)
        j = space.index(label)
        for beta in degrees:
            if not beta < deg_tau:
                continue
            rows = [i for i, d in enumerate(space.label_degrees) if d == beta]
            values = []
            for d in spec.lambdas:
                values.append(
                    max(float(np.max(np.abs(g.matrix[rows, j]))) for _, g in gammas[d])
                )
            expected = deg_tau.value(spec.kappa) - beta.value(spec.kappa)
            fit = fit_rate(distances, values)
            out.append(
                GammaFit(str(label), beta.value(spec.kappa), expected, fit, fit.at_least(expected, spec.slack))
            )
    return out


def _max_entry(g: GradedMap) -> float:
    return float(np.max(np.abs(g.matrix))) if g.matrix.size else 0.0


def _algebraic(m: Model, points, spec: VerifySpec) -> Dict[str, float]:
    rng = np.random.default_rng(spec.seed)
    ident = GradedMap.identity(m.structure)
    res = {"gamma_xx": 0.0, "gamma_inverse": 0.0, "gamma_composition": 0.0, "pi_gamma": 0.0}
    for _ in range(spec.triples):
        ix, iy, iz = rng.choice(len(points), size=3, replace=len(points) < 3)
        x, y, z = points[ix], points[iy], points[iz]
        gxy, gyx = m.gamma(x, y), m.gamma(y, x)
        res["gamma_xx"] = max(res["gamma_xx"], _max_entry(m.gamma(x, x) - ident))
        res["gamma_inverse"] = max(res["gamma_inverse"], _max_entry(gxy @ gyx - ident))
        res["gamma_composition"] = max(
            res["gamma_composition"], _max_entry(gxy @ m.gamma(y, z) - m.gamma(x, z))
        )
        test = Bump(_center(y, m.dim), spec.pairing_scale, m.scaling)
        for j, label in enumerate(m.labels):
            lhs: DistributionProxy = m.pi_vector(x, gxy.matrix[:, j])
            direct = m.pi(y, label).pair(test)
            err = abs(lhs.pair(test) - direct) / max(1.0, abs(direct))
            res["pi_gamma"] = max(res["pi_gamma"], err)
    return res


def verify_model(m: Model, spec: Optional[VerifySpec] = None) -> ModelReport:
    """Fit the analytic bounds and measure the algebraic identities of ``m``."""
    spec = spec or VerifySpec()
    points = list(m.sample_points(spec.window, spec.points))
    pi_bounds = _pi_bounds(m, list(m.sample_points(spec.pi_window, spec.pi_points)), spec)
    gamma_bounds = _gamma_bounds(m, points, spec)
    algebraic = _algebraic(m, points, spec)
    flagged = [k for k, v in algebraic.items() if v > spec.algebraic_tol]
    flagged += [b.label for b in pi_bounds if not b.passed]
    flagged += [f"Gamma[{g.label}->{g.target_degree}]" for g in gamma_bounds if not g.passed]
    report = ModelReport(m.name, pi_bounds, gamma_bounds, algebraic, spec.algebraic_tol, flagged)
    logger.info("verified %s: passed=%s flagged=%s", m.name, report.passed, flagged)
    return report


class CorruptedGammaModel(Model):
    """Wrap a model and drop the off-diagonal part of one column of ``Gamma``."""

    def __init__(self, inner: Model, label: Optional[Hashable] = None):
        super().__init__(inner.structure, inner.scaling)
        self.inner = inner
        self.name = f"{inner.name}-corrupted"
        self.is_continuous = inner.is_continuous
        self.label = label if label is not None else inner.labels[-1]

    def pi(self, x, label: Hashable) -> DistributionProxy:
        return self.inner.pi(x, label)

    def gamma(self, x, y) -> GradedMap:
        g = self.inner.gamma(x, y)
        matrix = g.matrix.copy()
        j = self.structure.index(self.label)
        diag = matrix[j, j]
        matrix[:, j] = 0.0
        matrix[j, j] = diag
        return GradedMap(g.domain, g.codomain, matrix, g.exact)


def corrupt_gamma(m: Model, label: Optional[Hashable] = None) -> CorruptedGammaModel:
    return CorruptedGammaModel(m, label)
