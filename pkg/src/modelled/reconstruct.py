"""
Wavelet reconstruction of modelled distributions.

At level ``n`` the approximation is ``R^n f = sum_x (Pi_x f(x))(phi^n_x) phi^n_x``
over the lattice ``2^-n Z`` covering the working window.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from ..errors import ReconstructionError
from ..models import Bump, DistributionProxy, GridFn, ScaledScalingFunction
from ..models.fits import RateFit, fit_rate
from ..models.proxies import AnalyticFn
from ..wavelets import ScalingFunction, cached_scaling_function, pair_smooth
from .distribution import ModelledDistribution

logger = logging.getLogger(__name__)

KAPPA = 0.01
DEFAULT_FAMILY = "db3"


def _scaling_function(family: Union[str, int, ScalingFunction]) -> ScalingFunction:
    if isinstance(family, ScalingFunction):
        return family
    return cached_scaling_function(family)


@dataclass(frozen=True, eq=False)
class WaveletExpansion(DistributionProxy):
    """``sum_i coeffs[i] phi^n_{(k0 + i) 2^-n}``."""

    sf: ScalingFunction
    n: int
    k0: int
    coeffs: np.ndarray

    @property
    def points(self) -> np.ndarray:
        return (self.k0 + np.arange(len(self.coeffs))) * 2.0**-self.n

    def coefficient(self, x: float) -> float:
        i = int(round(x * 2.0**self.n)) - self.k0
        return float(self.coeffs[i]) if 0 <= i < len(self.coeffs) else 0.0

    def pair(self, test) -> float:
        lo, hi = test.bounds[0]
        scale = 2.0**self.n
        start = max(0, int(np.floor(lo * scale)) - self.sf.length - self.k0)
        stop = min(len(self.coeffs), int(np.ceil(hi * scale)) + 1 - self.k0)
        total = 0.0
        for i in range(start, stop):
            c = self.coeffs[i]
            if c != 0.0:
                total += c * pair_smooth(self.sf, self.n, (self.k0 + i) / scale, test)
        return float(total)

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        u = x * 2.0**self.n
        base = np.floor(u).astype(int)
        out = np.zeros_like(x)
        for j in range(self.sf.length + 1):
            k = base - j
            i = k - self.k0
            ok = (i >= 0) & (i < len(self.coeffs))
            vals = np.where(ok, self.coeffs[np.clip(i, 0, len(self.coeffs) - 1)], 0.0)
            out = out + vals * self.sf(u - k)
        return out * 2.0 ** (self.n / 2)

    def to_grid(self, level: int, window: Tuple[float, float] = (0.0, 1.0)) -> GridFn:
        h = 2.0**-level
        nodes = np.arange(int(round((window[1] - window[0]) / h)) + 1) * h + window[0]
        return GridFn(self.evaluate(nodes), window[0], h)


def check_reconstructible(f: ModelledDistribution, sf: ScalingFunction, kappa: float = KAPPA) -> None:
    """
    Raises:
        ReconstructionError: If ``gamma <= 0`` or the wavelet order does not
            exceed the magnitude of the lowest degree
    """
    gamma = f.gamma.value(kappa)
    if gamma <= 0:
        raise ReconstructionError(f"reconstruction needs gamma > 0, got {f.gamma}")
    lowest = min(d.value(kappa) for d in f.model.structure.label_degrees)
    if lowest < 0 and sf.order <= abs(lowest):
        raise ReconstructionError(
            f"wavelet order {sf.order} does not exceed |{lowest:.3f}|"
        )


def wavelet_coefficients(
    f: ModelledDistribution, sf: ScalingFunction, n: int, window: Tuple[float, float]
) -> Tuple[int, np.ndarray]:
    """``(Pi_x f(x))(phi^n_x)`` for every lattice point whose wavelet meets ``window``."""
    scale = 2.0**n
    k0 = int(np.floor(window[0] * scale)) - sf.length
    k1 = int(np.ceil(window[1] * scale))
    coeffs = np.zeros(k1 - k0 + 1)
    model = f.model
    for i, k in enumerate(range(k0, k1 + 1)):
        x = k / scale
        vec = f(x)
        if not vec.any():
            continue
        coeffs[i] = model.pi_vector(x, vec).pair(ScaledScalingFunction(sf, n, x))
    return k0, coeffs


def reconstruct(
    f: ModelledDistribution,
    n_max: int,
    family: Union[str, int, ScalingFunction] = DEFAULT_FAMILY,
    window: Tuple[float, float] = (0.0, 1.0),
) -> WaveletExpansion:
    """
    ``R^{n_max} f`` as a wavelet expansion; ``to_grid`` samples it.

    Raises:
        ReconstructionError: If ``gamma <= 0`` or the wavelet is too short
    """
    sf = _scaling_function(family)
    check_reconstructible(f, sf)
    k0, coeffs = wavelet_coefficients(f, sf, n_max, window)
    logger.debug("reconstructed %s at level %d (%d coefficients)", f.name, n_max, len(coeffs))
    return WaveletExpansion(sf, n_max, k0, coeffs)


def reconstruct_pointwise(f: ModelledDistribution) -> AnalyticFn:
    """``(Rf)(x) = (Pi_x f(x))(x)`` for models made of continuous functions."""
    if not f.model.is_continuous:
        raise ReconstructionError(f"model {f.model.name} is not continuous")
    model = f.model

    def value(ys):
        ys = np.asarray(ys, dtype=float)
        if model.dim == 1:
            flat = ys.reshape(-1)
            out = np.array(
                [model.pi_vector(y, f(y)).evaluate(np.array([y]))[0] for y in flat]
            )
            return out.reshape(ys.shape)
        rows = ys.reshape(-1, model.dim)
        return np.array(
            [np.asarray(model.pi_vector(y, f(y)).evaluate(y[None, :])).reshape(-1)[0] for y in rows]
        )

    return AnalyticFn(value, model.dim)


def reconstruction_increments(
    f: ModelledDistribution,
    levels: Sequence[int],
    family: Union[str, int, ScalingFunction] = DEFAULT_FAMILY,
    window: Tuple[float, float] = (0.25, 0.75),
) -> RateFit:
    """Fit ``sup_x |<R^{n+1} f - R^n f, phi^n_x>|`` against ``2^-n``.

    The refinement relation gives ``<R^{n+1} f, phi^n_x> = sum_k a_k c^{n+1}_{x + k 2^-(n+1)}``.
    """
    sf = _scaling_function(family)
    check_reconstructible(f, sf)
    values = []
    for n in levels:
        # refinement at x reaches sf.length fine cells to the right
        margin = max(1.0 / 8, (sf.length + 1) * 2.0 ** -(n + 1))
        outer = (window[0] - margin, window[1] + margin)
        coarse_k0, coarse = wavelet_coefficients(f, sf, n, outer)
        fine_k0, fine = wavelet_coefficients(f, sf, n + 1, outer)
        worst = 0.0
        for k in range(int(np.ceil(window[0] * 2**n)), int(np.floor(window[1] * 2**n)) + 1):
            refined = sum(
                a * fine[2 * k + j - fine_k0] for j, a in enumerate(sf.coeffs)
            )
            worst = max(worst, abs(refined - coarse[k - coarse_k0]))
        values.append(worst)
    return fit_rate([2.0**-n for n in levels], values)


@dataclass(frozen=True)
class ReconstructionRate:
    fit: RateFit
    gamma: float
    slack: float
    lambdas: List[float]
    errors: List[float]

    @property
    def passed(self) -> bool:
        return self.fit.at_least(self.gamma, self.slack)

    def to_dict(self) -> Dict:
        return {
            "gamma": self.gamma,
            "slack": self.slack,
            "passed": self.passed,
            "exponent": self.fit.exponent,
            "constant": self.fit.constant,
            "lambdas": self.lambdas,
            "errors": self.errors,
        }


def reconstruction_rate(
    f: ModelledDistribution,
    centers: Sequence[float],
    lambdas: Sequence[float],
    n_max: int,
    family: Union[str, int, ScalingFunction] = DEFAULT_FAMILY,
    window: Tuple[float, float] = (0.0, 1.0),
    slack: float = 0.1,
    expansion: WaveletExpansion = None,
) -> ReconstructionRate:
    """Fit the mean of ``|(Rf - Pi_x f(x))(phi^lam_x)|`` over ``centers`` against ``lam``."""
    R = expansion or reconstruct(f, n_max, family, window)
    errors = []
    for lam in lambdas:
        errs = []
        for x in centers:
            test = Bump((x,), lam)
            local = f.model.pi_vector(x, f(x)).pair(test)
            errs.append(abs(R.pair(test) - local))
        errors.append(float(np.mean(errs)))
        logger.info("lambda=%.5f mean error %.3e", lam, errors[-1])
    fit = fit_rate(lambdas, errors)
    return ReconstructionRate(fit, f.gamma.value(KAPPA), slack, list(lambdas), errors)
