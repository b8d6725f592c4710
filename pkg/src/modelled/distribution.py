"""
Modelled distributions: coefficient fields ``x -> f(x)`` in ``T_{<gamma}``.

Coefficients are vectors over ``model.structure``; components whose degree is
not below ``gamma`` are always zero. Degree bookkeeping (``gamma``, the
lowest degree ``alpha`` and the sector) stays in exact ``Homogeneity``
arithmetic.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..algebra import Homogeneity
from ..models import Model
from ..models.fits import RateFit, fit_rate
from ..models.verify import scaled_distance

logger = logging.getLogger(__name__)

CoefficientFn = Callable[[object], np.ndarray]


@dataclass(frozen=True, eq=False)
class ModelledDistribution:
    model: Model
    gamma: Homogeneity
    coeff_fn: CoefficientFn
    alpha: Optional[Homogeneity] = None
    sector: Optional[Tuple[Hashable, ...]] = None
    name: str = "f"
    _mask: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        gamma = Homogeneity.from_number(self.gamma)
        object.__setattr__(self, "gamma", gamma)
        space = self.model.structure
        sector = self.sector
        if sector is None:
            sector = tuple(l for l, d in zip(space.labels, space.label_degrees) if d < gamma)
        object.__setattr__(self, "sector", tuple(sector))
        mask = np.array([l in sector and d < gamma for l, d in zip(space.labels, space.label_degrees)])
        object.__setattr__(self, "_mask", mask)
        if self.alpha is None:
            degrees = [space.degree(l) for l in self.sector]
            object.__setattr__(self, "alpha", min(degrees) if degrees else gamma)
        else:
            object.__setattr__(self, "alpha", Homogeneity.from_number(self.alpha))

    def __call__(self, x) -> np.ndarray:
        values = np.asarray(self.coeff_fn(x), dtype=float)
        return np.where(self._mask, values, 0.0)

    @property
    def labels(self) -> Tuple[Hashable, ...]:
        return self.model.structure.labels

    def component(self, x, label: Hashable) -> float:
        return float(self(x)[self.model.structure.index(label)])

    def __add__(self, other: "ModelledDistribution") -> "ModelledDistribution":
        return linear_combination([(1.0, self), (1.0, other)])

    def __rmul__(self, c: float) -> "ModelledDistribution":
        return linear_combination([(float(c), self)])

    @classmethod
    def from_table(
        cls,
        model: Model,
        gamma,
        times: np.ndarray,
        table: np.ndarray,
        **kwargs,
    ) -> "ModelledDistribution":
        """Coefficients tabulated on a uniform one-dimensional grid (nearest node)."""
        times = np.asarray(times, dtype=float)
        table = np.asarray(table, dtype=float)
        h = times[1] - times[0]

        def lookup(x):
            k = int(round((float(np.asarray(x).reshape(-1)[0]) - times[0]) / h))
            return table[min(max(k, 0), len(times) - 1)]

        return cls(model, gamma, lookup, **kwargs)


def linear_combination(terms: Sequence[Tuple[float, ModelledDistribution]]) -> ModelledDistribution:
    """``sum c_i f_i`` over a shared model; gamma is the smallest of the inputs."""
    first = terms[0][1]
    gamma = min(f.gamma for _, f in terms)
    sector = tuple(dict.fromkeys(l for _, f in terms for l in f.sector))
    return ModelledDistribution(
        first.model,
        gamma,
        lambda x: sum(c * f(x) for c, f in terms),
        sector=sector,
        name="+".join(f.name for _, f in terms),
    )


def zero_distribution(model: Model, gamma) -> ModelledDistribution:
    n = len(model.structure)
    return ModelledDistribution(model, gamma, lambda x: np.zeros(n), name="0")


def constant_distribution(model: Model, gamma, label: Hashable, value: float = 1.0) -> ModelledDistribution:
    """``f(x) = value * label`` at every point."""
    vec = np.zeros(len(model.structure))
    vec[model.structure.index(label)] = value
    return ModelledDistribution(model, gamma, lambda x: vec.copy(), name=str(label))


def polynomial_jet(
    model: Model,
    gamma,
    derivatives: Union[Sequence[Callable], Mapping[Tuple[int, ...], Callable]],
) -> ModelledDistribution:
    """
    Taylor jet ``sum_k D^k f(x)/k! X^k`` on a polynomial model.

    A sequence lists ``f, f', f'', ...`` on the line as scalar callables; a
    mapping sends multi-indices ``k`` to callables vectorised over points.
    """
    if not isinstance(derivatives, Mapping):

        def coeffs(x):
            x = float(np.asarray(x).reshape(-1)[0])
            return model.jet([float(d(x)) for d in derivatives])

        return ModelledDistribution(model, gamma, coeffs, name="jet")

    factorials = {k: math.prod(math.factorial(e) for e in k) for k in derivatives}

    def coeffs(x):
        point = np.asarray(x, dtype=float).reshape(-1)
        arg = point if model.dim == 1 else point[None, :]
        out = np.zeros(len(model.structure))
        for i, label in enumerate(model.labels):
            k = tuple(label)
            if k in derivatives:
                out[i] = float(np.asarray(derivatives[k](arg)).reshape(-1)[0]) / factorials[k]
        return out

    return ModelledDistribution(model, gamma, coeffs, name="jet")


@dataclass(frozen=True)
class SeminormReport:
    """Empirical ``D^gamma`` constants per target degree."""

    gamma: float
    constants: Dict[str, float]
    fits: Dict[str, RateFit]
    expected: Dict[str, float]

    @property
    def passed(self) -> bool:
        return all(np.isfinite(c) for c in self.constants.values())

    def to_dict(self) -> Dict:
        return {
            "gamma": self.gamma,
            "passed": self.passed,
            "constants": self.constants,
            "expected_exponents": self.expected,
            "fitted_exponents": {
                k: (None if f.identically_zero else f.exponent) for k, f in self.fits.items()
            },
        }


def _shift(x, d: float, scaling):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = x + np.array([d**s for s in scaling])
    return out if len(out) > 1 else float(out[0])


def dgamma_seminorm(
    f: ModelledDistribution,
    window: Tuple[float, float] = (0.25, 0.75),
    count: int = 16,
    distances: Sequence[float] = tuple(2.0**-p for p in range(2, 9)),
    kappa: float = 0.01,
) -> SeminormReport:
    """``sup |(f(x) - Gamma_xy f(y))_beta| / |x - y|^(gamma - beta)`` over sampled pairs."""
    m = f.model
    space = m.structure
    points = list(m.sample_points(window, count))
    gamma = f.gamma.value(kappa)
    degrees = [d for d in space.degrees if d < f.gamma]
    worst = {d: np.zeros(len(distances)) for d in degrees}
    ratio = {d: 0.0 for d in degrees}
    for i, dist in enumerate(distances):
        for x in points:
            y = _shift(x, dist, m.scaling)
            diff = f(x) - m.gamma(x, y).apply(f(y))
            r = scaled_distance(x, y, m.scaling)
            for d in degrees:
                rows = [j for j, dj in enumerate(space.label_degrees) if dj == d]
                size = float(np.max(np.abs(diff[rows])))
                worst[d][i] = max(worst[d][i], size)
                ratio[d] = max(ratio[d], size / r ** (gamma - d.value(kappa)))
    scaled = [m.dim * dist for dist in distances]
    fits = {str(d): fit_rate(scaled, worst[d], zero_tol=1e-13) for d in degrees}
    expected = {str(d): gamma - d.value(kappa) for d in degrees}
    logger.debug("D^gamma constants for %s: %s", f.name, ratio)
    return SeminormReport(gamma, {str(d): ratio[d] for d in degrees}, fits, expected)
