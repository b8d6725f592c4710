"""Product ``B(f, xi)`` of a Hoelder function with a distribution via reconstruction."""

from __future__ import annotations

import math
from typing import Callable, Sequence, Tuple

import numpy as np

from ..algebra import Homogeneity
from ..errors import PairingError
from ..models import DistributionProxy, MollifiedNoiseModel, mollified_noise_model
from ..models.noise import NOISE
from .distribution import ModelledDistribution
from .reconstruct import WaveletExpansion, reconstruct


def noise_jet(
    model: MollifiedNoiseModel,
    gamma,
    derivatives: Sequence[Callable[[float], float]],
) -> ModelledDistribution:
    """``Xi F`` with ``F = sum_k f^(k)(x)/k! X^k`` on the noise block of ``model``."""
    space = model.structure
    degree = min(len(derivatives) - 1, model.max_degree)

    def coeffs(x):
        x = float(np.asarray(x).reshape(-1)[0])
        vec = np.zeros(len(space))
        for k in range(degree + 1):
            vec[space.index((NOISE, k))] = float(derivatives[k](x)) / math.factorial(k)
        return vec

    sector = tuple((NOISE, k) for k in range(degree + 1))
    a = Homogeneity.from_number(model.alpha)
    return ModelledDistribution(model, gamma, coeffs, alpha=-a, sector=sector, name="ΞF")


def pairing_product(
    derivatives: Sequence[Callable[[float], float]],
    xi: DistributionProxy,
    alpha: float,
    beta: float,
    n_max: int = 8,
    family: str = "db3",
    window: Tuple[float, float] = (0.0, 1.0),
) -> WaveletExpansion:
    """
    Reconstruct ``Xi F`` where ``F`` is the order-``beta`` Taylor jet of ``f``.

    ``derivatives[k]`` evaluates ``f^(k)``; those with ``k < beta`` are used.

    Raises:
        PairingError: If ``beta <= alpha``
    """
    if beta <= alpha:
        raise PairingError(f"product needs beta > alpha (beta={beta}, alpha={alpha})")
    max_degree = max(0, int(math.ceil(beta)) - 1)
    if len(derivatives) <= max_degree:
        raise PairingError(f"need {max_degree + 1} derivatives of f for beta={beta}")
    model = mollified_noise_model(xi, max_degree, alpha)
    gamma = Homogeneity.from_number(beta) - Homogeneity.from_number(alpha)
    f = noise_jet(model, gamma, derivatives[: max_degree + 1])
    return reconstruct(f, n_max, family, window)
