"""Refinement coefficients of the shipped orthonormal scaling functions."""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt
from typing import Dict, Tuple


@dataclass(frozen=True)
class WaveletFamily:
    """Coefficients ``a_k`` with ``phi(x) = sqrt(2) sum_k a_k phi(2x - k)``.

    ``order`` is the number of vanishing moments of the detail function and
    ``regularity`` the Hoelder exponent of the scaling function.
    """

    name: str
    coeffs: Tuple[float, ...]
    order: int
    regularity: float

    @property
    def support(self) -> Tuple[int, int]:
        return (0, len(self.coeffs) - 1)


def _db2() -> Tuple[float, ...]:
    r3 = sqrt(3.0)
    scale = 4.0 * sqrt(2.0)
    return tuple(c / scale for c in (1 + r3, 3 + r3, 3 - r3, 1 - r3))


def _db3() -> Tuple[float, ...]:
    r10 = sqrt(10.0)
    s = sqrt(5.0 + 2.0 * r10)
    scale = sqrt(2.0) / 32.0
    raw = (
        1 + r10 + s,
        5 + r10 + 3 * s,
        10 - 2 * r10 + 2 * s,
        10 - 2 * r10 - 2 * s,
        5 + r10 - 3 * s,
        1 + r10 - s,
    )
    return tuple(scale * c for c in raw)


FAMILIES: Dict[str, WaveletFamily] = {
    "haar": WaveletFamily("haar", (1 / sqrt(2.0), 1 / sqrt(2.0)), 1, 0.0),
    "db2": WaveletFamily("db2", _db2(), 2, 0.55),
    "db3": WaveletFamily("db3", _db3(), 3, 1.08),
}

ORDER_ALIASES = {1: "haar", 2: "db2", 3: "db3"}


def get_family(name) -> WaveletFamily:
    """Look up a family by name or by order (1, 2, 3).

    Raises:
        ValueError: If no such family is shipped.
    """
    if isinstance(name, int):
        name = ORDER_ALIASES.get(name, str(name))
    if name not in FAMILIES:
        available = ", ".join(FAMILIES)
        raise ValueError(f"Unknown wavelet family '{name}'. Available: {available}")
    return FAMILIES[name]
