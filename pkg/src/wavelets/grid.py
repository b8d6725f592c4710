"""Dyadic lattices 2^-n Z^d restricted to a bounding box."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np


@dataclass(frozen=True)
class DyadicGrid:
    level: int
    dim: int = 1
    box: Tuple[Tuple[float, float], ...] = ((0.0, 1.0),)

    def __post_init__(self):
        box = tuple(tuple(map(float, b)) for b in self.box)
        if len(box) == 1 and self.dim > 1:
            box = box * self.dim
        if len(box) != self.dim:
            raise ValueError("box must have one interval per dimension")
        object.__setattr__(self, "box", box)

    @property
    def spacing(self) -> float:
        return 2.0**-self.level

    def axis(self, i: int = 0) -> np.ndarray:
        lo, hi = self.box[i]
        start = np.ceil(lo / self.spacing - 1e-9)
        stop = np.floor(hi / self.spacing + 1e-9)
        return np.arange(start, stop + 1) * self.spacing

    @property
    def points(self) -> np.ndarray:
        if self.dim == 1:
            return self.axis(0)
        axes = [self.axis(i) for i in range(self.dim)]
        return np.array(list(itertools.product(*axes)))

    def refine(self) -> "DyadicGrid":
        return DyadicGrid(self.level + 1, self.dim, self.box)

    def is_nested_in(self, other: "DyadicGrid") -> bool:
        """True when every point of this grid is a point of ``other``."""
        if other.level < self.level or other.box != self.box:
            return False
        scaled = self.points / other.spacing
        return bool(np.allclose(scaled, np.round(scaled)))


def dyadic_levels(lo: int, hi: int) -> Sequence[int]:
    return list(range(lo, hi + 1)) if hi >= lo else list(range(lo, hi - 1, -1))
