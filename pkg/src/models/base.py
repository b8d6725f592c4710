"""
Model abstraction: a pair (Pi, Gamma) over a graded basis.

``pi(x, label)`` returns a distribution proxy; ``gamma(x, y)`` returns the
re-expansion map sending expansions at ``y`` to expansions at ``x``, so that
``Pi_x Gamma_xy = Pi_y``.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Callable, Dict, Hashable, List, Sequence, Tuple

import numpy as np

from ..algebra import GradedIndexSet, GradedMap
from .proxies import DistributionProxy, combine

KAPPA_NUM = 0.01


class Model(ABC):
    """Abstract model on a finite graded basis."""

    name: str = "model"
    is_continuous: bool = False

    def __init__(self, structure: GradedIndexSet, scaling: Sequence[int] = (1,)):
        self.structure = structure
        self.scaling = tuple(int(s) for s in scaling)

    @property
    def dim(self) -> int:
        return len(self.scaling)

    @property
    def labels(self) -> Tuple[Hashable, ...]:
        return self.structure.labels

    @abstractmethod
    def pi(self, x, label: Hashable) -> DistributionProxy:
        """Distribution ``Pi_x label``."""
        pass

    @abstractmethod
    def gamma(self, x, y) -> GradedMap:
        """Re-expansion map ``Gamma_xy``."""
        pass

    def degree_value(self, label: Hashable, kappa: float = KAPPA_NUM) -> float:
        return self.structure.degree(label).value(kappa)

    def pi_vector(self, x, coeffs) -> DistributionProxy:
        """``Pi_x`` applied to a coefficient vector on ``structure``."""
        coeffs = np.asarray(coeffs, dtype=float)
        return combine(coeffs, [self.pi(x, lab) for lab in self.labels])

    def sample_points(self, window: Tuple[float, float], count: int) -> np.ndarray:
        """Base points used by the verifiers, evenly spaced in ``window``."""
        lo, hi = window
        if self.dim == 1:
            return np.linspace(lo, hi, count)
        axis = np.linspace(lo, hi, count)
        return np.stack([axis] * self.dim, axis=1)

    def describe(self) -> Dict:
        return {
            "name": self.name,
            "labels": [str(l) for l in self.labels],
            "degrees": [str(d) for d in self.structure.label_degrees],
            "scaling": list(self.scaling),
        }


class ModelFactory:
    """Registry of named model builders."""

    _builders: Dict[str, Callable[..., Model]] = {}

    @classmethod
    def register_model(cls, name: str, builder: Callable[..., Model]):
        cls._builders[name] = builder

    @classmethod
    def create_model(cls, name: str, **kwargs) -> Model:
        """
        Build a registered model.

        Raises:
            ValueError: If ``name`` is not registered
        """
        if name not in cls._builders:
            available = ", ".join(cls._builders.keys())
            raise ValueError(f"Unknown model '{name}'. Available: {available}")
        return cls._builders[name](**kwargs)

    @classmethod
    def list_available_models(cls) -> List[str]:
        return list(cls._builders.keys())
