"""
Graded index sets and graded linear maps.

A ``GradedMap`` stores a dense matrix ``M`` with ``M[i, j]`` the coefficient
of basis vector ``i`` in the image of basis vector ``j``. Exact maps keep
sympy/Fraction entries in an object array; numeric maps use float64.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Hashable, List, Sequence, Tuple

import numpy as np
import sympy as sp

from ..errors import GradingError
from .homogeneity import Homogeneity

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GradedIndexSet:
    """Finite basis with a homogeneity attached to every label.

    Labels are opaque hashables owned by the consuming module. They are kept in
    non-decreasing order of degree.
    """

    labels: Tuple[Hashable, ...]
    label_degrees: Tuple[Homogeneity, ...]
    _index: Dict[Hashable, int] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(self.labels) != len(self.label_degrees):
            raise GradingError("labels and degrees differ in length")
        if len(set(self.labels)) != len(self.labels):
            raise GradingError("duplicate basis labels")
        for a, b in zip(self.label_degrees, self.label_degrees[1:]):
            if b < a:
                raise GradingError("basis labels must be sorted by degree")
        object.__setattr__(
            self, "_index", {lab: i for i, lab in enumerate(self.labels)}
        )

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[Hashable, Homogeneity]]) -> "GradedIndexSet":
        ordered = sorted(enumerate(pairs), key=lambda p: (p[1][1], p[0]))
        return cls(
            tuple(lab for _, (lab, _) in ordered),
            tuple(deg for _, (_, deg) in ordered),
        )

    @property
    def degrees(self) -> List[Homogeneity]:
        """Distinct degrees, strictly increasing."""
        out: List[Homogeneity] = []
        for d in self.label_degrees:
            if not out or out[-1] != d:
                out.append(d)
        return out

    def labels_of_degree(self, degree: Homogeneity) -> List[Hashable]:
        return [l for l, d in zip(self.labels, self.label_degrees) if d == degree]

    def index(self, label: Hashable) -> int:
        return self._index[label]

    def degree(self, label: Hashable) -> Homogeneity:
        return self.label_degrees[self._index[label]]

    def __contains__(self, label: Hashable) -> bool:
        return label in self._index

    def __len__(self) -> int:
        return len(self.labels)

    def restrict_below(self, bound: Homogeneity) -> "GradedIndexSet":
        keep = [(l, d) for l, d in zip(self.labels, self.label_degrees) if d < bound]
        return GradedIndexSet(tuple(l for l, _ in keep), tuple(d for _, d in keep))


def _is_zero(x, tol: float) -> bool:
    if isinstance(x, (int, Fraction)):
        return x == 0
    if isinstance(x, sp.Basic):
        return sp.expand(x) == 0
    return abs(x) <= tol


@dataclass(frozen=True)
class GradedMap:
    """Linear map between graded spaces given by its coefficient matrix."""

    domain: GradedIndexSet
    codomain: GradedIndexSet
    matrix: np.ndarray
    exact: bool = False

    def __post_init__(self):
        shape = (len(self.codomain), len(self.domain))
        if self.matrix.shape != shape:
            raise GradingError(f"matrix shape {self.matrix.shape} != {shape}")

    @classmethod
    def identity(cls, space: GradedIndexSet, exact: bool = False) -> "GradedMap":
        if exact:
            m = np.empty((len(space), len(space)), dtype=object)
            m[:] = sp.Integer(0)
            for i in range(len(space)):
                m[i, i] = sp.Integer(1)
        else:
            m = np.eye(len(space))
        return cls(space, space, m, exact)

    @classmethod
    def from_images(
        cls,
        space: GradedIndexSet,
        images: Dict[Hashable, Dict[Hashable, object]],
        exact: bool = False,
    ) -> "GradedMap":
        """Build a map on ``space`` from ``{label: {label: coefficient}}``.

        Labels absent from ``images`` are mapped to zero.
        """
        n = len(space)
        if exact:
            m = np.empty((n, n), dtype=object)
            m[:] = sp.Integer(0)
        else:
            m = np.zeros((n, n))
        for src, image in images.items():
            j = space.index(src)
            for dst, c in image.items():
                m[space.index(dst), j] = sp.sympify(c) if exact else float(c)
        return cls(space, space, m, exact)

    def apply(self, vector: np.ndarray) -> np.ndarray:
        return self.matrix.dot(vector)

    def image(self, label: Hashable) -> Dict[Hashable, object]:
        j = self.domain.index(label)
        col = self.matrix[:, j]
        return {
            self.codomain.labels[i]: c
            for i, c in enumerate(col)
            if not _is_zero(c, 0.0)
        }

    def __matmul__(self, other: "GradedMap") -> "GradedMap":
        if other.codomain != self.domain:
            raise GradingError("cannot compose maps with mismatched gradings")
        exact = self.exact and other.exact
        product = self.matrix.dot(other.matrix)
        if exact:
            product = np.vectorize(sp.expand, otypes=[object])(product)
        else:
            product = product.astype(float)
        return GradedMap(other.domain, self.codomain, product, exact)

    def __sub__(self, other: "GradedMap") -> "GradedMap":
        return GradedMap(
            self.domain, self.codomain, self.matrix - other.matrix, self.exact and other.exact
        )

    def to_float(self, subs: Dict = None) -> "GradedMap":
        if not self.exact:
            return self
        subs = subs or {}
        m = np.array(
            [[float(sp.sympify(c).subs(subs)) for c in row] for row in self.matrix]
        )
        return GradedMap(self.domain, self.codomain, m, False)

    def inverse_unipotent(self) -> "GradedMap":
        """Inverse of ``I + N`` with nilpotent ``N`` via the finite Neumann series."""
        ident = GradedMap.identity(self.domain, self.exact)
        nil = self - ident
        term = ident
        total = ident
        for k in range(1, len(self.domain) + 1):
            term = term @ nil
            sign = -1 if k % 2 else 1
            if self.exact:
                total = GradedMap(
                    self.domain,
                    self.domain,
                    np.vectorize(sp.expand, otypes=[object])(
                        total.matrix + sign * term.matrix
                    ),
                    True,
                )
            else:
                total = GradedMap(
                    self.domain, self.domain, total.matrix + sign * term.matrix
                )
        return total

    def max_abs_entry(self) -> float:
        if self.exact:
            return max(
                (float(abs(sp.N(c))) for c in self.matrix.ravel() if c != 0),
                default=0.0,
            )
        return float(np.max(np.abs(self.matrix))) if self.matrix.size else 0.0


@dataclass(frozen=True)
class TriangularityReport:
    passed: bool
    offending: List[Tuple[Hashable, Hashable]]
    direction: str


def check_lower_triangular(
    m: GradedMap, direction: str = "lower", tol: float = 1e-10
) -> TriangularityReport:
    """Check that ``m`` is the identity plus terms of strictly smaller degree.

    With ``direction="raising"`` the correction terms must instead lie in
    strictly higher degrees, the shape of renormalization maps.

    Raises:
        GradingError: If the map is not square with matching grading.
    """
    if m.domain != m.codomain:
        raise GradingError("check_lower_triangular needs a square map on one grading")
    if direction not in ("lower", "raising"):
        raise ValueError(f"unknown direction '{direction}'")
    space = m.domain
    offending = []
    for j, src in enumerate(space.labels):
        dj = space.label_degrees[j]
        for i, dst in enumerate(space.labels):
            di = space.label_degrees[i]
            c = m.matrix[i, j]
            if i == j:
                target = c - 1
                ok = _is_zero(target, tol)
            elif di == dj:
                ok = _is_zero(c, tol)
            elif (di < dj) == (direction == "lower"):
                ok = True
            else:
                ok = _is_zero(c, tol)
            if not ok:
                offending.append((dst, src))
    if offending:
        logger.debug("triangularity violated in %d entries", len(offending))
    return TriangularityReport(not offending, offending, direction)
