"""
Discretised rough paths ``(X, XX)`` on a uniform dyadic grid of ``[0, 1]``.

A ``RoughPath`` stores the path at the grid nodes and, for every cell
``[t_k, t_{k+1}]``, the iterated integral over that cell. Iterated integrals
over longer intervals follow from Chen's relation, evaluated with prefix
sums so that any grid pair costs O(1).
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from ..errors import ModelError
from ..wavelets import DyadicGrid

logger = logging.getLogger(__name__)

BROWNIAN_SUBSTEPS = 4
CELL_QUADRATURE_NODES = 8


@dataclass(frozen=True, eq=False)
class RoughPath:
    """Path values ``X`` of shape ``(K+1, n)`` and cell areas of shape ``(K, n, n)``."""

    times: np.ndarray
    X: np.ndarray
    area: np.ndarray
    alpha: float = 0.4
    kind: str = "custom"
    meta: Dict = field(default_factory=dict)

    def __post_init__(self):
        if self.X.ndim != 2 or self.area.shape != (
            len(self.X) - 1,
            self.X.shape[1],
            self.X.shape[1],
        ):
            raise ModelError("path and area shapes are inconsistent")
        if len(self.times) != len(self.X):
            raise ModelError("times and path values differ in length")

    @property
    def n(self) -> int:
        return self.X.shape[1]

    @property
    def cells(self) -> int:
        return len(self.area)

    @property
    def h(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def level(self) -> int:
        return int(round(-np.log2(self.h)))

    @cached_property
    def dX(self) -> np.ndarray:
        return np.diff(self.X, axis=0)

    @cached_property
    def _cum_area(self) -> np.ndarray:
        out = np.zeros((self.cells + 1, self.n, self.n))
        np.cumsum(self.area, axis=0, out=out[1:])
        return out

    @cached_property
    def _cum_cross(self) -> np.ndarray:
        out = np.zeros((self.cells + 1, self.n, self.n))
        cross = self.X[:-1, :, None] * self.dX[:, None, :]
        np.cumsum(cross, axis=0, out=out[1:])
        return out

    def index(self, t: float) -> int:
        """Nearest grid index of time ``t``."""
        k = int(round((float(t) - self.times[0]) / self.h))
        return min(max(k, 0), self.cells)

    def increment(self, i: int, j: int) -> np.ndarray:
        """``X_{t_i, t_j}``."""
        return self.X[j] - self.X[i]

    def iterated(self, i: int, j: int) -> np.ndarray:
        """``XX_{t_i, t_j}`` for grid indices ``i <= j`` (any order is accepted)."""
        xs = self.X[i]
        return (
            self._cum_area[j]
            - self._cum_area[i]
            + self._cum_cross[j]
            - self._cum_cross[i]
            - np.outer(xs, self.X[j] - xs)
        )

    def iterated_direct(self, i: int, j: int) -> np.ndarray:
        """``XX_{t_i, t_j}`` by summing cell contributions one by one."""
        if j <= i:
            return np.zeros((self.n, self.n))
        rel = self.X[i:j] - self.X[i]
        return self.area[i:j].sum(axis=0) + np.einsum("ka,kb->ab", rel, self.dX[i:j])

    def iterated_from_origin(self) -> np.ndarray:
        """``XX_{0, t_k}`` for every node, shape ``(K+1, n, n)``."""
        x0 = self.X[0]
        return (
            self._cum_area
            + self._cum_cross
            - x0[None, :, None] * (self.X - x0)[:, None, :]
        )

    def coarsen(self, factor: int) -> "RoughPath":
        """Restrict to every ``factor``-th node, merging cell areas by Chen's relation."""
        if factor < 1 or self.cells % factor:
            raise ModelError(f"cannot coarsen {self.cells} cells by {factor}")
        idx = np.arange(0, self.cells + 1, factor)
        area = np.stack([self.iterated(a, b) for a, b in zip(idx[:-1], idx[1:])])
        return RoughPath(self.times[idx], self.X[idx], area, self.alpha, self.kind, dict(self.meta))


def chen_residual(
    rp: RoughPath, triples: int = 200, seed: int = 0, direct: bool = True
) -> float:
    """Max of ``|XX_st - XX_su - XX_ut - X_su (x) X_ut|`` over random grid triples."""
    rng = np.random.default_rng(seed)
    iterated = rp.iterated_direct if direct else rp.iterated
    worst = 0.0
    for _ in range(triples):
        s, u, t = np.sort(rng.integers(0, rp.cells + 1, size=3))
        lhs = iterated(s, t) - iterated(s, u) - iterated(u, t)
        rhs = np.outer(rp.increment(s, u), rp.increment(u, t))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


@dataclass(frozen=True)
class HolderReport:
    alpha: float
    path_constant: float
    area_constant: float
    chen: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.path_constant) and np.isfinite(self.area_constant))

    def to_dict(self) -> Dict:
        return {
            "alpha": self.alpha,
            "path_constant": self.path_constant,
            "area_constant": self.area_constant,
            "chen_residual": self.chen,
            "passed": self.passed,
        }


def holder_report(rp: RoughPath, alpha: Optional[float] = None, max_pairs: int = 4000) -> HolderReport:
    """Fitted constants in ``|X_st| <= C|t-s|^a`` and ``|XX_st| <= C|t-s|^2a``."""
    alpha = rp.alpha if alpha is None else alpha
    rng = np.random.default_rng(1)
    c_path = 0.0
    c_area = 0.0
    for gap in (2**p for p in range(int(np.log2(rp.cells)) + 1)):
        starts = np.arange(0, rp.cells + 1 - gap)
        if len(starts) > max_pairs // 8:
            starts = rng.choice(starts, size=max_pairs // 8, replace=False)
        dt = gap * rp.h
        for s in starts:
            c_path = max(c_path, float(np.linalg.norm(rp.increment(s, s + gap))) / dt**alpha)
            c_area = max(
                c_area, float(np.linalg.norm(rp.iterated(s, s + gap))) / dt ** (2 * alpha)
            )
    return HolderReport(alpha, c_path, c_area, chen_residual(rp, direct=False))


def _grid_times(grid: Union[DyadicGrid, int]) -> np.ndarray:
    if isinstance(grid, int):
        grid = DyadicGrid(grid)
    if grid.dim != 1:
        raise ModelError("rough paths live on one-dimensional grids")
    return grid.axis(0)


def _brownian(times: np.ndarray, n: int, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    cells = len(times) - 1
    h = (times[-1] - times[0]) / cells
    fine = rng.normal(0.0, np.sqrt(h / BROWNIAN_SUBSTEPS), size=(cells, BROWNIAN_SUBSTEPS, n))
    # left-point sums inside each cell: sum_m (W_m - W_cell) (x) dW_m
    partial = np.cumsum(fine, axis=1) - fine
    area = np.einsum("kma,kmb->kab", partial, fine)
    X = np.zeros((cells + 1, n))
    np.cumsum(fine.sum(axis=1), axis=0, out=X[1:])
    return X, area


def _trig_component(j: int) -> Tuple[Callable, Callable]:
    freq = j // 2 + 1
    if j % 2 == 0:
        return (lambda t: np.cos(freq * t) / freq, lambda t: -np.sin(freq * t))
    return (lambda t: np.sin(freq * t) / freq, lambda t: np.cos(freq * t))


def _poly_component(j: int) -> Tuple[Callable, Callable]:
    p = j + 1
    return (lambda t: t**p, lambda t: p * t ** (p - 1))


def _smooth(times: np.ndarray, components) -> Tuple[np.ndarray, np.ndarray]:
    """Path values and per-cell iterated integrals by Gauss-Legendre quadrature."""
    ref_x, ref_w = np.polynomial.legendre.leggauss(CELL_QUADRATURE_NODES)
    s = times[:-1]
    half = 0.5 * np.diff(times)
    nodes = (s + half)[:, None] + half[:, None] * ref_x[None, :]
    weights = half[:, None] * ref_w[None, :]
    X = np.stack([f(times) for f, _ in components], axis=1)
    value_inc = np.stack([f(nodes) - f(s)[:, None] for f, _ in components], axis=1)
    deriv = np.stack([df(nodes) for _, df in components], axis=1)
    area = np.einsum("kaq,kbq,kq->kab", value_inc, deriv, weights)
    return X, area


ROUGH_PATH_KINDS = ("brownian", "trig", "polynomial", "zero")


def sample_rough_path(
    kind: str,
    n: int,
    grid: Union[DyadicGrid, int],
    seed: Optional[int] = None,
    alpha: float = 0.4,
) -> RoughPath:
    """
    Sample or build a rough path on ``grid``.

    ``brownian`` draws Gaussian increments and builds the areas by left-point
    sums on an internal grid four times finer; ``trig`` uses the coordinates
    ``cos t, sin t, cos 2t / 2, ...``; ``polynomial`` uses ``t, t^2, ...``;
    ``zero`` is the trivial path.

    Raises:
        ModelError: If a brownian path is requested without a seed, or the
            kind is unknown
    """
    if n < 1:
        raise ModelError("path dimension must be positive")
    times = _grid_times(grid)
    if kind == "brownian":
        if seed is None:
            raise ModelError("brownian rough paths need an explicit seed")
        X, area = _brownian(times, n, seed)
    elif kind == "trig":
        X, area = _smooth(times, [_trig_component(j) for j in range(n)])
    elif kind == "polynomial":
        X, area = _smooth(times, [_poly_component(j) for j in range(n)])
    elif kind == "zero":
        X, area = np.zeros((len(times), n)), np.zeros((len(times) - 1, n, n))
    else:
        raise ModelError(
            f"Unknown rough path kind '{kind}'. Available: {', '.join(ROUGH_PATH_KINDS)}"
        )
    logger.info("sampled %s rough path: n=%d, %d cells", kind, n, len(times) - 1)
    return RoughPath(times, X, area, alpha, kind, {"seed": seed})


def polynomial_area_closed_form(s: float, t: float) -> float:
    """``XX^{1,2}_{s,t}`` for ``X = (t, t^2)``."""
    return 2.0 * (t**3 - s**3) / 3.0 - s * (t**2 - s**2)


def _columns(n: int) -> List[str]:
    cols = ["t"] + [f"X{i + 1}" for i in range(n)]
    cols += [f"XX{a + 1}_{b + 1}" for a in range(n) for b in range(n)]
    return cols


def export_csv(rp: RoughPath, path: Union[str, Path]) -> Path:
    """Write ``t, X1..Xn, XX1_1..XXn_n`` with ``XX`` taken from time 0."""
    path = Path(path)
    cols = _columns(rp.n)
    xx = rp.iterated_from_origin().reshape(len(rp.times), -1)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=cols, lineterminator="\n")
        writer.writeheader()
        for k, t in enumerate(rp.times):
            row = [t, *rp.X[k], *xx[k]]
            writer.writerow({c: repr(float(v)) for c, v in zip(cols, row)})
    return path


def import_csv(path: Union[str, Path], alpha: float = 0.4) -> RoughPath:
    """
    Read a rough path written by ``export_csv``.

    Raises:
        ModelError: If the columns or time grid are malformed
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        n = sum(1 for f in fields if f.startswith("X") and not f.startswith("XX"))
        if fields != _columns(n):
            raise ModelError(f"unexpected rough path columns: {fields}")
        rows = [[float(r[c]) for c in fields] for r in reader]
    if len(rows) < 2:
        raise ModelError("rough path file needs at least two rows")
    data = np.array(rows)
    times, X = data[:, 0], data[:, 1 : 1 + n]
    xx0 = data[:, 1 + n :].reshape(len(times), n, n)
    steps = np.diff(times)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12):
        raise ModelError("rough path times must be uniformly spaced")
    # Chen with (0, t_k, t_{k+1}) isolates the cell area
    inc0 = X[:-1] - X[0]
    area = xx0[1:] - xx0[:-1] - inc0[:, :, None] * np.diff(X, axis=0)[:, None, :]
    return RoughPath(times, X, area, alpha, "imported", {"source": str(path)})
