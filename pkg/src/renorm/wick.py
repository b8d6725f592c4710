"""
Wick contractions and Wiener chaos on a grid.

Products of Gaussian factors expand over partial matchings of their legs:
``xi(z_1) ... xi(z_k) = sum over matchings of (contracted pairs) x (Wick
product of the free legs)``. On a grid the Wick product of repeated
standardised Gaussians is a probabilists' Hermite polynomial.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import hermite_e

logger = logging.getLogger(__name__)

MAX_LEGS = 10
DEFAULT_BATCH = 10_000

Pair = Tuple[int, int]


@dataclass(frozen=True)
class PairingDiagram:
    """Partial perfect matching of ``legs`` nodes; unmatched nodes are free."""

    legs: int
    pairs: Tuple[Pair, ...]

    @property
    def free(self) -> Tuple[int, ...]:
        used = {i for p in self.pairs for i in p}
        return tuple(i for i in range(self.legs) if i not in used)

    @property
    def contractions(self) -> int:
        return len(self.pairs)

    def pattern(self, labels: Sequence[Hashable]) -> Tuple:
        """Canonical form once legs carrying the same label are identified."""
        pairs = sorted(tuple(sorted((str(labels[a]), str(labels[b])))) for a, b in self.pairs)
        free = sorted(str(labels[i]) for i in self.free)
        return (tuple(pairs), tuple(free))

    def __str__(self) -> str:
        pairs = " ".join(f"({a}{b})" for a, b in self.pairs)
        free = "".join(str(i) for i in self.free)
        return f"{pairs or '-'} | {free or '-'}"


def _matchings(nodes: Tuple[int, ...]):
    if not nodes:
        yield ()
        return
    first, rest = nodes[0], nodes[1:]
    for tail in _matchings(rest):
        yield tail
    for i, partner in enumerate(rest):
        remaining = rest[:i] + rest[i + 1 :]
        for tail in _matchings(remaining):
            yield ((first, partner),) + tail


def enumerate_wick(
    k: int, labels: Optional[Sequence[Hashable]] = None
) -> List[Tuple[PairingDiagram, int]]:
    """
    All partial matchings of ``k`` legs, each with its multiplicity.

    Without ``labels`` every diagram has multiplicity one. Legs sharing a
    label are interchangeable; diagrams are then merged by pattern and the
    multiplicity counts the merged contractions.

    Raises:
        ValueError: If ``k`` is negative, above the supported size, or does
            not match the number of labels
    """
    if k < 0 or k > MAX_LEGS:
        raise ValueError(f"number of legs must lie in 0..{MAX_LEGS}, got {k}")
    if labels is not None and len(labels) != k:
        raise ValueError(f"{len(labels)} labels given for {k} legs")
    diagrams = [PairingDiagram(k, pairs) for pairs in _matchings(tuple(range(k)))]
    if labels is None:
        return [(d, 1) for d in diagrams]
    merged: Dict[Tuple, List] = {}
    for d in diagrams:
        key = d.pattern(labels)
        if key in merged:
            merged[key][1] += 1
        else:
            merged[key] = [d, 1]
    return [(d, m) for d, m in merged.values()]


def telephone_number(k: int) -> int:
    """``T(k) = T(k-1) + (k-1) T(k-2)`` with ``T(0) = T(1) = 1``."""
    a, b = 1, 1
    for n in range(2, k + 1):
        a, b = b, b + (n - 1) * a
    return b if k >= 1 else a


def contraction_profile(k: int) -> Dict[int, int]:
    """Number of diagrams with ``j`` contracted pairs."""
    return dict(Counter(d.contractions for d, _ in enumerate_wick(k)))


def wick_expand(samples: np.ndarray, cov: np.ndarray) -> np.ndarray:
    """
    ``:X_1 ... X_k:`` for centred Gaussians with covariance ``cov``.

    Inverts the contraction expansion: the Wick product is the sum over
    partial matchings of ``(-1)^pairs * prod cov(pair) * prod free legs``.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    k = samples.shape[1]
    out = np.zeros(len(samples))
    for diagram, _ in enumerate_wick(k):
        weight = (-1.0) ** diagram.contractions
        for a, b in diagram.pairs:
            weight *= cov[a, b]
        if weight == 0.0:
            continue
        term = np.full(len(samples), weight)
        for i in diagram.free:
            term = term * samples[:, i]
        out += term
    return out


def hermite_wick(z: np.ndarray, power: int) -> np.ndarray:
    """``:Z^power:`` for a standard Gaussian ``Z``."""
    coeffs = np.zeros(power + 1)
    coeffs[power] = 1.0
    return hermite_e.hermeval(np.asarray(z, dtype=float), coeffs)


def symmetrize(f: np.ndarray) -> np.ndarray:
    k = f.ndim
    if k <= 1:
        return f.copy()
    perms = list(itertools.permutations(range(k)))
    return sum(np.transpose(f, p) for p in perms) / len(perms)


def chaos_integral(f: np.ndarray, z: np.ndarray, h: float) -> np.ndarray:
    """
    ``I_k(f) = sum_i f(i) h^(k/2) :Z_i1 ... Z_ik:`` for standardised cell noise ``z``.

    ``f`` has shape ``(m,) * k``; ``z`` has shape ``(samples, m)``. Repeated
    indices are Wick-multiplied through Hermite polynomials.
    """
    f = np.asarray(f, dtype=float)
    k = f.ndim
    out = np.zeros(len(z))
    if k == 0:
        return out + float(f)
    cache: Dict[Tuple[int, int], np.ndarray] = {}
    for index in itertools.product(range(f.shape[0]), repeat=k):
        c = f[index]
        if c == 0.0:
            continue
        term = np.full(len(z), c)
        for cell, power in Counter(index).items():
            key = (cell, power)
            if key not in cache:
                cache[key] = hermite_wick(z[:, cell], power)
            term = term * cache[key]
        out += term
    return out * h ** (k / 2.0)


def chaos_inner_product(f: np.ndarray, g: np.ndarray, h: float) -> float:
    """``k! <f^sym, g^sym>`` on the grid (zero for different orders)."""
    f, g = np.asarray(f, dtype=float), np.asarray(g, dtype=float)
    if f.ndim != g.ndim:
        return 0.0
    k = f.ndim
    return float(math.factorial(k) * np.sum(symmetrize(f) * symmetrize(g)) * h**k)


@dataclass(frozen=True)
class ChaosReport:
    orders: Tuple[int, int]
    samples: int
    estimate: float
    exact: float
    stderr: float

    @property
    def relative_error(self) -> float:
        if self.exact == 0.0:
            return abs(self.estimate)
        return abs(self.estimate - self.exact) / abs(self.exact)

    @property
    def within_stderr(self) -> bool:
        return abs(self.estimate - self.exact) <= 3.0 * self.stderr

    def to_dict(self) -> Dict:
        return {
            "orders": list(self.orders),
            "samples": self.samples,
            "estimate": self.estimate,
            "exact": self.exact,
            "stderr": self.stderr,
            "relative_error": self.relative_error,
            "within_3_stderr": self.within_stderr,
        }


def batch_generators(seed: int, samples: int, batch: int = DEFAULT_BATCH):
    """One generator per batch, spawned from ``SeedSequence(seed)`` in batch order."""
    sizes = [batch] * (samples // batch)
    if samples % batch:
        sizes.append(samples % batch)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    return [(np.random.default_rng(child), size) for child, size in zip(children, sizes)]


def chaos_isometry_check(
    f: np.ndarray,
    g: np.ndarray,
    samples: int = 100_000,
    seed: int = 0,
    batch: int = DEFAULT_BATCH,
) -> ChaosReport:
    """
    Monte Carlo estimate of ``E I_k(f) I_l(g)`` against ``k! <f^sym, g^sym>``.

    ``f`` and ``g`` are grid kernels on ``m`` cells of ``[0, 1]``; their
    orders are their array ranks.
    """
    f, g = np.asarray(f, dtype=float), np.asarray(g, dtype=float)
    m = f.shape[0] if f.ndim else g.shape[0]
    h = 1.0 / m
    products = []
    for rng, size in batch_generators(seed, samples, batch):
        z = rng.standard_normal((size, m))
        products.append(chaos_integral(f, z, h) * chaos_integral(g, z, h))
    values = np.concatenate(products)
    estimate = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(len(values))) if len(values) > 1 else 0.0
    exact = chaos_inner_product(f, g, h)
    logger.debug("chaos (%d, %d): estimate %.4g exact %.4g", f.ndim, g.ndim, estimate, exact)
    return ChaosReport((f.ndim, g.ndim), samples, estimate, exact, stderr)


def grid_kernel(fn, m: int, k: int) -> np.ndarray:
    """Sample ``fn(x_1, ..., x_k)`` at the cell midpoints of ``m`` cells."""
    mids = (np.arange(m) + 0.5) / m
    grids = np.meshgrid(*([mids] * k), indexing="ij")
    return np.asarray(fn(*grids), dtype=float)
