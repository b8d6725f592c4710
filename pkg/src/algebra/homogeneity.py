"""
Exact homogeneities of the form a + b*kappa.

``kappa`` is a positive infinitesimal: it never receives a numeric value in
the symbolic layers, so two homogeneities are compared first by their
rational part and then by the signed kappa coefficient.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Union

Number = Union[int, Fraction, float, str]

_TERM = re.compile(r"([+-]?)\s*(\d+(?:/\d+)?)?\s*(\*?\s*[kκ])?")


@total_ordering
@dataclass(frozen=True)
class Homogeneity:
    """Degree ``rational_part + kappa_mult * kappa``."""

    rational_part: Fraction = Fraction(0)
    kappa_mult: int = 0

    def __post_init__(self):
        object.__setattr__(self, "rational_part", Fraction(self.rational_part))
        object.__setattr__(self, "kappa_mult", int(self.kappa_mult))

    def _key(self):
        return (self.rational_part, self.kappa_mult)

    def __lt__(self, other: "Homogeneity") -> bool:
        if not isinstance(other, Homogeneity):
            return NotImplemented
        return self._key() < other._key()

    def __add__(self, other: "Homogeneity") -> "Homogeneity":
        if isinstance(other, (int, Fraction)):
            other = Homogeneity(Fraction(other))
        if not isinstance(other, Homogeneity):
            return NotImplemented
        return Homogeneity(
            self.rational_part + other.rational_part,
            self.kappa_mult + other.kappa_mult,
        )

    __radd__ = __add__

    def __neg__(self) -> "Homogeneity":
        return Homogeneity(-self.rational_part, -self.kappa_mult)

    def __sub__(self, other: "Homogeneity") -> "Homogeneity":
        return self + (-other)

    def __mul__(self, factor: int) -> "Homogeneity":
        return Homogeneity(self.rational_part * factor, self.kappa_mult * factor)

    __rmul__ = __mul__

    def value(self, kappa: float = 0.0) -> float:
        """Numeric value once a concrete ``kappa`` is chosen."""
        return float(self.rational_part) + self.kappa_mult * kappa

    def is_integer(self) -> bool:
        return self.kappa_mult == 0 and self.rational_part.denominator == 1

    @classmethod
    def from_number(cls, x: Number) -> "Homogeneity":
        if isinstance(x, Homogeneity):
            return x
        if isinstance(x, str):
            return cls.parse(x)
        if isinstance(x, float):
            return cls(Fraction(x).limit_denominator(10**6))
        return cls(Fraction(x))

    @classmethod
    def parse(cls, text: str) -> "Homogeneity":
        """Parse strings such as ``0``, ``1/2``, ``-5/2-k`` or ``-1/2-5κ``.

        Raises:
            ValueError: If the text is not a sum of rational and kappa terms.
        """
        s = text.replace(" ", "").replace("−", "-")
        if not s:
            raise ValueError("empty homogeneity")
        rational = Fraction(0)
        kappa = 0
        pos = 0
        while pos < len(s):
            m = _TERM.match(s, pos)
            if m is None or m.end() == pos:
                raise ValueError(f"cannot parse homogeneity '{text}'")
            sign, number, kap = m.groups()
            if number is None and kap is None:
                raise ValueError(f"cannot parse homogeneity '{text}'")
            sgn = -1 if sign == "-" else 1
            if pos > 0 and not sign:
                raise ValueError(f"missing operator in homogeneity '{text}'")
            if kap:
                kappa += sgn * (int(number) if number else 1)
                if number and "/" in number:
                    raise ValueError(f"kappa coefficient must be an integer: '{text}'")
            else:
                rational += sgn * Fraction(number)
            pos = m.end()
        return cls(rational, kappa)

    def __str__(self) -> str:
        parts = []
        if self.rational_part != 0 or self.kappa_mult == 0:
            parts.append(str(self.rational_part))
        if self.kappa_mult:
            coeff = abs(self.kappa_mult)
            body = "κ" if coeff == 1 else f"{coeff}κ"
            if parts:
                parts.append(("-" if self.kappa_mult < 0 else "+") + body)
            else:
                parts.append(("-" if self.kappa_mult < 0 else "") + body)
        return "".join(parts)


ZERO = Homogeneity(Fraction(0), 0)


def hom_add(h1: Homogeneity, h2: Homogeneity) -> Homogeneity:
    """Componentwise sum of two homogeneities."""
    return h1 + h2


def hom_compare(h1: Homogeneity, h2: Homogeneity) -> int:
    """Return -1, 0 or 1 as ``h1`` is smaller, equal or larger than ``h2``."""
    if h1 < h2:
        return -1
    if h2 < h1:
        return 1
    return 0
