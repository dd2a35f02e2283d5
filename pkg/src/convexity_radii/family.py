"""Parameter containers: function family, normalization kind and radius query.

All range checks live here so that every other module can assume a valid
parameter.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import ParameterRangeError


class Family(enum.Enum):
    LOMMEL = "lommel"
    STRUVE = "struve"


class NormKind(enum.Enum):
    """Normalization type.

    ``POWER`` is f (Lommel) / u (Struve), ``SHIFT`` is g / v and
    ``SQRT`` is h / w.
    """

    POWER = "power"
    SHIFT = "shift"
    SQRT = "sqrt"


_LETTERS = {
    Family.LOMMEL: {"f": NormKind.POWER, "g": NormKind.SHIFT, "h": NormKind.SQRT},
    Family.STRUVE: {"u": NormKind.POWER, "v": NormKind.SHIFT, "w": NormKind.SQRT},
}


def norm_from_letter(family: Family, letter: str) -> NormKind:
    """Map a normalization letter (f, g, h for Lommel; u, v, w for Struve)."""
    try:
        return _LETTERS[family][letter]
    except KeyError:
        allowed = ", ".join(sorted(_LETTERS[family]))
        raise ParameterRangeError(
            f"norm {letter!r} is not defined for the {family.value} family (use one of {allowed})"
        ) from None


def norm_letter(family: Family, norm: NormKind) -> str:
    for letter, kind in _LETTERS[family].items():
        if kind is norm:
            return letter
    raise KeyError(norm)


@dataclass(frozen=True)
class FamilySpec:
    """Function family and its parameter (mu for Lommel, nu for Struve).

    Raises
    ------
    ParameterRangeError
        If mu is outside (-1, 1), mu == 0, or |nu| > 1/2.
    """

    family: Family
    param: float

    def __post_init__(self):
        p = float(self.param)
        object.__setattr__(self, "param", p)
        if not math.isfinite(p):
            raise ParameterRangeError("parameter must be finite")
        if self.family is Family.LOMMEL:
            if not (-1.0 < p < 1.0) or p == 0.0:
                raise ParameterRangeError(f"Lommel family requires mu in (-1, 1) and mu != 0, got mu={p!r}")
        elif self.family is Family.STRUVE:
            if abs(p) > 0.5:
                raise ParameterRangeError(f"Struve family requires |nu| <= 1/2, got nu={p!r}")
        else:
            raise ParameterRangeError(f"unknown family {self.family!r}")

    @classmethod
    def lommel(cls, mu: float) -> "FamilySpec":
        return cls(Family.LOMMEL, mu)

    @classmethod
    def struve(cls, nu: float) -> "FamilySpec":
        return cls(Family.STRUVE, nu)

    @property
    def is_lommel(self) -> bool:
        return self.family is Family.LOMMEL

    @property
    def leading_exponent(self) -> float:
        """Exponent e0 of the power prefactor: mu + 1/2 for Lommel, nu + 1 for Struve."""
        return self.param + 0.5 if self.is_lommel else self.param + 1.0

    @property
    def symbol(self) -> str:
        return "mu" if self.is_lommel else "nu"

    def __str__(self) -> str:
        return f"{self.family.value}({self.symbol}={self.param!r})"


@dataclass(frozen=True)
class RadiusQuery:
    """A radius-of-convexity problem: family, normalization and order alpha."""

    family: FamilySpec
    norm: NormKind
    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        object.__setattr__(self, "alpha", a)
        if not (0.0 <= a < 1.0):
            raise ParameterRangeError(f"order alpha must lie in [0, 1), got {a!r}")
        # at mu = -1/2 the exponent 1/(mu+1/2) of f is undefined, and the even
        # part of s' starts at z^2, so none of the three normalizations is
        # a normalized function there
        if self.family.is_lommel and self.family.param == -0.5:
            if self.norm is NormKind.POWER:
                raise ParameterRangeError("normalization f requires mu != -1/2")
            raise ParameterRangeError(
                f"normalization {norm_letter(Family.LOMMEL, self.norm)} requires mu != -1/2 "
                "(the leading coefficient mu + 1/2 of s' vanishes)"
            )
