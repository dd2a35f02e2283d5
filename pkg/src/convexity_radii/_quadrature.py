"""Adaptive interval-halving quadrature with a 15-point Gauss-Kronrod rule.

Used only by the verification oracles, so it is kept independent of the
Gauss-Jacobi evaluator in :mod:`zeros`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import QuadratureFailure

# Kronrod abscissae (positive half) and weights; Gauss 7-point weights on
# the odd-indexed abscissae
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])

_X = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WG_FULL = np.zeros(15)
_WG_FULL[1:7:2] = _WG[:3]
_WG_FULL[7] = _WG[3]
_WG_FULL[9:15:2] = _WG[2::-1]


class Substitution(enum.Enum):
    NONE = "none"
    POWER_LAW = "power_law"


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerance and depth limit of the adaptive rule.

    ``endpoint_substitution`` selects whether weighted integrals remove the
    algebraic endpoint singularity by u = (1-t)^sigma first.
    """

    abs_tol: float = 1e-13
    max_depth: int = 40
    max_panels: int = 20_000
    endpoint_substitution: Substitution = Substitution.POWER_LAW

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")


def _panel(f, a, b):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fx = f(c + h * _X)
    k = h * np.dot(_WK, fx)
    g = h * np.dot(_WG_FULL, fx)
    return k, abs(k - g)


def integrate(f, a: float, b: float, spec: QuadratureSpec = QuadratureSpec()):
    """Integrate a vectorized f over [a, b]; returns (value, error_estimate).

    Panels are halved until each meets its share abs_tol * width / (b - a).

    Raises
    ------
    QuadratureFailure
        If a panel still misses its tolerance at ``spec.max_depth`` or the
        panel budget is exhausted.
    """
    if b == a:
        return 0.0, 0.0
    total_width = b - a
    stack = [(a, b, 0) + _panel(f, a, b)]
    value, err = 0.0, 0.0
    panels = 1
    while stack:
        lo, hi, depth, k, e = stack.pop()
        if e <= spec.abs_tol * (hi - lo) / total_width:
            value += k
            err += e
            continue
        if depth >= spec.max_depth:
            raise QuadratureFailure(
                f"panel [{lo:.6g}, {hi:.6g}] misses tolerance ({e:.3g}) at depth {depth}"
            )
        panels += 2
        if panels > spec.max_panels:
            raise QuadratureFailure(f"more than {spec.max_panels} panels needed")
        mid = 0.5 * (lo + hi)
        stack.append((lo, mid, depth + 1) + _panel(f, lo, mid))
        stack.append((mid, hi, depth + 1) + _panel(f, mid, hi))
    return value, err


def integrate_endpoint_weight(g, sigma: float, a: float = 0.0,
                              spec: QuadratureSpec = QuadratureSpec()):
    """int_a^1 (1-t)^(sigma-1) g(t) dt for sigma > 0.

    With the power-law substitution u = (1-t)^sigma the weight disappears:
    the integral is (1/sigma) int_0^((1-a)^sigma) g(1 - u^(1/sigma)) du.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if spec.endpoint_substitution is Substitution.NONE:
        return integrate(lambda t: (1.0 - t) ** (sigma - 1.0) * g(t), a, 1.0, spec)
    top = (1.0 - a) ** sigma
    val, err = integrate(lambda u: g(1.0 - u ** (1.0 / sigma)), 0.0, top, spec)
    return val / sigma, err / sigma
