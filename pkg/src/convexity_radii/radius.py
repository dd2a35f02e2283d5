"""Curvature functionals of the six normalizations and the radius solver.

For a normalization F the quantity compared with alpha is
1 + r F''(r) / F'(r).  With the even series A, B, C of :mod:`specfun`
(so that z s'/s = B/A and z s''/s' = C/B, prefactors cancelled) and
e0 = mu + 1/2 (Lommel) or nu + 1 (Struve) the three kinds read

    Power:  1 + C/B + (1/e0 - 1) B/A              at q = r^2
    Shift:  2 - e0 + C/B                          at q = r^2
    Sqrt :  1 + (1 - e0 + C/B) / 2                at q = r

In terms of the zeros x_n of A and x'_n of B (with multiplicity)

    Power:  1 - (1/e0 - 1) sum 2r^2/(x^2 - r^2) - sum 2r^2/(x'^2 - r^2)
    Shift:  1 - sum 2r^2/(x'^2 - r^2)
    Sqrt :  1 - sum r/(x'^2 - r)

so the first pole sits at x'_1 (Power, Shift) and at x'_1^2 (Sqrt).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import BracketFailure, NearPole, NoSignChange, ScanExhausted
from .family import FamilySpec, NormKind, RadiusQuery
from .specfun import NEAR_POLE_FLOOR, family_series, horner_even_series
from .zeros import derivative_zeros, function_zeros

SPECTRAL_N = 200
TAIL_WINDOW = 20


class Method(enum.Enum):
    DIRECT = "direct"
    SPECTRAL = "spectral"


class Verification(enum.Enum):
    UNVERIFIED = "unverified"
    DISK_CHECKED = "disk_checked"


@dataclass(frozen=True)
class RadiusResult:
    """Solution of curvature(r) = alpha.

    ``within_stated_bound`` is only set for the Sqrt kind: whether the
    radius is also below the first derivative zero x'_1 (the search
    interval itself reaches up to x'_1^2).
    """

    radius: float
    upper_endpoint: float
    bracket: tuple
    residual: float
    iterations: int
    verified: Verification = Verification.UNVERIFIED
    within_stated_bound: bool | None = None


# ---------------------------------------------------------------------------
# direct evaluation


def _series_variable(norm: NormKind, r):
    return r if norm is NormKind.SQRT else r * r


def direct_curvature(query: RadiusQuery, r):
    """Curvature from the even-series ratios; r may be real, complex or an array."""
    fam = query.family
    series = family_series(fam)
    e0 = fam.leading_exponent
    r_arr = np.asarray(r)
    q = _series_variable(query.norm, r_arr)
    s = horner_even_series(series, np.atleast_1d(q), ("A", "B", "C"), use_dd=False)
    A, B, C = s["A"], s["B"], s["C"]
    floor = NEAR_POLE_FLOOR * max(1.0, abs(e0))
    if np.any(np.abs(B) < floor):
        raise NearPole("derivative series B is too close to zero")
    if query.norm is NormKind.POWER:
        if np.any(np.abs(A) < floor):
            raise NearPole("function series A is too close to zero")
        val = 1.0 + C / B + (1.0 / e0 - 1.0) * B / A
    elif query.norm is NormKind.SHIFT:
        val = 2.0 - e0 + C / B
    else:
        val = 1.0 + 0.5 * (1.0 - e0 + C / B)
    if r_arr.ndim == 0:
        return val[0]
    return val.reshape(r_arr.shape)


# ---------------------------------------------------------------------------
# spectral evaluation


@dataclass(frozen=True)
class SpectralNodes:
    fn: tuple      # (values, multiplicities) of function zeros
    deriv: tuple   # same for derivative zeros


def spectral_nodes(family: FamilySpec, n: int = SPECTRAL_N) -> SpectralNodes:
    base = function_zeros(family, n)
    d = derivative_zeros(family, n, base)
    return SpectralNodes(base.spectral_nodes(), d.spectral_nodes())


def _tail_offset(x, m):
    """Offset c of the counting-function model N(x) ~ x/pi + c, from the last zeros."""
    k = np.cumsum(m)
    mid = k - 0.5 * m - x / math.pi
    return float(np.mean(mid[-TAIL_WINDOW:]))


def _atanh_over(u):
    """atanh(u)/u, stable near u = 0."""
    u = np.asarray(u, float)
    small = np.abs(u) < 1e-4
    safe = np.where(small, 0.5, u)
    return np.where(small, 1.0 + u * u / 3.0, np.arctanh(safe) / safe)


def _sum_with_tail(x, m, term, integral, r):
    """sum_n m_n term(x_n, r) over all zeros, extrapolating past the last one.

    The tail uses N(x) ~ x/pi + c: integrating by parts,
    sum_{n>N} f(x_n) ~ (1/pi) int_X^inf f + (X/pi + c - K_N) f(X).
    """
    r = np.asarray(r, float)
    head = np.sum(m[:, None] * term(x[:, None], r[None, :]), axis=0)
    big_x = x[-1]
    c = _tail_offset(x, m)
    kn = np.sum(m)
    tail = integral(big_x, r) / math.pi + (big_x / math.pi + c - kn) * term(big_x, r)
    return head + tail


def _s2(x, r):
    return 2.0 * r * r / (x * x - r * r)


def _s2_int(big_x, r):
    return 2.0 * r * r / big_x * _atanh_over(r / big_x)


def _ds2(x, r):
    return 4.0 * r * x * x / (x * x - r * r) ** 2


def _ds2_int(big_x, r):
    return 2.0 * r / big_x * _atanh_over(r / big_x) + 2.0 * r * big_x / (big_x**2 - r * r)


def _sq(x, r):
    return r / (x * x - r)


def _sq_int(big_x, r):
    a = np.sqrt(r)
    return r / big_x * _atanh_over(a / big_x)


def _dsq(x, r):
    return x * x / (x * x - r) ** 2


def _dsq_int(big_x, r):
    a = np.sqrt(r)
    return _atanh_over(a / big_x) / (2.0 * big_x) + big_x / (2.0 * (big_x**2 - r))


def _spectral(query: RadiusQuery, r, n: int, derivative: bool):
    nodes = spectral_nodes(query.family, n)
    e0 = query.family.leading_exponent
    if query.norm is NormKind.SQRT:
        t, ti = (_dsq, _dsq_int) if derivative else (_sq, _sq_int)
    else:
        t, ti = (_ds2, _ds2_int) if derivative else (_s2, _s2_int)
    r_arr = np.atleast_1d(np.asarray(r, float))
    val = -_sum_with_tail(*nodes.deriv, t, ti, r_arr)
    if query.norm is NormKind.POWER:
        val = val - (1.0 / e0 - 1.0) * _sum_with_tail(*nodes.fn, t, ti, r_arr)
    if not derivative:
        val = 1.0 + val
    return val if np.ndim(r) else float(val[0])


def spectral_curvature(query: RadiusQuery, r, n: int = SPECTRAL_N):
    """Curvature from the first n zeros of the function and of its derivative."""
    return _spectral(query, r, n, derivative=False)


def curvature(query: RadiusQuery, r, method: Method = Method.DIRECT, n: int = SPECTRAL_N):
    """1 + r F''(r)/F'(r) for the normalization F of ``query``.

    Parameters
    ----------
    query : RadiusQuery
    r : float or array
        Radius (complex values are accepted by the direct method).
    method : Method
        DIRECT uses series ratios, SPECTRAL the zero sums with tail.
    n : int
        Number of zeros for the spectral method.
    """
    method = Method(method)
    if method is Method.DIRECT:
        return direct_curvature(query, r)
    return spectral_curvature(query, r, n)


def curvature_derivative_sign(query: RadiusQuery, r, n: int = SPECTRAL_N):
    """Derivative of the curvature in r from the spectral form (negative on the interval)."""
    return _spectral(query, r, n, derivative=True)


# ---------------------------------------------------------------------------
# solver


def first_derivative_zero(family: FamilySpec) -> float:
    base = function_zeros(family, 1)
    return derivative_zeros(family, 1, base).records[0].value


def upper_endpoint(query: RadiusQuery) -> float:
    """First pole of the curvature: x'_1, or x'_1^2 for the Sqrt kind."""
    x1 = first_derivative_zero(query.family)
    return x1 * x1 if query.norm is NormKind.SQRT else x1


RESIDUAL_TOL = 1e-10


def solve_radius(query: RadiusQuery, tol: float = 1e-12) -> RadiusResult:
    """Smallest positive r with curvature(r) = alpha.

    Bisection on [1e-12, U (1 - 1e-9)], U the upper endpoint, down to a
    bracket of width ``tol``, then Newton steps with the spectral
    derivative, kept only inside the bracket and when they reduce the
    residual.

    Raises
    ------
    NoSignChange
        If the curvature does not cross alpha continuously in the interval.
    """
    upper = upper_endpoint(query)
    alpha = query.alpha

    def g(r):
        return float(direct_curvature(query, r)) - alpha

    lo, hi = 1e-12, upper * (1.0 - 1e-9)
    glo, ghi = g(lo), g(hi)
    if not (glo > 0.0 and ghi < 0.0):
        raise NoSignChange(
            f"{query.family} {query.norm.value}: curvature - alpha is {glo:.3g} at {lo:g} and {ghi:.3g} at {hi:.6g}"
        )
    it = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        try:
            gm = g(mid)
        except NearPole:
            raise NoSignChange(f"{query.family}: curvature has a pole inside (0, {upper:.6g})") from None
        if gm > 0.0:
            lo = mid
        else:
            hi = mid
        it += 1
        if it > 200:
            break
    root = 0.5 * (lo + hi)
    groot = g(root)
    # Newton polish with the spectral derivative
    try:
        for _ in range(3):
            d = float(curvature_derivative_sign(query, root))
            if not (d < 0.0):
                break
            cand = root - groot / d
            if not (lo <= cand <= hi):
                break
            gc = g(cand)
            if abs(gc) >= abs(groot):
                break
            root, groot = cand, gc
            it += 1
    except (BracketFailure, ScanExhausted):
        pass
    residual = abs(groot)
    if residual > RESIDUAL_TOL:
        raise NoSignChange(
            f"{query.family} {query.norm.value}: sign change at r={root:.12g} is not a root "
            f"(residual {residual:.3g}); the curvature has a pole there"
        )
    within = None
    if query.norm is NormKind.SQRT:
        within = bool(root < first_derivative_zero(query.family))
    return RadiusResult(root, upper, (lo, hi), residual, it, Verification.UNVERIFIED, within)
