"""Power-series evaluation of phi_k, the Lommel function s_{mu-1/2,1/2},
the Struve function H_nu and their first two derivatives.

Every function handled here has the form

    F(z) = K * z**e0 * A(z**2),    A(q) = sum_n c_n q**n,
    c_n = (-1/4)**n / ((a)_n (b)_n),

so derivatives are obtained by multiplying the coefficients by the
descending exponents e_n = e0 + 2n:

    F'(z)  = K * z**(e0-1) * sum_n e_n c_n q**n
    F''(z) = K * z**(e0-2) * sum_n e_n (e_n - 1) c_n q**n.

Real arguments are summed in double-double arithmetic, which keeps the
cancellation of the alternating series harmless up to |z| of about 40.
Complex arguments are summed in ordinary complex floating point and are
meant for moderate |z| (the disks used for certification).

Truncation follows one rule everywhere: stop after term n once
|t_n| <= tol * |partial| and n >= |z|/2 and the term ratio has dropped
below one.  The tail is then bounded by the first omitted term for real
arguments, where the series alternates, and by a geometric series
otherwise.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _dd
from .errors import DomainError, NearPole, NonConvergence, ParameterPole, ParameterRangeError
from .family import FamilySpec

MAX_TERMS = 10_000
DD_TOL = 1e-33
FLOAT_TOL = 1e-17
NEAR_POLE_FLOOR = 1e-13

# a rounding bound per term; double-double has a unit roundoff of 2**-104
_DD_UNIT = 2.0**-104
_FLOAT_UNIT = 2.0**-53


@dataclass(frozen=True)
class EvalResult:
    """A series value with its error budget.

    Attributes
    ----------
    value : float or complex
        The computed value.
    abs_error_bound : float
        Bound on the truncation error (first omitted term for real
        arguments, geometric tail for complex ones).
    terms_used : int
        Number of series terms summed.
    rounding_error_bound : float
        Bound on accumulated rounding, including the final rounding to
        float64.  Zero whenever the value is exact.
    exponent : float or None
        If not None, ``value`` is only the even part and the function
        equals ``value * z**exponent``.
    """

    value: float | complex
    abs_error_bound: float
    terms_used: int
    rounding_error_bound: float = 0.0
    exponent: float | None = None


@dataclass(frozen=True)
class PochhammerCache:
    """Rising factorials (base)_n for n = 0..N."""

    base: float
    values: tuple[float, ...]

    @classmethod
    def build(cls, base: float, n: int) -> "PochhammerCache":
        vals = [1.0]
        for k in range(n):
            vals.append(vals[-1] * (base + k))
        return cls(float(base), tuple(vals))

    def __len__(self):
        return len(self.values)

    def __getitem__(self, n):
        return self.values[n]


# ---------------------------------------------------------------------------
# series description

Dd = tuple[float, float]


def _dd_const(x: float) -> Dd:
    return (float(x), 0.0)


def _dd_add_scalar(x: Dd, y: float) -> Dd:
    h, l = _dd.two_sum(np.float64(x[0]), np.float64(y))
    return float(h), float(l + x[1])


def _dd_half(x: Dd) -> Dd:
    return (0.5 * x[0], 0.5 * x[1])


@dataclass(frozen=True)
class EvenSeries:
    """The even series A(q) = sum c_n q^n with leading exponent e0.

    ``a``, ``b`` and ``e0`` are stored as double-double pairs so that the
    shifted quantities a + n and e0 + 2n are exact.
    """

    a: Dd
    b: Dd
    e0: Dd = (0.0, 0.0)

    def coefficient_ratio(self, n: int) -> float:
        return -0.25 / ((self.a[0] + n) * (self.b[0] + n))

    def weights(self, part: str) -> tuple:
        """Linear factors (alpha, beta) with weight prod(alpha + beta*n)."""
        e0 = self.e0
        e0m1 = _dd_add_scalar(e0, -1.0)
        table = {
            "A": (),
            "B": ((e0, 2),),
            "C": ((e0, 2), (e0m1, 2)),
            "dA": (((0.0, 0.0), 2),),
            "dB": (((0.0, 0.0), 2), (e0, 2)),
            "ddA": (((0.0, 0.0), 2), ((-1.0, 0.0), 2)),
        }
        return table[part]


def lommel_series(mu: float) -> EvenSeries:
    """Even part of s_{mu-1/2,1/2}: a = (mu+2)/2, b = (mu+3)/2, e0 = mu+1/2."""
    return EvenSeries(
        _dd_half(_dd_add_scalar(_dd_const(mu), 2.0)),
        _dd_half(_dd_add_scalar(_dd_const(mu), 3.0)),
        _dd_add_scalar(_dd_const(mu), 0.5),
    )


def phi_series(mu: float, k: int) -> EvenSeries:
    """phi_k(z) = 1F2(1; (mu-k+2)/2, (mu-k+3)/2; -z^2/4)."""
    base = _dd_add_scalar(_dd_const(mu), -float(k))
    return EvenSeries(
        _dd_half(_dd_add_scalar(base, 2.0)),
        _dd_half(_dd_add_scalar(base, 3.0)),
        _dd_add_scalar(base, 0.5),
    )


def struve_series(nu: float) -> EvenSeries:
    """Even part of H_nu: a = 3/2, b = nu+3/2, e0 = nu+1."""
    return EvenSeries(
        (1.5, 0.0),
        _dd_add_scalar(_dd_const(nu), 1.5),
        _dd_add_scalar(_dd_const(nu), 1.0),
    )


def family_series(family: FamilySpec) -> EvenSeries:
    if family.is_lommel:
        return lommel_series(family.param)
    return struve_series(family.param)


# ---------------------------------------------------------------------------
# summation engine


@dataclass
class SeriesSums:
    """Output of :func:`sum_even_series`; each dict maps part name to array."""

    values: dict
    trunc_bound: dict
    round_bound: dict
    terms: int


def _weight_dd(factors, n):
    wh, wl = 1.0, 0.0
    for (ah, al), beta in factors:
        fh, fl = _dd.two_sum(float(ah), float(beta * n))
        fl = fl + al
        wh, wl = _dd.mul(wh, wl, fh, fl)
    return float(wh), float(wl)


def _weight_float(factors, n):
    w = 1.0
    for (ah, al), beta in factors:
        w *= (ah + beta * n) + al
    return w


def _factors_positive(factors, n):
    return all(ah + al + beta * n > 0 for (ah, al), beta in factors)


def sum_even_series(series: EvenSeries, q, parts=("A",), *, use_dd=None, tol=None,
                    q_lo=None, n_terms=None) -> SeriesSums:
    """Sum the weighted even series at q (= z**2, or z itself for the sqrt variable).

    Parameters
    ----------
    series : EvenSeries
    q : array_like
        Series variable.  Real input is summed in double-double unless
        ``use_dd`` is False; complex input always uses complex floats.
    parts : sequence of str
        Any of "A", "B", "C", "dA", "dB", "ddA" (see :meth:`EvenSeries.weights`).
    q_lo : array_like, optional
        Low word of a double-double q (e.g. from an exact square).
    n_terms : int, optional
        Sum exactly this many terms instead of applying the stopping rule.
    """
    q = np.asarray(q)
    is_complex = np.iscomplexobj(q)
    if use_dd is None:
        use_dd = not is_complex
    if use_dd and is_complex:
        raise DomainError("double-double summation needs a real argument")
    if tol is None:
        tol = DD_TOL if use_dd else FLOAT_TOL
    shape = q.shape
    q = q.reshape(-1)
    absq = np.abs(q)
    n_min = int(math.ceil(0.5 * math.sqrt(float(absq.max())))) if q.size else 0
    factor_sets = [series.weights(p) for p in parts]

    # a single real point runs the same recurrences on Python floats, which
    # avoids the per-call overhead of numpy on one-element arrays
    scalar = use_dd and q.size == 1
    absf = abs if scalar else np.abs
    if use_dd:
        qh = q.astype(float)
        ql = np.zeros_like(qh) if q_lo is None else np.asarray(q_lo, float).reshape(-1)
        th, tl = np.ones_like(qh), np.zeros_like(qh)
        if scalar:
            qh, ql, th, tl = float(qh[0]), float(ql[0]), 1.0, 0.0
        ph = [th * 0.0 for _ in parts]
        pl = [th * 0.0 for _ in parts]
    else:
        dtype = complex if is_complex else float
        t = np.ones(q.shape, dtype=dtype)
        ps = [np.zeros(q.shape, dtype=dtype) for _ in parts]
    absacc = [0.0 if scalar else np.zeros(q.shape) for _ in parts]
    first = [None for _ in parts]

    def weighted(n, j):
        if use_dd:
            wh, wl = _weight_dd(factor_sets[j], n)
            return _dd.mul(th, tl, wh, wl)
        return _weight_float(factor_sets[j], n) * t, None

    n = 0
    while True:
        last = []
        for j in range(len(parts)):
            wt, wtl = weighted(n, j)
            if use_dd:
                ph[j], pl[j] = _dd.add(ph[j], pl[j], wt, wtl)
            else:
                ps[j] = ps[j] + wt
            absacc[j] = absacc[j] + absf(wt)
            if n == 0:
                first[j] = absf(wt)
            last.append(absf(wt))
        # advance the term recurrence t_{n+1} = t_n * q * (-1/4) / ((a+n)(b+n))
        if use_dd:
            ah, al = _dd.two_sum(float(series.a[0]), float(n))
            bh, bl = _dd.two_sum(float(series.b[0]), float(n))
            dh, dl = _dd.mul(ah, al + series.a[1], bh, bl + series.b[1])
            th, tl = _dd.mul(th, tl, qh, ql)
            th, tl = _dd.div(th, tl, dh, dl)
            th, tl = -0.25 * th, -0.25 * tl
        else:
            t = t * q * series.coefficient_ratio(n)
        n += 1
        if n_terms is not None:
            if n >= n_terms:
                break
            continue
        if n > MAX_TERMS:
            raise NonConvergence(f"series did not converge within {MAX_TERMS} terms")
        if n - 1 < n_min:
            continue
        ratio = absq / (4.0 * (series.a[0] + n - 1) * (series.b[0] + n - 1))
        if np.any(ratio >= 1.0):
            continue
        if not all(_factors_positive(f, n - 1) for f in factor_sets):
            continue
        ok = True
        for j in range(len(parts)):
            part = absf(ph[j] if use_dd else ps[j])
            if np.any((last[j] > tol * part) & (last[j] > tol * 1e-8 * absacc[j])):
                ok = False
                break
        if ok:
            break

    if scalar:
        th = np.array([th])
        ph, pl = [np.array([v]) for v in ph], [np.array([v]) for v in pl]
        absacc, first = [np.array([v]) for v in absacc], [np.array([v]) for v in first]

    # tail bound from the first omitted term
    values, trunc, rnd = {}, {}, {}
    rho = absq / (4.0 * (series.a[0] + n) * (series.b[0] + n))
    alternating = not is_complex and bool(np.all(q >= 0))
    for j, p in enumerate(parts):
        if use_dd:
            nxt = np.abs(th * _weight_float(factor_sets[j], n))
            val = ph[j] + pl[j]
            unit = _DD_UNIT
        else:
            nxt = np.abs(t * _weight_float(factor_sets[j], n))
            val = ps[j]
            unit = _FLOAT_UNIT
        if n_terms is not None:
            bound = nxt if alternating else nxt / np.maximum(1.0 - rho, 1e-300)
            if np.any(rho >= 1.0) and not alternating:
                bound = np.full_like(nxt, np.inf)
        elif alternating:
            bound = nxt
        else:
            bound = nxt / (1.0 - rho)
        # the leading term is exact, rounding enters with the later ones
        r = 2.0 * (n + 1) * unit * (absacc[j] - first[j])
        if use_dd:
            r = r + np.abs(pl[j] + (ph[j] - val))
        values[p] = val.reshape(shape)
        trunc[p] = bound.reshape(shape)
        rnd[p] = r.reshape(shape)
    return SeriesSums(values, trunc, rnd, n)


# ---------------------------------------------------------------------------
# public evaluators


def _as_number(z):
    if isinstance(z, complex) or np.iscomplexobj(z):
        return complex(z)
    return float(z)


def _check_phi_pole(mu: float, k: int):
    m = mu - k
    if m <= 0 and m == int(m):
        raise ParameterPole(f"mu - k = {m:g} is a nonpositive integer")


def phi_k_partial_sum(mu: float, k: int, z: float, n_terms: int) -> EvalResult:
    """Partial sum of the first ``n_terms`` terms of phi_k at real z.

    Uses explicit Pochhammer tables; meant for checking tail bounds.
    """
    _check_phi_pole(mu, k)
    a = (mu - k + 2) / 2.0
    b = (mu - k + 3) / 2.0
    pa = PochhammerCache.build(a, n_terms)
    pb = PochhammerCache.build(b, n_terms)
    q = float(z) ** 2
    terms = [(-0.25 * q) ** n / pa[n] / pb[n] for n in range(n_terms)]
    total = math.fsum(terms)
    first_omitted = abs((-0.25 * q) ** n_terms / pa[n_terms] / pb[n_terms])
    # each term carries at most 4n + 4 roundings (two Pochhammer products of
    # 2n roundings each, the power and two divisions); fsum adds one more
    rounding = math.fsum((4 * n + 4) * _FLOAT_UNIT * abs(t) for n, t in enumerate(terms))
    return EvalResult(total, first_omitted, n_terms, rounding + _FLOAT_UNIT * abs(total))


def _real_q(z: float):
    """Exact square of a real z as a double-double pair."""
    zh = np.array([float(z)])
    return _dd.two_prod(zh, zh)


def eval_phi_k(mu: float, k: int, z, deriv: int = 0, tol: float | None = None) -> EvalResult:
    """phi_k(z) = 1F2(1; (mu-k+2)/2, (mu-k+3)/2; -z^2/4) or a derivative.

    Parameters
    ----------
    mu : float
    k : int
        Shift index, k >= 0.
    z : float or complex
    deriv : {0, 1, 2}
        Order of the derivative in z (term-wise).

    Raises
    ------
    ParameterPole
        If mu - k is a nonpositive integer.
    """
    if k < 0 or int(k) != k:
        raise ParameterRangeError("k must be a nonnegative integer")
    if deriv not in (0, 1, 2):
        raise ParameterRangeError("deriv must be 0, 1 or 2")
    _check_phi_pole(mu, k)
    z = _as_number(z)
    series = phi_series(mu, k)
    if not math.isfinite(abs(z)):
        raise DomainError("argument must be finite")
    if deriv == 0:
        ser, part, mult = series, "A", 1.0
    else:
        # phi' = z * c_1 * sum 2(m+1) c'_m q^m with the coefficient series
        # shifted by one (a -> a+1, b -> b+1); phi'' drops the factor z
        ser = EvenSeries(_dd_add_scalar(series.a, 1.0), _dd_add_scalar(series.b, 1.0),
                         (2.0, 0.0))  # e0 = 2 gives weight 2 + 2m = 2(m+1)
        c1 = -0.25 / (series.a[0] * series.b[0] + series.a[0] * series.b[1] + series.a[1] * series.b[0])
        part = "B" if deriv == 1 else "C"
        mult = c1 * (z if deriv == 1 else 1.0)
    if isinstance(z, complex):
        s = sum_even_series(ser, np.array([z * z]), (part,), tol=tol)
    else:
        qh, ql = _real_q(z)
        s = sum_even_series(ser, qh, (part,), q_lo=ql, tol=tol)
    val = s.values[part][0]
    val = complex(val) if isinstance(z, complex) else float(val)
    return EvalResult(mult * val, abs(mult) * float(s.trunc_bound[part][0]), s.terms,
                      abs(mult) * float(s.round_bound[part][0]) + _FLOAT_UNIT * abs(mult * val) * (deriv > 0))


_PART_FOR_DERIV = ("A", "B", "C")


def _check_deriv(deriv):
    if deriv not in (0, 1, 2):
        raise ParameterRangeError("deriv must be 0, 1 or 2")


def _series_at_positive(series: EvenSeries, z: float, part: str):
    qh, ql = _real_q(z)
    s = sum_even_series(series, qh, (part,), q_lo=ql)
    return float(s.values[part][0]), float(s.trunc_bound[part][0]), float(s.round_bound[part][0]), s.terms


def eval_lommel(mu: float, z: float, deriv: int = 0) -> EvalResult:
    """Lommel function s_{mu-1/2,1/2}(z) or its first/second derivative, z > 0.

    s(z) = z**(mu+1/2) / (mu (mu+1)) * sum (-1)^n (z/2)^(2n) / (((mu+2)/2)_n ((mu+3)/2)_n)

    Raises
    ------
    DomainError
        If z is not a positive real.
    """
    _check_deriv(deriv)
    if isinstance(z, complex) or np.iscomplexobj(z):
        raise DomainError("eval_lommel needs a positive real argument")
    z = float(z)
    if not z > 0.0 or not math.isfinite(z):
        raise DomainError("eval_lommel needs a positive real argument")
    if not (-1.0 < mu < 1.0) or mu == 0.0:
        raise ParameterRangeError("Lommel family requires mu in (-1, 1) and mu != 0")
    series = lommel_series(mu)
    part = _PART_FOR_DERIV[deriv]
    val, tb, rb, n = _series_at_positive(series, z, part)
    pref = z ** (mu + 0.5 - deriv) / (mu * (mu + 1.0))
    value = pref * val
    return EvalResult(value, abs(pref) * tb, n, abs(pref) * rb + 4 * _FLOAT_UNIT * abs(value))


def struve_prefactor(nu: float) -> float:
    """K = 2^(-nu-1) / (Gamma(3/2) Gamma(nu+3/2)) so that H_nu = K z^(nu+1) A(z^2)."""
    return 2.0 ** (-nu - 1.0) / (math.gamma(1.5) * math.gamma(nu + 1.5))


def eval_struve(nu: float, z, deriv: int = 0, even_part_only: bool | None = None) -> EvalResult:
    """Struve function H_nu(z) or a derivative, |nu| <= 1/2.

    For a positive real z the full value is returned.  For any other z the
    result holds the even part K * sum_n e_n... c_n z^(2n) together with
    ``exponent``; the function value is ``value * z**exponent``.

    Parameters
    ----------
    even_part_only : bool, optional
        Force the even-part result (True) or demand the full value
        (False, raises DomainError unless z is real and >= 0).
    """
    _check_deriv(deriv)
    if abs(nu) > 0.5:
        raise ParameterRangeError("Struve family requires |nu| <= 1/2")
    z = _as_number(z)
    series = struve_series(nu)
    part = _PART_FOR_DERIV[deriv]
    kf = struve_prefactor(nu)
    expo = nu + 1.0 - deriv
    positive_real = isinstance(z, float) and z >= 0.0
    if even_part_only is False and not positive_real:
        raise DomainError("the fractional power z**(nu+1-deriv) is only taken for real z >= 0")
    if isinstance(z, complex):
        s = sum_even_series(series, np.array([z * z]), (part,))
        val, tb, rb, n = complex(s.values[part][0]), float(s.trunc_bound[part][0]), float(s.round_bound[part][0]), s.terms
    else:
        val, tb, rb, n = _series_at_positive(series, abs(z), part)
    if even_part_only or not positive_real:
        return EvalResult(kf * val, kf * tb, n, kf * rb + 2 * _FLOAT_UNIT * abs(kf * val), exponent=expo)
    if z == 0.0:
        w0 = _weight_float(series.weights(part), 0)
        if expo > 0 or (w0 == 0.0 and expo + 2 > 0):
            return EvalResult(0.0, 0.0, 1)
        if expo == 0:
            return EvalResult(kf * w0, 0.0, 1, _FLOAT_UNIT * abs(kf * w0))
        raise DomainError(f"derivative {deriv} of H_nu is unbounded at 0 for nu={nu}")
    pref = kf * z ** expo
    value = pref * val
    return EvalResult(value, abs(pref) * tb, n, abs(pref) * rb + 4 * _FLOAT_UNIT * abs(value))


class Part(enum.Enum):
    RATIO_S = "RatioS"
    RATIO_SPRIME = "RatioSprime"
    RATIO_H = "RatioH"
    RATIO_HPRIME = "RatioHprime"


def _coerce_part(which) -> Part:
    if isinstance(which, Part):
        return which
    return Part(which)


def ratio_parts(series: EvenSeries, q, *, use_dd=False, floor=NEAR_POLE_FLOOR):
    """Return (B/A, 1 + C/B) at series variable q, checking both denominators."""
    s = sum_even_series(series, q, ("A", "B", "C"), use_dd=use_dd)
    A, B, C = s.values["A"], s.values["B"], s.values["C"]
    for name, den in (("A", A), ("B", B)):
        # scale: sum of |terms| is at least |den(0)|, which is 1 or e0
        scale = max(1.0, abs(series.e0[0]))
        if np.any(np.abs(den) < floor * scale):
            raise NearPole(f"denominator series {name} is within {floor:g} of zero")
    return B / A, 1.0 + C / B


def eval_lommel_curvature_parts(mu: float, z, which) -> complex:
    """z s'/s (RatioS) or 1 + z s''/s' (RatioSprime) from even-series ratios.

    No fractional power of z is formed; the prefactors cancel.

    Raises
    ------
    NearPole
        If the denominator series is too close to zero at z.
    """
    which = _coerce_part(which)
    if which not in (Part.RATIO_S, Part.RATIO_SPRIME):
        raise ParameterRangeError("which must be RatioS or RatioSprime")
    z = complex(z)
    rs, rsp = ratio_parts(lommel_series(mu), np.array([z * z]))
    return complex((rs if which is Part.RATIO_S else rsp)[0])


def eval_struve_curvature_parts(nu: float, z, which) -> complex:
    """z H'/H (RatioH) or 1 + z H''/H' (RatioHprime) from even-series ratios."""
    which = _coerce_part(which)
    if which not in (Part.RATIO_H, Part.RATIO_HPRIME):
        raise ParameterRangeError("which must be RatioH or RatioHprime")
    z = complex(z)
    rs, rsp = ratio_parts(struve_series(nu), np.array([z * z]))
    return complex((rs if which is Part.RATIO_H else rsp)[0])


# ---------------------------------------------------------------------------
# vectorized helpers used by the zeros and radius modules


def struve_general(nu: float, x: float, deriv: int = 0) -> float:
    """H_nu(x) for any real order nu and x > 0, plain float64 series.

    Coefficients are 1/(Gamma(n+3/2) Gamma(n+nu+3/2)), with 1/Gamma taken
    as 0 at the poles, so orders such as nu = -3/2 are allowed.
    """
    if not x > 0:
        raise DomainError("struve_general needs x > 0")
    total = 0.0
    h = 0.5 * x
    n = 0
    while True:
        g2 = nu + 1.5 + n
        inv = 0.0 if (g2 <= 0 and g2 == int(g2)) else 1.0 / math.gamma(g2)
        e = 2 * n + nu + 1.0
        coef = (-1) ** n * inv / math.gamma(n + 1.5)
        if deriv == 0:
            term = coef * h ** (e)
        elif deriv == 1:
            term = coef * 0.5 * e * h ** (e - 1.0)
        else:
            term = coef * 0.25 * e * (e - 1.0) * h ** (e - 2.0)
        total += term
        n += 1
        if n > x / 2 + 5 and abs(term) <= 1e-18 * abs(total) + 1e-300:
            break
        if n > MAX_TERMS:
            raise NonConvergence("Struve series did not converge")
    return total



# ---------------------------------------------------------------------------
# bulk evaluation with cached coefficient tables


@lru_cache(maxsize=512)
def _coefficient_table(series: EvenSeries, part: str, n: int):
    """Weighted coefficients w_n c_n, n < N, as double-double arrays."""
    factors = series.weights(part)
    hi = np.empty(n)
    lo = np.empty(n)
    ch, cl = np.float64(1.0), np.float64(0.0)
    for k in range(n):
        wh, wl = _weight_dd(factors, k)
        h, l = _dd.mul(ch, cl, np.float64(wh), np.float64(wl))
        hi[k], lo[k] = h, l
        ah, al = _dd.two_sum(np.float64(series.a[0]), np.float64(k))
        bh, bl = _dd.two_sum(np.float64(series.b[0]), np.float64(k))
        dh, dl = _dd.mul(ah, al + series.a[1], bh, bl + series.b[1])
        ch, cl = _dd.div(ch, cl, dh, dl)
        ch, cl = -0.25 * ch, -0.25 * cl
    hi.setflags(write=False)
    lo.setflags(write=False)
    return hi, lo


def _terms_needed(series: EvenSeries, qmax: float, rel: float) -> int:
    """Smallest N past which |c_n| qmax^n stays below rel * max_n |c_n| qmax^n."""
    if qmax == 0.0:
        return 2
    log_t = 0.0
    log_max = 0.0
    n = 0
    limit = math.log(rel)
    while True:
        n += 1
        log_t += math.log(qmax) - math.log(4.0 * abs((series.a[0] + n - 1) * (series.b[0] + n - 1)))
        log_max = max(log_max, log_t)
        ratio = qmax / (4.0 * (series.a[0] + n) * (series.b[0] + n))
        if n >= 0.5 * math.sqrt(qmax) and ratio < 0.5 and log_t - log_max < limit:
            return n + 4
        if n > MAX_TERMS:
            raise NonConvergence(f"series did not converge within {MAX_TERMS} terms")


def horner_even_series(series: EvenSeries, q, parts=("A",), *, q_lo=None, use_dd=None):
    """Weighted even series at q via Horner's rule; returns {part: array}.

    Faster than :func:`sum_even_series` for many points; no error bounds.
    The number of terms is chosen so that the neglected terms are below
    1e-34 (double-double) or 1e-18 (float) of the largest term.
    """
    q = np.asarray(q)
    is_complex = np.iscomplexobj(q)
    if use_dd is None:
        use_dd = not is_complex
    qmax = float(np.max(np.abs(q))) if q.size else 0.0
    n = _terms_needed(series, qmax, 1e-34 if use_dd else 1e-18)
    out = {}
    if use_dd:
        qh = q.astype(float)
        ql = np.zeros_like(qh) if q_lo is None else np.asarray(q_lo, float)
        for p in parts:
            ch, cl = _coefficient_table(series, p, n)
            ph, pl = np.full(qh.shape, ch[-1]), np.full(qh.shape, cl[-1])
            for k in range(n - 2, -1, -1):
                ph, pl = _dd.mul(ph, pl, qh, ql)
                ph, pl = _dd.add(ph, pl, ch[k], cl[k])
            out[p] = ph + pl
    else:
        for p in parts:
            ch, cl = _coefficient_table(series, p, n)
            c = ch + cl
            acc = np.full(q.shape, c[-1], dtype=complex if is_complex else float)
            for k in range(n - 2, -1, -1):
                acc = acc * q + c[k]
            out[p] = acc
    return out
