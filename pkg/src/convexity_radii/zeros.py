"""Positive zeros of the normalized Lommel and Struve functions and of their
derivatives, with sign-change brackets and interlacing certificates.

The functions scanned are the even normalized parts

    A(z) = phi_0(z)        (Lommel)      A(z) = sqrt(pi) 2^nu Gamma(nu+3/2) z^(-nu-1) H_nu(z)  (Struve)
    B(z) = e0 A(z) + z A'(z),

so that s = K z^e0 A and s' = K z^(e0-1) B share their positive zeros
with A and B.  Up to |z| = Z_SWITCH the series of :mod:`specfun` is used
(double-double).  Beyond, where the series loses all digits to
cancellation, the integral representations

    z phi_0(z) = mu (mu+1) int_0^1 (1-t)^(mu-1) sin(zt) dt          0 < mu < 1
    phi_0(z)   = (mu+1) int_0^1 (1-t)^mu cos(zt) dt                -1 < mu < 0
    z H(z)     = (2nu+1) int_0^1 (1-t^2)^(nu-1/2) sin(zt) dt       -1/2 < nu <= 1/2

are evaluated by a composite Gauss rule (Legendre body, Jacobi end panel
carrying the algebraic weight) with about |z|/2 nodes, which resolves the
oscillation to about 1e-11 of the local amplitude.  Derivatives are
taken under the integral sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from . import _dd
from .errors import BracketFailure, NonConvergence, ScanExhausted
from .family import FamilySpec
from .specfun import family_series, horner_even_series, sum_even_series

Z_SWITCH = 36.0
SCAN_STEP = 0.25
BISECT_REL = 1e-13
RESIDUAL_REL = 1e-10
DOUBLE_ZERO_REL = 1e-10


# ---------------------------------------------------------------------------
# evaluation of A, A', A'', B, B' on positive reals


END_PANEL = 0.125


@lru_cache(maxsize=256)
def _composite_rule(n_body: int, n_end: int, alpha: float, smooth: float):
    """Nodes and weights for int_0^1 (1-t)^alpha (1+t)^smooth g(t) dt.

    Gauss-Legendre on [0, 1 - d] (where the weight is smooth) and
    Gauss-Jacobi on the end panel [1 - d, 1].  Keeping the Jacobi rule
    short avoids the loss of accuracy of high-order Jacobi weights for
    strongly singular exponents.
    """
    d = END_PANEL
    x, w = roots_legendre(n_body)
    tb = (1.0 - d) * 0.5 * (1.0 + x)
    wb = w * (1.0 - d) * 0.5 * (1.0 - tb) ** alpha
    x, w = roots_jacobi(n_end, alpha, 0.0)
    te = 1.0 - d * 0.5 * (1.0 - x)
    we = w * (0.5 * d) ** (alpha + 1.0)
    t = np.concatenate([tb, te])
    w = np.concatenate([wb, we]) * (1.0 + t) ** smooth
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


def _rule_sizes(z):
    """Node counts per argument; a pure function of z so repeated calls agree."""
    z = np.asarray(z, float)
    nb = 32 * np.ceil((0.5 * (1.0 - END_PANEL) * z + 60.0) / 32.0)
    ne = 16 * np.ceil((0.5 * END_PANEL * z + 30.0) / 16.0)
    return nb.astype(int), ne.astype(int)


@dataclass(frozen=True)
class _IntegralForm:
    """A(z) = const * I(z)/z (kind "sin") or const * C(z) (kind "cos").

    I and C integrate sin(zt), cos(zt) against (1-t)^alpha (1+t)^smooth.
    """

    kind: str
    alpha: float
    const: float
    smooth_exponent: float = 0.0

    def derivatives(self, z):
        z = np.asarray(z, float).reshape(-1)
        out = np.empty((3, z.size))
        nb, ne = _rule_sizes(z)
        for key in sorted(set(zip(nb.tolist(), ne.tolist()))):
            sel = np.nonzero((nb == key[0]) & (ne == key[1]))[0]
            t, w = _composite_rule(key[0], key[1], self.alpha, self.smooth_exponent)
            chunk = max(1, 400_000 // t.size)
            for s in range(0, sel.size, chunk):
                idx = sel[s:s + chunk]
                zv = z[idx]
                arg = zv[:, None] * t[None, :]
                sn, cs = np.sin(arg), np.cos(arg)
                if self.kind == "sin":
                    i0 = sn @ w
                    i1 = cs @ (w * t)
                    i2 = -(sn @ (w * t * t))
                    a = i0 / zv
                    da = i1 / zv - i0 / zv**2
                    dda = i2 / zv - 2.0 * i1 / zv**2 + 2.0 * i0 / zv**3
                else:
                    a = cs @ w
                    da = -(sn @ (w * t))
                    dda = -(cs @ (w * t * t))
                out[0, idx] = self.const * a
                out[1, idx] = self.const * da
                out[2, idx] = self.const * dda
        return out


def _sinc_derivatives(z):
    z = np.asarray(z, float)
    s, c = np.sin(z), np.cos(z)
    return np.stack([s / z, c / z - s / z**2, -s / z - 2 * c / z**2 + 2 * s / z**3])


class NormalizedFunction:
    """Vectorized A, A', A'', B, B' of one family on positive real arguments."""

    def __init__(self, family: FamilySpec):
        self.family = family
        self.series = family_series(family)
        self.e0 = family.leading_exponent
        p = family.param
        if family.is_lommel:
            if p > 0:
                self._far = _IntegralForm("sin", p - 1.0, p * (p + 1.0))
            else:
                self._far = _IntegralForm("cos", p, p + 1.0)
        elif p == -0.5:
            self._far = None
        else:
            self._far = _IntegralForm("sin", p - 0.5, 2.0 * p + 1.0, p - 0.5)

    def _far_derivs(self, z):
        if self._far is None:
            return _sinc_derivatives(z)
        return self._far.derivatives(z)

    def _near_derivs(self, z):
        zh = np.asarray(z, float)
        qh, ql = _dd.two_prod(zh, zh)
        s = horner_even_series(self.series, qh, ("A", "dA", "ddA"), q_lo=ql)
        a = s["A"]
        da = s["dA"] / zh
        dda = s["ddA"] / (zh * zh)
        return np.stack([a, da, dda])

    def derivatives(self, z):
        """Rows A, A', A'' at z (positive reals)."""
        z = np.atleast_1d(np.asarray(z, float))
        out = np.empty((3,) + z.shape)
        near = z <= Z_SWITCH
        if np.any(near):
            out[:, near] = self._near_derivs(z[near])
        if np.any(~near):
            out[:, ~near] = self._far_derivs(z[~near])
        return out

    def function(self, z, order: int = 0):
        """(target, target') for A (order 0) or B (order 1)."""
        a, da, dda = self.derivatives(z)
        z = np.atleast_1d(np.asarray(z, float))
        if order == 0:
            return a, da
        b = self.e0 * a + z * da
        db = (self.e0 + 1.0) * da + z * dda
        return b, db

    def value(self, z, order: int = 0):
        """A (order 0) or B (order 1) alone; the cheap path used by bisection."""
        z = np.atleast_1d(np.asarray(z, float))
        out = np.empty(z.shape)
        near = z <= Z_SWITCH
        if np.any(near):
            zh = z[near]
            qh, ql = _dd.two_prod(zh, zh)
            part = "A" if order == 0 else "B"
            out[near] = horner_even_series(self.series, qh, (part,), q_lo=ql)[part]
        if np.any(~near):
            zf = z[~near]
            a, da, _ = self._far_derivs(zf)
            out[~near] = a if order == 0 else self.e0 * a + zf * da
        return out

    def second(self, z):
        a, da, dda = self.derivatives(z)
        return dda


# ---------------------------------------------------------------------------
# tables


@dataclass(frozen=True)
class ZeroRecord:
    """One positive zero.

    ``multiplicity`` is 2 for the double zeros of H_{1/2}; the bracket then
    refers to the sign change of the derivative.
    """

    index: int
    bracket_lo: float
    bracket_hi: float
    value: float
    residual: float
    multiplicity: int = 1


@dataclass(frozen=True)
class ZeroTable:
    """Indexed positive zeros of A (derivative_order 0) or B (order 1).

    ``inherited`` holds zeros of B sitting at multiple zeros of A; they are
    not part of the one-per-interval sequence in ``records`` but belong to
    the product expansion of B.
    """

    family: FamilySpec
    derivative_order: int
    records: tuple
    inherited: tuple = field(default=())

    def __len__(self):
        return len(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.records])

    def abscissa(self, k: int) -> float:
        """x_k with the convention x_0 = 0."""
        return 0.0 if k == 0 else self.records[k - 1].value

    def spectral_nodes(self):
        """All zeros (with multiplicity) entering the product expansion, sorted."""
        recs = sorted(self.records + self.inherited, key=lambda r: r.value)
        return (np.array([r.value for r in recs]),
                np.array([r.multiplicity for r in recs], dtype=float))


@dataclass(frozen=True)
class InterlacingCertificate:
    family: FamilySpec
    count: int
    margins: tuple
    offending: tuple | None = None

    @property
    def passed(self) -> bool:
        return self.offending is None and len(self.margins) > 0

    @property
    def worst_margin(self) -> float:
        return min(self.margins) if self.margins else 0.0


# ---------------------------------------------------------------------------
# refinement


def _bisect(fn, lo, hi, flo):
    """Lockstep bracketing root search of fn on [lo, hi]; flo = fn(lo).

    Illinois false-position steps with a forced midpoint every fourth
    iteration, so each bracket still shrinks at least geometrically.
    """
    lo, hi, flo = lo.copy(), hi.copy(), flo.copy()
    fhi = fn(hi)
    side = np.zeros(lo.size, dtype=int)  # +1 when lo moved last, -1 when hi moved
    for it in range(200):
        width = hi - lo
        active = width > BISECT_REL * (1.0 + np.abs(lo))
        if not np.any(active):
            break
        idx = np.nonzero(active)[0]
        a, b, fa, fb = lo[idx], hi[idx], flo[idx], fhi[idx]
        mid = 0.5 * (a + b)
        if it % 4 != 3:
            with np.errstate(divide="ignore", invalid="ignore"):
                fp = b - fb * (b - a) / (fb - fa)
            ok = np.isfinite(fp) & (fp > a) & (fp < b)
            mid = np.where(ok, fp, mid)
        fm = fn(mid)
        exact = fm == 0.0
        left = (np.sign(fm) == np.sign(fa)) & ~exact
        right = ~left & ~exact
        li, ri, ei = idx[left], idx[right], idx[exact]
        # Illinois: halve the stale endpoint value when the same side moves twice
        fhi[li[side[li] == 1]] *= 0.5
        flo[ri[side[ri] == -1]] *= 0.5
        lo[li], flo[li], side[li] = mid[left], fm[left], 1
        hi[ri], fhi[ri], side[ri] = mid[right], fm[right], -1
        lo[ei] = hi[ei] = mid[exact]
    return lo, hi


def _newton_polish(fn, dfn, x, lo, hi):
    """Up to three Newton steps, kept only while inside (lo, hi) and improving."""
    fx = fn(x)
    for _ in range(3):
        d = dfn(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = x - fx / d
        fn_new = fn(np.where(np.isfinite(xn), xn, x))
        ok = np.isfinite(xn) & (xn > lo) & (xn < hi) & (np.abs(fn_new) < np.abs(fx))
        if not np.any(ok):
            break
        x = np.where(ok, xn, x)
        fx = np.where(ok, fn_new, fx)
    return x


def _local_scale(grid, values, x, half_width=math.pi):
    sel = np.abs(grid - x) <= half_width
    return float(np.max(np.abs(values[sel]))) if np.any(sel) else float(np.max(np.abs(values)))


def _scan(nf: NormalizedFunction, order: int, z_lo: float, z_hi: float, n_max: int):
    """Find the first n_max distinct zeros of A (order 0) or B (order 1) on (z_lo, z_hi]."""
    grid = np.arange(1, int(math.floor((z_hi - z_lo) / SCAN_STEP)) + 1) * SCAN_STEP + z_lo
    f, df = nf.function(grid, order)
    sg = np.sign(f)

    def target(z):
        return nf.value(z, order)

    def dtarget(z):
        return nf.function(z, order)[1]

    cands = []  # (position, lo, hi, kind)
    for k in np.nonzero(sg[:-1] * sg[1:] < 0)[0]:
        cands.append((grid[k], grid[k], grid[k + 1], "simple"))
    for k in np.nonzero(sg == 0)[0]:
        lo = grid[k - 1] if k > 0 else z_lo
        cands.append((grid[k], lo, grid[min(k + 1, grid.size - 1)], "exact"))
    # interior minima of |f| without a sign change: double zero or close pair
    af = np.abs(f)
    for k in range(1, grid.size - 1):
        if af[k] < af[k - 1] and af[k] <= af[k + 1] and sg[k - 1] == sg[k] == sg[k + 1] != 0:
            if np.sign(df[k - 1]) != np.sign(df[k + 1]):
                cands.append((grid[k], grid[k - 1], grid[k + 1], "critical"))
    cands.sort()

    found = []  # (lo, hi, multiplicity, use_derivative)
    crit = [c for c in cands if c[3] == "critical"]
    crit_pos = {}
    if crit:
        lo = np.array([c[1] for c in crit])
        hi = np.array([c[2] for c in crit])
        lo, hi = _bisect(dtarget, lo, hi, dtarget(lo))
        cpt = 0.5 * (lo + hi)
        fc = target(cpt)
        for c, l, h, x, v in zip(crit, lo, hi, cpt, fc):
            crit_pos[c[0]] = (l, h, x, v)
    for c in cands:
        pos, lo, hi, kind = c
        if kind == "simple":
            found.append((lo, hi, 1, False))
        elif kind == "exact":
            found.append((pos, pos, 1, None))
        else:
            l, h, x, v = crit_pos[pos]
            scale = _local_scale(grid, f, x)
            if abs(v) <= DOUBLE_ZERO_REL * scale:
                found.append((l, h, 2, True))
            elif np.sign(v) != np.sign(f[np.searchsorted(grid, pos)]):
                found.append((lo, x, 1, False))
                found.append((x, hi, 1, False))
    found.sort(key=lambda r: r[0])
    return grid, f, found[:n_max], len(found)


def _refine(nf, order, grid, f, found, index_start=1):
    """Turn scan brackets into polished ZeroRecords."""

    def target(z):
        return nf.value(z, order)

    def dtarget(z):
        return nf.function(z, order)[1]

    def ddtarget(z):
        if order == 0:
            return nf.second(z)
        raise NotImplementedError

    simple = [i for i, r in enumerate(found) if r[3] is False]
    double = [i for i, r in enumerate(found) if r[3] is True]
    values = [None] * len(found)
    brackets = [None] * len(found)
    if simple:
        lo = np.array([found[i][0] for i in simple])
        hi = np.array([found[i][1] for i in simple])
        lo, hi = _bisect(target, lo, hi, target(lo))
        x = _newton_polish(target, dtarget, 0.5 * (lo + hi), lo, hi)
        for j, i in enumerate(simple):
            values[i], brackets[i] = x[j], (lo[j], hi[j])
    if double:
        lo = np.array([found[i][0] for i in double])
        hi = np.array([found[i][1] for i in double])
        x = 0.5 * (lo + hi)
        x = _newton_polish(dtarget, ddtarget, x, lo, hi)
        for j, i in enumerate(double):
            values[i], brackets[i] = x[j], (lo[j], hi[j])
    records = []
    for i, r in enumerate(found):
        if r[3] is None:
            v, br = float(r[0]), (float(r[0]) - SCAN_STEP, float(r[0]) + SCAN_STEP)
        else:
            v, br = float(values[i]), (float(brackets[i][0]), float(brackets[i][1]))
        res = float(abs(target(np.array([v]))[0]))
        scale = _local_scale(grid, f, v)
        if res > RESIDUAL_REL * scale:
            raise NonConvergence(f"zero near {v:.6g} has residual {res:.3g} above tolerance")
        records.append(ZeroRecord(index_start + i, br[0], br[1], v, res, r[2]))
    return records


def _window(n_max: int) -> float:
    return (n_max + 3) * math.pi + 10.0


@lru_cache(maxsize=256)
def _function_zeros(family: FamilySpec, n_max: int) -> ZeroTable:
    nf = NormalizedFunction(family)
    grid, f, found, total = _scan(nf, 0, 0.0, _window(n_max), n_max)
    if len(found) < n_max and any(r[2] > 1 for r in found):
        # double zeros are spaced 2 pi apart, so they need twice the window
        grid, f, found, total = _scan(nf, 0, 0.0, _window(2 * n_max), n_max)
    if len(found) < n_max:
        raise ScanExhausted(f"{family}: only {total} zeros in the scan window, {n_max} requested")
    return ZeroTable(family, 0, tuple(_refine(nf, 0, grid, f, found)))


def function_zeros(family: FamilySpec, n_max: int) -> ZeroTable:
    """First n_max positive zeros of the even normalized function.

    Zeros are those of phi_0 for the Lommel family (for mu < 0 this is phi_1
    at parameter mu + 1, the same series) and of z^(-nu-1) H_nu for Struve.

    Raises
    ------
    ScanExhausted
        If the scan window (0, (n_max+3) pi + 10] holds fewer zeros.  When
        the window holds double zeros it is widened to (2 n_max + 3) pi + 10
        first.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    return _function_zeros(family, int(n_max))


def _interval_scan(nf, lo_edges, hi_edges):
    """Scan B strictly inside each interval, returning per-interval sign-change brackets."""
    counts = np.maximum(16, np.ceil((hi_edges - lo_edges) / SCAN_STEP).astype(int))
    pts, owner = [], []
    for k, (a, b, m) in enumerate(zip(lo_edges, hi_edges, counts)):
        pts.append(a + (b - a) * np.arange(1, m + 1) / (m + 1))
        owner.append(np.full(m, k))
    pts = np.concatenate(pts)
    owner = np.concatenate(owner)
    vals = nf.value(pts, 1)
    out = []
    for k in range(len(lo_edges)):
        sel = owner == k
        p, v = pts[sel], vals[sel]
        changes = np.nonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)[0]
        exact = np.nonzero(v == 0)[0]
        out.append((p, v, changes, exact))
    return out


@lru_cache(maxsize=256)
def _derivative_zeros(family: FamilySpec, n_max: int, base: ZeroTable) -> ZeroTable:
    nf = NormalizedFunction(family)
    edges = np.array([base.abscissa(k) for k in range(n_max + 1)])
    scans = _interval_scan(nf, edges[:-1], edges[1:])
    found = []
    for k, (p, v, changes, exact) in enumerate(scans, start=1):
        n = len(changes) + len(exact)
        if n != 1:
            raise BracketFailure(
                f"{family}: {n} sign changes of the derivative in interval {k} "
                f"({edges[k - 1]:.6g}, {edges[k]:.6g}), expected exactly one"
            )
        if len(exact):
            found.append((p[exact[0]], p[exact[0]], 1, None))
        else:
            j = changes[0]
            found.append((p[j], p[j + 1], 1, False))
    grid = np.concatenate([s[0] for s in scans])
    gv = np.concatenate([s[1] for s in scans])
    records = _refine(nf, 1, grid, gv, found)
    # zeros of B at multiple zeros of A
    inherited = []
    for rec in base.records[:n_max]:
        if rec.multiplicity > 1:
            x = rec.value
            lo, hi = np.array([x - 0.1]), np.array([x + 0.1])
            blo = nf.function(lo, 1)[0]
            bhi = nf.function(hi, 1)[0]
            if np.sign(blo[0]) == np.sign(bhi[0]):
                raise BracketFailure(f"{family}: no sign change of B at the multiple zero {x:.6g}")
            lo, hi = _bisect(lambda z: nf.value(z, 1), lo, hi, blo)
            v = float(0.5 * (lo[0] + hi[0]))
            res = float(abs(nf.value(np.array([v]), 1)[0]))
            inherited.append(ZeroRecord(rec.index, float(lo[0]), float(hi[0]), v, res, rec.multiplicity - 1))
    return ZeroTable(family, 1, tuple(records), tuple(inherited))


def derivative_zeros(family: FamilySpec, n_max: int, base: ZeroTable | None = None) -> ZeroTable:
    """Zeros of the derivative, one per interval (x_{k-1}, x_k) with x_0 = 0.

    Parameters
    ----------
    family : FamilySpec
    n_max : int
    base : ZeroTable, optional
        Function zeros with at least n_max records; computed if omitted.

    Raises
    ------
    BracketFailure
        If an interval does not contain exactly one sign change.
    """
    if base is None:
        base = function_zeros(family, n_max)
    if base.family != family or base.derivative_order != 0:
        raise ValueError("base must be the function-zero table of the same family")
    if len(base) < n_max:
        raise ValueError(f"base has {len(base)} zeros, {n_max} needed")
    if len(base) > n_max:
        base = function_zeros(family, n_max)
    return _derivative_zeros(family, int(n_max), base)


def derivative_zeros_direct(family: FamilySpec, n_max: int) -> ZeroTable:
    """Zeros of B from a plain scan on (0, window], ignoring the interval structure.

    Diagnostic counterpart of :func:`derivative_zeros`; double zeros of A
    show up here as ordinary zeros of B.
    """
    nf = NormalizedFunction(family)
    grid, f, found, total = _scan(nf, 1, 0.0, _window(n_max), n_max)
    if len(found) < n_max:
        raise ScanExhausted(f"{family}: only {total} derivative zeros in the scan window")
    return ZeroTable(family, 1, tuple(_refine(nf, 1, grid, f, found)))


def imaginary_axis_zero(family: FamilySpec, order: int = 1, y_max: float = 30.0) -> float | None:
    """Smallest y > 0 with A(iy) = 0 (order 0) or B(iy) = 0 (order 1), if any.

    On the imaginary axis q = -y^2 and every term of the series past the
    first is positive, so a zero exists only when the leading weight is
    negative (B with e0 < 0).
    """
    series = family_series(family)
    part = "A" if order == 0 else "B"
    ys = np.linspace(1e-3, y_max, 3000)
    v = sum_even_series(series, -(ys**2), (part,)).values[part]
    idx = np.nonzero(np.sign(v[:-1]) != np.sign(v[1:]))[0]
    if idx.size == 0:
        return None

    def fn(y):
        return sum_even_series(series, -(y**2), (part,)).values[part]

    lo, hi = np.array([ys[idx[0]]]), np.array([ys[idx[0] + 1]])
    lo, hi = _bisect(fn, lo, hi, fn(lo))
    return float(0.5 * (lo[0] + hi[0]))


def interlacing_certificate(fn_zeros: ZeroTable, d_zeros: ZeroTable) -> InterlacingCertificate:
    """Check 0 < x'_1 < x_1 < x'_2 < x_2 < ... and report every gap.

    The margins are, in order, x'_1 - 0, x_1 - x'_1, x'_2 - x_1, ...  A
    failed certificate names the first offending pair in ``offending``.
    """
    if fn_zeros.family != d_zeros.family:
        raise ValueError("tables belong to different families")
    count = min(len(fn_zeros), len(d_zeros))
    if len(fn_zeros) != len(d_zeros):
        raise ValueError("tables must have equal counts")
    seq = [("0", 0.0)]
    for k in range(count):
        seq.append((f"x'_{k + 1}", d_zeros.records[k].value))
        seq.append((f"x_{k + 1}", fn_zeros.records[k].value))
    margins, offending = [], None
    for (na, a), (nb, b) in zip(seq[:-1], seq[1:]):
        m = b - a
        margins.append(m)
        if offending is None and not m > 0:
            offending = (na, nb)
    return InterlacingCertificate(fn_zeros.family, count, tuple(margins), offending)
