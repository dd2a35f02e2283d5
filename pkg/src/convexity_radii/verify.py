"""Independent checks: quadrature oracles, the Struve recurrence, Laguerre-type
inequalities, shape checks of the Polya weights and disk certification.

The quadrature oracles use only the integral representations

    z phi_0(z) = mu (mu+1) int_0^1 (1-t)^(mu-1) sin(zt) dt
    phi_1(z)   = mu int_0^1 (1-t)^(mu-1) cos(zt) dt
    H_nu(x)    = 2 (x/2)^nu / (sqrt(pi) Gamma(nu+1/2)) int_0^1 (1-t^2)^(nu-1/2) sin(xt) dt

and never touch the power series, so agreement with :mod:`specfun` is a
genuine cross-check.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from ._quadrature import QuadratureSpec, Substitution, integrate, integrate_endpoint_weight
from .errors import CertificationFailure, ConvexityRadiiError, DomainError, ParameterRangeError
from .family import Family, FamilySpec, NormKind, RadiusQuery
from .radius import (Method, RadiusResult, Verification, curvature, direct_curvature,
                     solve_radius, upper_endpoint)
from .specfun import (eval_lommel, eval_struve, family_series, struve_general,
                      sum_even_series)

__all__ = [
    "QuadratureSpec", "Substitution", "VerificationReport", "ShapeKind",
    "lommel_d1_integral_oracle", "lommel_d1_literal_constant_oracle",
    "lommel_shifted_d1_integral_oracle", "lommel_shifted_d1_series",
    "shifted_identity_candidates", "struve_integral_oracle",
    "struve_recurrence_check", "integrand_shape_check", "laguerre_check",
    "disk_certify", "certified", "interlacing_check", "dual_path_check", "run_suite",
    "validated_families", "disk_sample_queries",
]

ORACLE_TOL = 1e-8
RECURRENCE_TOL = 1e-12
DISK_TOL = 1e-6
SHAPE_TOL = 1e-12


@dataclass
class VerificationReport:
    """Outcome of one check over a parameter grid.

    ``passed`` is decided by comparing ``worst_margin`` with the tolerance the
    check documents; a positive margin always means "satisfied".
    """

    check_name: str
    parameter_grid: list
    passed: bool
    worst_margin: float
    details: str = ""
    extra: dict = field(default_factory=dict)

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.check_name}: worst margin {self.worst_margin:.3e} {self.details}".rstrip()


def _require_open_unit_mu(mu):
    if not 0.0 < mu < 1.0:
        raise ParameterRangeError(f"oracle requires mu in (0, 1), got {mu}")


def _require_positive(z):
    if not z > 0.0:
        raise DomainError(f"oracle requires z > 0, got {z}")


# ---------------------------------------------------------------------------
# quadrature oracles


def _lommel_integrals(mu, z, spec):
    """I = int w sin(zt), J = int w t cos(zt), with w = (1-t)^(mu-1)."""
    i_sin, _ = integrate_endpoint_weight(lambda t: np.sin(z * t), mu, spec=spec)
    j_cos, _ = integrate_endpoint_weight(lambda t: t * np.cos(z * t), mu, spec=spec)
    return i_sin, j_cos


def lommel_d1_integral_oracle(mu: float, z: float, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """-z^(3/2-mu) s'_{mu-1/2,1/2}(z) by quadrature.

    Uses -z J + (1/2 - mu) I, which follows from differentiating
    z^(mu+1/2) phi_0(z) / (mu (mu+1)) and the sine representation of z phi_0.
    """
    _require_open_unit_mu(mu)
    _require_positive(z)
    i_sin, j_cos = _lommel_integrals(mu, z, spec)
    return -z * j_cos + (0.5 - mu) * i_sin


def lommel_d1_literal_constant_oracle(mu: float, z: float,
                                      spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Same integrals combined with the constant (mu + 3/2) in place of (1/2 - mu).

    Kept so that the mismatch of that variant can be reported; it does not
    reproduce the series.
    """
    _require_open_unit_mu(mu)
    _require_positive(z)
    i_sin, j_cos = _lommel_integrals(mu, z, spec)
    return -z * j_cos + (mu + 1.5) * i_sin


def _phi1_parts(mu, z, spec):
    c, _ = integrate_endpoint_weight(lambda t: np.cos(z * t), mu, spec=spec)
    s, _ = integrate_endpoint_weight(lambda t: t * np.sin(z * t), mu, spec=spec)
    return mu * c, -mu * s  # phi_1, phi_1'


def lommel_shifted_d1_integral_oracle(mu: float, z: float,
                                      spec: QuadratureSpec = QuadratureSpec()) -> float:
    """z phi_1'(z) + (mu - 1/2) phi_1(z) by quadrature.

    This equals mu (mu-1) z^(3/2-mu) s'_{mu-3/2,1/2}(z); see
    :func:`lommel_shifted_d1_series` for the series side.
    """
    _require_open_unit_mu(mu)
    if z < 0.0:
        raise DomainError(f"oracle requires z >= 0, got {z}")
    phi1, dphi1 = _phi1_parts(mu, z, spec)
    return z * dphi1 + (mu - 0.5) * phi1


def lommel_shifted_d1_series(mu: float, z: float) -> float:
    """mu (mu-1) z^(3/2-mu) s'_{mu-3/2,1/2}(z) from the power series."""
    _require_open_unit_mu(mu)
    _require_positive(z)
    d = eval_lommel(mu - 1.0, z, deriv=1).value
    return mu * (mu - 1.0) * z ** (1.5 - mu) * d


def shifted_identity_candidates(mu: float, z: float,
                                spec: QuadratureSpec = QuadratureSpec()) -> dict:
    """Residuals of the candidate normalizations of the shifted identity.

    Each key names the left-hand side compared with the quadrature value of
    z phi_1' + (mu - 1/2) phi_1.
    """
    rhs = lommel_shifted_d1_integral_oracle(mu, z, spec)
    d = eval_lommel(mu - 1.0, z, deriv=1).value
    cands = {
        "mu(mu-1) z^(3/2-mu) s'": mu * (mu - 1.0) * z ** (1.5 - mu) * d,
        "mu(mu-1) z^(1/2-mu) s'": mu * (mu - 1.0) * z ** (0.5 - mu) * d,
        "(mu-1) z^(3/2-mu) s'": (mu - 1.0) * z ** (1.5 - mu) * d,
        "(mu-1) z^(1/2-mu) s'": (mu - 1.0) * z ** (0.5 - mu) * d,
    }
    return {k: abs(v - rhs) for k, v in cands.items()}


def struve_integral_oracle(nu: float, x: float, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """H_nu(x) from the sine integral over (1-t^2)^(nu-1/2).

    [0, 1/2] is integrated directly; on [1/2, 1] the factor (1-t)^(nu-1/2)
    is removed by u = (1-t)^(nu+1/2).
    """
    if not -0.5 < nu <= 0.5:
        raise ParameterRangeError(f"oracle requires nu in (-1/2, 1/2], got {nu}")
    _require_positive(x)
    e = nu - 0.5
    left, _ = integrate(lambda t: (1.0 - t * t) ** e * np.sin(x * t), 0.0, 0.5, spec)
    right, _ = integrate_endpoint_weight(lambda t: (1.0 + t) ** e * np.sin(x * t),
                                         nu + 0.5, a=0.5, spec=spec)
    pref = 2.0 * (0.5 * x) ** nu / (math.sqrt(math.pi) * math.gamma(nu + 0.5))
    return pref * (left + right)


def struve_recurrence_check(nu: float, x: float) -> float:
    """Relative residual of x H_{nu-1} = nu H_nu + x H'_nu."""
    if abs(nu) > 0.5:
        raise ParameterRangeError(f"|nu| <= 1/2 required, got {nu}")
    _require_positive(x)
    lhs = x * struve_general(nu - 1.0, x)
    h = eval_struve(nu, x, 0).value
    dh = eval_struve(nu, x, 1).value
    scale = max(abs(lhs), abs(nu * h) + abs(x * dh))
    return abs(lhs - nu * h - x * dh) / scale


# ---------------------------------------------------------------------------
# shape of the Polya weights


class ShapeKind(enum.Enum):
    K_MU = "k_mu"
    L_MU = "l_mu"
    Q_NU = "q_nu"


def _shape_function(kind: ShapeKind, p: float):
    if kind is ShapeKind.K_MU:
        return lambda t: ((p + 2.5) - (2.0 * p + 1.5) * t) * (1.0 - t) ** (p - 2.0), p - 2.0
    if kind is ShapeKind.L_MU:
        return lambda t: (1.5 - p - 0.5 * t) * (1.0 - t) ** (p - 2.0), p - 2.0
    # the linear factor vanishes at t = 1 only for nu = 1/2
    exponent = p - 1.5 if p != 0.5 else 0.0
    return lambda t: (1.0 - p - p * t * t) * (1.0 - t * t) ** (p - 1.5), exponent


def integrand_shape_check(kind, param: float, grid) -> VerificationReport:
    """Positivity and monotonicity of k_mu, l_mu or q_nu on a grid in [0, 1).

    The report also carries the endpoint exponent estimated from samples at
    1 - 1e-4 and 1 - 1e-6; an exponent <= -1 means the weight is not
    integrable at t = 1.
    """
    kind = ShapeKind(kind) if not isinstance(kind, ShapeKind) else kind
    if kind is ShapeKind.Q_NU:
        if abs(param) > 0.5:
            raise ParameterRangeError(f"|nu| <= 1/2 required, got {param}")
    else:
        _require_open_unit_mu(param)
    t = np.asarray(sorted(grid), dtype=float)
    if t.size < 2 or t[0] < 0.0 or t[-1] >= 1.0:
        raise ValueError("grid must hold at least two points in [0, 1)")
    f, exponent = _shape_function(kind, param)
    v = f(t)
    scale = float(np.max(np.abs(v)))
    inc = np.diff(v) / scale
    worst = float(min(np.min(v) / scale, np.min(inc)))
    positive = bool(np.all(v > 0.0))
    t1, t2 = 1.0 - 1e-4, 1.0 - 1e-6
    slope = math.log(f(t2) / f(t1)) / math.log((1.0 - t2) / (1.0 - t1))
    integrable = slope > -1.0
    passed = positive and worst >= -SHAPE_TOL
    details = (f"positive={positive}; endpoint exponent {slope:.4f} (exact {exponent:.4f}); "
               f"integrable at t=1: {integrable}")
    return VerificationReport(f"shape[{kind.value}, {param:g}]", list(map(float, t)), passed,
                              worst, details,
                              {"endpoint_exponent": slope, "integrable": integrable})


# ---------------------------------------------------------------------------
# Laguerre-type inequality


def laguerre_check(family: FamilySpec, grid) -> VerificationReport:
    """(F')^2 - F F'' > e0 F^2 / z^2 on a grid of positive z.

    With the even series this reads B^2 - A C - e0 A^2 > 0 (prefactors
    cancel); the margin reported is that difference over
    B^2 + |A C| + |e0| A^2.
    """
    series = family_series(family)
    e0 = family.leading_exponent
    z = np.asarray(grid, dtype=float)
    if np.any(z <= 0.0):
        raise DomainError("Laguerre grid must be positive")
    s = sum_even_series(series, z * z, ("A", "B", "C"))
    margins = []
    for A, B, C in zip(s.values["A"], s.values["B"], s.values["C"]):
        num = B * B - A * C - e0 * A * A
        margins.append(num / (B * B + abs(A * C) + abs(e0) * A * A))
    worst = float(min(margins))
    return VerificationReport(f"laguerre[{family}]", list(map(float, z)), worst > 0.0, worst,
                              f"{len(margins)} points")


# ---------------------------------------------------------------------------
# disk certification


def _period(norm: NormKind) -> float:
    # Power and Shift functionals depend on z^2
    return 2.0 * math.pi if norm is NormKind.SQRT else math.pi


def disk_certify(result: RadiusResult, query: RadiusQuery, theta_points: int = 721,
                 shrink: float = 0.99, raise_on_failure: bool = False) -> VerificationReport:
    """Sample Re(curvature) on |z| = shrink * radius and past the radius on the real axis.

    Passes when the boundary minimum is >= alpha - 1e-6 and attained at
    theta = 0 up to one grid cell (modulo the symmetry period of the
    functional), and the curvature at min(1.01 radius, midpoint to the upper
    endpoint) is below alpha.

    Raises
    ------
    CertificationFailure
        Only with ``raise_on_failure``; carries the offending angle.
    """
    if not 0.0 < shrink < 1.0:
        raise ValueError("shrink must lie in (0, 1)")
    if theta_points < 360:
        raise ValueError("theta_points must be >= 360")
    theta = np.linspace(0.0, 2.0 * math.pi, theta_points)
    cell = theta[1] - theta[0]
    r = shrink * result.radius
    vals = np.real(direct_curvature(query, r * np.exp(1j * theta)))
    k = int(np.argmin(vals))
    vmin = float(vals[k])
    period = _period(query.norm)
    # every angle within 1e-12 of the minimum must sit on a multiple of the period
    near = np.nonzero(vals <= vmin + 1e-12 * max(1.0, abs(vmin)))[0]
    offset = np.abs((theta[near] + 0.5 * period) % period - 0.5 * period)
    bad_idx = near[offset > cell * 1.0000001]
    at_zero = bad_idx.size == 0
    r_out = min(1.01 * result.radius, 0.5 * (result.radius + result.upper_endpoint))
    outside = float(curvature(query, r_out)) - query.alpha
    margin = vmin - query.alpha
    passed = margin >= -DISK_TOL and at_zero and outside < 0.0
    details = (f"min Re at theta={theta[k]:.5f} ({vmin:.9f}); "
               f"curvature-alpha at r={r_out:.9g}: {outside:.3e}")
    if not passed and raise_on_failure:
        bad_theta = float(theta[bad_idx[0]]) if bad_idx.size else float(theta[k])
        raise CertificationFailure(f"{query.family} {query.norm.value}: {details}", bad_theta)
    return VerificationReport(f"disk[{query.family}, {query.norm.value}, alpha={query.alpha:g}]",
                              [result.radius], passed, margin, details,
                              {"theta_min": float(theta[k]), "outside": outside})


def certified(result: RadiusResult, report: VerificationReport) -> RadiusResult:
    """Copy of ``result`` marked disk-checked when the report passed."""
    if report.passed:
        return replace(result, verified=Verification.DISK_CHECKED)
    return result


# ---------------------------------------------------------------------------
# grid checks shared with the CLI suites


def interlacing_check(family: FamilySpec, n: int = 10) -> VerificationReport:
    from .zeros import derivative_zeros, function_zeros, interlacing_certificate
    try:
        fn = function_zeros(family, n)
        d = derivative_zeros(family, n, fn)
        cert = interlacing_certificate(fn, d)
    except ConvexityRadiiError as exc:
        return VerificationReport(f"interlacing[{family}]", [n], False, -math.inf,
                                  f"{type(exc).__name__}: {exc}")
    margin = cert.worst_margin
    return VerificationReport(f"interlacing[{family}]", [n], margin > 1e-8, margin,
                              f"{n} zeros")


def dual_path_check(query: RadiusQuery, points: int = 40, n: int = 200) -> VerificationReport:
    """max |Direct - Spectral| over r in (0, 0.95 upper_endpoint)."""
    try:
        up = upper_endpoint(query)
        r = np.linspace(0.0, 0.95 * up, points + 1)[1:]
        a = np.asarray(curvature(query, r, Method.DIRECT), dtype=float)
        b = np.asarray(curvature(query, r, Method.SPECTRAL, n), dtype=float)
    except ConvexityRadiiError as exc:
        return VerificationReport(f"dual-path[{query.family}, {query.norm.value}]", [], False,
                                  -math.inf, f"{type(exc).__name__}: {exc}")
    worst = float(np.max(np.abs(a - b)))
    return VerificationReport(f"dual-path[{query.family}, {query.norm.value}]",
                              list(map(float, r)), worst <= 1e-6, 1e-6 - worst,
                              f"max diff {worst:.3e}")


def _radius_ladder(family: FamilySpec, norm: NormKind) -> VerificationReport:
    name = f"radius-ladder[{family}, {norm.value}]"
    alphas = [i / 10 for i in range(10)]
    try:
        res = [solve_radius(RadiusQuery(family, norm, a)) for a in alphas]
    except ConvexityRadiiError as exc:
        return VerificationReport(name, alphas, False, -math.inf, f"{type(exc).__name__}: {exc}")
    radii = [x.radius for x in res]
    worst_res = max(x.residual for x in res)
    dec = min(a - b for a, b in zip(radii, radii[1:]))
    below = min(x.upper_endpoint - x.radius for x in res)
    margin = min(1e-10 - worst_res, dec, below)
    return VerificationReport(name, alphas, margin > 0.0, margin,
                              f"max residual {worst_res:.2e}; min decrease {dec:.3e}")


def _oracle_reports(seed=None) -> list:
    rng = np.random.default_rng(seed) if seed is not None else None

    def jit(x):
        return x if rng is None else x * (1.0 + 1e-3 * rng.uniform(-1.0, 1.0))

    reports = []
    grid = [(0.5, 1.0), (0.25, 2.0), (0.75, 1.0), (0.25, 3.0), (0.1, 5.0), (0.9, 0.5)]
    diffs = []
    for mu, z in grid:
        z = jit(z)
        a = lommel_d1_integral_oracle(mu, z)
        b = -z ** (1.5 - mu) * eval_lommel(mu, z, 1).value
        c = lommel_shifted_d1_integral_oracle(mu, z)
        d = lommel_shifted_d1_series(mu, z)
        diffs.append(max(abs(a - b), abs(c - d)))
    worst = max(diffs)
    reports.append(VerificationReport("oracle[lommel pre-IBP]", grid, worst <= ORACLE_TOL,
                                      ORACLE_TOL - worst, f"max diff {worst:.2e}"))
    sgrid = [(0.5, math.pi), (0.25, 1.0), (0.0, 2.0), (-0.25, 3.0), (-0.4, 0.7), (0.4, 8.0)]
    diffs = []
    for nu, x in sgrid:
        x = jit(x)
        diffs.append(abs(struve_integral_oracle(nu, x) - eval_struve(nu, x).value))
    worst = max(diffs)
    reports.append(VerificationReport("oracle[struve integral]", sgrid, worst <= ORACLE_TOL,
                                      ORACLE_TOL - worst, f"max diff {worst:.2e}"))
    rgrid = [(nu, x) for nu in (-0.5, -0.25, 0.0, 0.25, 0.5) for x in (0.5, 1.0, 2.0, 5.0)]
    worst = max(struve_recurrence_check(nu, jit(x)) for nu, x in rgrid)
    reports.append(VerificationReport("struve recurrence", rgrid, worst <= RECURRENCE_TOL,
                                      RECURRENCE_TOL - worst, f"max residual {worst:.2e}"))
    lgrid = [0.25, 0.5, 1.0, 1.5]
    for fam in (FamilySpec.lommel(0.5), FamilySpec.lommel(0.25), FamilySpec.struve(0.0),
                FamilySpec.struve(0.5)):
        reports.append(laguerre_check(fam, [jit(z) for z in lgrid]))
    return reports


def _shape_reports(full: bool) -> list:
    grid = list(np.arange(0.0, 0.99 + 1e-12, 0.01))
    mus = [round(0.1 * i, 1) for i in range(1, 10)] if full else [0.25, 0.5]
    nus = [round(-0.5 + 0.1 * i, 1) for i in range(11)] if full else [0.0, 0.5]
    out = [integrand_shape_check(ShapeKind.K_MU, m, grid) for m in mus]
    out += [integrand_shape_check(ShapeKind.L_MU, m, grid) for m in mus]
    out += [integrand_shape_check(ShapeKind.Q_NU, v, grid) for v in nus]
    return out


ALL_MU = (-0.9, -0.75, -0.5, -0.25, -0.1, 0.1, 0.25, 0.5, 0.75, 0.9)
ALL_NU = (-0.5, -0.25, 0.0, 0.25, 0.5)


def validated_families(full: bool = True) -> list:
    if not full:
        return [FamilySpec.lommel(0.5), FamilySpec.lommel(-0.25), FamilySpec.struve(0.5),
                FamilySpec.struve(0.0)]
    return [FamilySpec.lommel(m) for m in ALL_MU] + [FamilySpec.struve(v) for v in ALL_NU]


def _valid_queries(fam: FamilySpec, alpha: float = 0.0) -> list:
    out = []
    for norm in NormKind:
        try:
            out.append(RadiusQuery(fam, norm, alpha))
        except ParameterRangeError:
            continue
    return out


DISK_SAMPLE = (
    ("struve", 0.5, NormKind.SHIFT, 0.0), ("lommel", 0.5, NormKind.POWER, 0.5),
    ("lommel", 0.25, NormKind.SHIFT, 0.3), ("lommel", -0.25, NormKind.POWER, 0.0),
    ("lommel", 0.9, NormKind.SQRT, 0.2), ("lommel", -0.1, NormKind.SHIFT, 0.7),
    ("struve", 0.0, NormKind.POWER, 0.1), ("struve", -0.25, NormKind.SQRT, 0.5),
    ("struve", 0.25, NormKind.SHIFT, 0.9), ("struve", -0.5, NormKind.POWER, 0.4),
    ("lommel", 0.75, NormKind.SQRT, 0.6), ("struve", 0.5, NormKind.SQRT, 0.0),
)


def disk_sample_queries() -> list:
    return [RadiusQuery(FamilySpec(Family(f), p), n, a) for f, p, n, a in DISK_SAMPLE]


def _disk_report(q: RadiusQuery) -> VerificationReport:
    try:
        return disk_certify(solve_radius(q), q)
    except ConvexityRadiiError as exc:
        return VerificationReport(f"disk[{q.family}, {q.norm.value}]", [], False, -math.inf,
                                  f"{type(exc).__name__}: {exc}")


def run_suite(name: str = "fast", seed=None, workers: int = 1) -> list:
    """Run the named suite and return its reports in a fixed order.

    ``fast`` covers the oracles, a few shape, interlacing, dual-path and
    disk checks; ``full`` runs every validated parameter.
    """
    if name not in ("fast", "full"):
        raise ValueError(f"unknown suite {name!r}")
    full = name == "full"
    fams = validated_families(full)
    queries = [q for f in fams for q in _valid_queries(f)]
    disk = disk_sample_queries() if full else disk_sample_queries()[:3]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        inter = list(pool.map(interlacing_check, fams))
        dual = list(pool.map(dual_path_check, queries))
        ladder = (list(pool.map(lambda q: _radius_ladder(q.family, q.norm), queries))
                  if full else [])
        disks = list(pool.map(_disk_report, disk))
    return _oracle_reports(seed) + _shape_reports(full) + inter + dual + ladder + disks
