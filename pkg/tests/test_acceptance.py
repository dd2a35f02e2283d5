"""Acceptance criteria 1-8.

Each test evaluates every sub-check of its criterion before asserting, and
records one "[PASS]/[FAIL] criterion N: ..." line that is printed in the
terminal summary.
"""

import math
import subprocess
import sys
import time

import numpy as np

import conftest
from convexity_radii import cli
from convexity_radii.errors import ConvexityRadiiError
from convexity_radii.family import FamilySpec, NormKind, RadiusQuery
from convexity_radii.radius import first_derivative_zero, solve_radius
from convexity_radii.specfun import eval_lommel, eval_phi_k, eval_struve
from convexity_radii.verify import (_oracle_reports, disk_certify, disk_sample_queries,
                                    dual_path_check, interlacing_check, validated_families)
from convexity_radii.zeros import derivative_zeros, function_zeros


def record(n, passed, text):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {n}: {text}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def queries_for(fams, alpha=0.0):
    out = []
    for f in fams:
        for norm in NormKind:
            if f.is_lommel and f.param == -0.5:
                continue  # no normalization is defined there
            out.append(RadiusQuery(f, norm, alpha))
    return out


def bisect(f, lo, hi, n=200):
    flo = f(lo)
    for _ in range(n):
        mid = 0.5 * (lo + hi)
        if (f(mid) > 0) == (flo > 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_criterion_1_struve_anchors():
    t0 = time.perf_counter()
    fz = function_zeros(FamilySpec.struve(0.5), 5)
    e_zero = max(abs(r.value - 2 * math.pi * n) for n, r in enumerate(fz.records, start=1))
    root = bisect(lambda z: math.tan(z / 2) - 2 * z, 2.5, 3.0)
    e_deriv = abs(derivative_zeros(FamilySpec.struve(0.5), 1, fz).records[0].value - root)
    e_closed = 0.0
    for x in np.linspace(0.1, 20.0, 400):
        exact = math.sqrt(2.0 / (math.pi * x)) * 2.0 * math.sin(0.5 * x) ** 2
        e_closed = max(e_closed, abs(eval_struve(0.5, x).value / exact - 1.0))
    dt = time.perf_counter() - t0
    ok = e_zero <= 1e-9 and e_deriv <= 1e-9 and e_closed <= 1e-12 and dt < 2.0
    assert record(1, ok, f"zeros err {e_zero:.1e}, h'_1 err {e_deriv:.1e}, "
                         f"closed form rel err {e_closed:.1e}, {dt:.2f}s")


def test_criterion_2_interlacing():
    t0 = time.perf_counter()
    mus = (-0.9, -0.75, -0.5, -0.25, -0.1, 0.1, 0.25, 0.5, 0.75, 0.9)
    fams = [FamilySpec.lommel(m) for m in mus] + [FamilySpec.struve(v) for v in
                                                  (-0.5, -0.25, 0.0, 0.25, 0.5)]
    reports = [interlacing_check(f, 10) for f in fams]
    dt = time.perf_counter() - t0
    bad = [str(f) for f, r in zip(fams, reports) if not r.passed]
    worst = min(r.worst_margin for r in reports if r.passed)
    ok = not bad and dt < 10.0
    assert record(2, ok, f"{len(fams) - len(bad)}/{len(fams)} interlace (min margin among "
                         f"passing {worst:.2e}); failing: {', '.join(bad) or 'none'}; {dt:.2f}s")


def test_criterion_3_phi_identities():
    t0 = time.perf_counter()
    rec, rep = 0.0, 0.0
    for mu in (0.25, 0.5, 0.75):
        for k in (0, 1):
            c = mu - k + 1.0
            for z in np.arange(0.0, 10.0 + 1e-9, 0.5):
                p = eval_phi_k(mu, k, z).value
                res = abs(c * eval_phi_k(mu, k + 1, z).value - c * p
                          - z * eval_phi_k(mu, k, z, deriv=1).value)
                rec = max(rec, res / (1.0 + abs(p)))
                if z > 0:
                    lhs = math.sqrt(z) * eval_lommel(mu - k, z).value
                    rhs = z ** (mu - k + 1.0) * p / ((mu - k) * (mu - k + 1.0))
                    rep = max(rep, abs(lhs - rhs) / max(abs(lhs), abs(rhs)))
    dt = time.perf_counter() - t0
    ok = rec <= 1e-12 and rep <= 1e-12 and dt < 2.0
    assert record(3, ok, f"recurrence {rec:.1e}, representation {rep:.1e}, {dt:.2f}s")


def test_criterion_4_dual_path():
    t0 = time.perf_counter()
    qs = queries_for(validated_families(True))
    reports = [dual_path_check(q, 40, 200) for q in qs]
    dt = time.perf_counter() - t0
    bad = sorted({str(q.family) for q, r in zip(qs, reports) if not r.passed})
    worst = max(1e-6 - r.worst_margin for r in reports if r.passed)
    ok = not bad and dt < 20.0
    assert record(4, ok, f"{sum(r.passed for r in reports)}/{len(qs)} pairs agree "
                         f"(max diff {worst:.1e}); failing: {', '.join(bad) or 'none'}; {dt:.2f}s")


def radius_ladder(fam, norm):
    res = [solve_radius(RadiusQuery(fam, norm, i / 10)) for i in range(10)]
    xp = first_derivative_zero(fam)
    x1 = function_zeros(fam, 1).records[0].value
    resid = max(r.residual for r in res)
    dec = all(a.radius > b.radius for a, b in zip(res, res[1:]))
    if norm is NormKind.SQRT:
        # the Sqrt kind is bounded by x'_1^2; whether radius < x'_1 is reported
        order = all(r.radius < r.upper_endpoint for r in res) and xp < x1
        caveat = sum(1 for r in res if not r.within_stated_bound)
    else:
        order = all(r.radius < xp for r in res) and xp < x1
        caveat = 0
    return resid <= 1e-10 and dec and order, resid, caveat


def test_criterion_5_radius_solutions():
    t0 = time.perf_counter()
    bad, worst, caveats, n = [], 0.0, 0, 0
    for q in queries_for(validated_families(True)):
        n += 1
        try:
            ok, resid, cav = radius_ladder(q.family, q.norm)
        except ConvexityRadiiError as exc:
            bad.append(f"{q.family}/{q.norm.value} ({type(exc).__name__})")
            continue
        worst, caveats = max(worst, resid), caveats + cav
        if not ok:
            bad.append(f"{q.family}/{q.norm.value}")
    dt = time.perf_counter() - t0
    ok = not bad and dt < 30.0
    assert record(5, ok, f"{n - len(bad)}/{n} ladders ok (max residual {worst:.1e}; "
                         f"{caveats} Sqrt radii beyond x'_1); failing: "
                         f"{', '.join(bad) or 'none'}; {dt:.2f}s")


def test_criterion_6_disk_certification():
    t0 = time.perf_counter()
    qs = disk_sample_queries()
    reports = [disk_certify(solve_radius(q), q, theta_points=721, shrink=0.99) for q in qs]
    dt = time.perf_counter() - t0
    worst = min(r.worst_margin for r in reports)
    ok = len(qs) == 12 and all(r.passed for r in reports) and dt < 30.0
    assert record(6, ok, f"{sum(r.passed for r in reports)}/{len(qs)} certified "
                         f"(min Re - alpha {worst:.2e}); {dt:.2f}s")


def test_criterion_7_oracles():
    t0 = time.perf_counter()
    reports = _oracle_reports()
    dt = time.perf_counter() - t0
    bad = [r.check_name for r in reports if not r.passed]
    ok = not bad and dt < 15.0
    summary = "; ".join(f"{r.check_name} {r.details}" for r in reports[:3])
    assert record(7, ok, f"{len(reports) - len(bad)}/{len(reports)} pass ({summary}); "
                         f"failing: {', '.join(bad) or 'none'}; {dt:.2f}s")


def test_criterion_8_cli_contract(capsys):
    t0 = time.perf_counter()
    notes = []
    # bit-exact JSON round trip
    code = cli.main(["radius", "--family", "lommel", "--mu", "0.75", "--norm", "h", "--alpha",
                     "0.4"])
    out = capsys.readouterr().out
    rec = cli.load_record(out)
    res = solve_radius(RadiusQuery(FamilySpec.lommel(0.75), NormKind.SQRT, 0.4))
    round_trip = (code == 0 and rec.outputs["radius"] == res.radius
                  and rec.outputs["bracket"] == list(res.bracket)
                  and cli.dumps(rec.as_dict()) + "\n" == out)
    notes.append(f"round trip {'ok' if round_trip else 'broken'}")
    # documented exit codes
    codes = (
        cli.main(["zeros", "--family", "struve", "--nu", "0.5", "--count", "2"]),
        cli.main(["radius", "--family", "lommel", "--mu", "-0.75", "--norm", "g", "--alpha", "0"]),
        cli.main(["radius", "--family", "lommel", "--mu", "-0.5", "--norm", "f", "--alpha", "0"]),
    )
    capsys.readouterr()
    exit_ok = codes == (0, 1, 2)
    notes.append(f"exit codes {codes}")
    # full verification suite end to end
    ts = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "convexity_radii", "verify", "--suite", "full"],
                          capture_output=True, text=True, timeout=600)
    t_full = time.perf_counter() - ts
    full = cli.load_record(proc.stdout)
    full_ok = proc.returncode == 0 and t_full < 120.0
    notes.append(f"verify full {full.outputs['passed']}/{full.outputs['total']} green "
                 f"(first failure {full.outputs['first_failure']}) in {t_full:.1f}s")
    dt = time.perf_counter() - t0
    ok = round_trip and exit_ok and full_ok
    assert record(8, ok, "; ".join(notes) + f"; {dt:.2f}s")
