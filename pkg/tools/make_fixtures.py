"""Regenerate tests/fixtures/reference_values.json with mpmath at 60 digits.

Nothing from the package is imported: every value here comes from mpmath's
hypergeometric, Lommel and Struve functions.  Run from the repo root:

    python3 tools/make_fixtures.py
"""

from __future__ import annotations

import json
import time
from pathlib import Path

import mpmath as mp

mp.mp.dps = 60
HALF = mp.mpf(1) / 2
OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "reference_values.json"

MUS = ["-0.9", "-0.75", "-0.5", "-0.25", "-0.1", "0.1", "0.25", "0.5", "0.75", "0.9"]
NUS = ["-0.5", "-0.25", "0", "0.25", "0.5"]


def family_data(kind, p):
    """(a, b, e0, prefactor K) of F = K z^e0 1F2(1; a, b; -z^2/4)."""
    p = mp.mpf(p)
    if kind == "lommel":
        return (p + 2) / 2, (p + 3) / 2, p + HALF, 1 / (p * (p + 1))
    return mp.mpf(3) / 2, p + mp.mpf(3) / 2, p + 1, 1 / (2 ** p * mp.sqrt(mp.pi) * mp.gamma(p + mp.mpf(3) / 2))


def even_parts(a, b, z):
    """A(z), A'(z), A''(z) for A(z) = 1F2(1; a, b; -z^2/4)."""
    w = -z * z / 4
    g1 = mp.hyp1f2(1, a, b, w)
    g2 = mp.hyp1f2(2, a + 1, b + 1, w)
    g3 = mp.hyp1f2(3, a + 2, b + 2, w)
    c = 1 / (2 * a * b)
    d1 = -z * c * g2
    d2 = -c * g2 + z * z * c * 2 / (2 * (a + 1) * (b + 1)) * g3
    return g1, d1, d2


def function_parts(kind, p, z):
    """F, F', F'' of s_{mu-1/2,1/2} or H_nu at real z > 0."""
    a, b, e0, k = family_data(kind, p)
    A, A1, A2 = even_parts(a, b, z)
    zp = z ** e0
    f = k * zp * A
    f1 = k * (e0 * z ** (e0 - 1) * A + zp * A1)
    f2 = k * (e0 * (e0 - 1) * z ** (e0 - 2) * A + 2 * e0 * z ** (e0 - 1) * A1 + zp * A2)
    return f, f1, f2


def even_B(kind, p, z):
    """z^(1-e0) F'(z) / K, whose positive zeros are those of F'."""
    a, b, e0, _ = family_data(kind, p)
    A, A1, _ = even_parts(a, b, z)
    return e0 * A + z * A1


def even_A(kind, p, z):
    a, b, _, _ = family_data(kind, p)
    return mp.hyp1f2(1, a, b, -z * z / 4)


def curvature(kind, p, norm, r):
    """1 + r F''/F' of the Power, Shift and Sqrt normalizations."""
    e0 = family_data(kind, p)[2]
    if norm == "sqrt":
        z = mp.sqrt(r)
        f, f1, f2 = function_parts(kind, p, z)
        return 1 + (1 - e0 + z * f2 / f1) / 2
    f, f1, f2 = function_parts(kind, p, r)
    if norm == "power":
        return 1 + r * f2 / f1 + (1 / e0 - 1) * r * f1 / f
    return 2 - e0 + r * f2 / f1


def bisect(fn, lo, hi, steps=135):
    flo = fn(lo)
    for _ in range(steps):
        mid = (lo + hi) / 2
        fm = fn(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2


def sign_change_roots(fn, hi, step=mp.mpf("0.05"), count=10):
    roots = []
    x0, f0 = mp.mpf(step) / 4, fn(mp.mpf(step) / 4)
    x = x0
    while x < hi and len(roots) < count:
        x1 = x + step
        f1 = fn(x1)
        if f0 == 0:
            roots.append(x)
        elif f0 * f1 < 0:
            roots.append(bisect(fn, x, x1))
        x, f0 = x1, f1
    return roots


def s(x):
    return mp.nstr(x, 40)


def main():
    t0 = time.time()
    out = {"generator": "tools/make_fixtures.py", "dps": mp.mp.dps}

    # definitions check: 1F2 forms vs the library functions of mpmath
    checks = []
    for mu, z in [("0.5", "1"), ("0.25", "3"), ("-0.75", "2")]:
        f = function_parts("lommel", mu, mp.mpf(z))[0]
        ref = mp.lommels1(mp.mpf(mu) - HALF, HALF, mp.mpf(z))
        checks.append(abs(f / ref - 1))
    for nu, z in [("0.25", "1"), ("-0.5", "4"), ("0", "7")]:
        f = function_parts("struve", nu, mp.mpf(z))[0]
        ref = mp.struveh(mp.mpf(nu), mp.mpf(z))
        checks.append(abs(f / ref - 1))
    assert max(checks) < mp.mpf("1e-45"), checks

    out["phi"] = []
    for mu, k, z in [("0.5", 0, "1"), ("0.5", 0, "2"), ("0.5", 0, "10"), ("0.25", 1, "3"),
                     ("0.75", 0, "7.5"), ("0.9", 1, "5"), ("-0.25", 0, "4"), ("0.1", 0, "20"),
                     ("0.5", 1, "0.5")]:
        m = mp.mpf(mu)
        a, b = (m - k + 2) / 2, (m - k + 3) / 2
        v = mp.hyp1f2(1, a, b, -mp.mpf(z) ** 2 / 4)
        c = 1 / (2 * a * b)
        d = -mp.mpf(z) * c * mp.hyp1f2(2, a + 1, b + 1, -mp.mpf(z) ** 2 / 4)
        out["phi"].append({"mu": float(m), "k": k, "z": float(mp.mpf(z)), "value": float(v),
                           "deriv": float(d), "value_str": s(v)})

    out["lommel"] = []
    for mu in ["0.5", "0.25", "-0.25", "0.9", "-0.75", "-0.5", "0.1"]:
        for z in ["0.5", "1", "2", "5", "12"]:
            f, f1, f2 = function_parts("lommel", mu, mp.mpf(z))
            out["lommel"].append({"mu": float(mp.mpf(mu)), "z": float(mp.mpf(z)),
                                  "values": [float(f), float(f1), float(f2)]})

    out["struve"] = []
    for nu in ["-0.5", "-0.25", "0", "0.25", "0.3", "0.5"]:
        for z in ["0.5", "1", "2", "5", "12"]:
            f, f1, f2 = function_parts("struve", nu, mp.mpf(z))
            out["struve"].append({"nu": float(mp.mpf(nu)), "z": float(mp.mpf(z)),
                                  "values": [float(f), float(f1), float(f2)]})

    out["zeros"] = []
    fams = [("lommel", m) for m in MUS] + [("struve", n) for n in NUS]
    for kind, p in fams:
        hi = 12 * mp.pi + 10
        if kind == "struve" and p == "0.5":
            fz = [2 * mp.pi * n for n in range(1, 11)]  # double zeros of 1 - cos z
        else:
            fz = sign_change_roots(lambda z: even_A(kind, p, z), hi)
        dz = sign_change_roots(lambda z: even_B(kind, p, z), hi, count=12)
        out["zeros"].append({"family": kind, "param": float(mp.mpf(p)),
                             "function": [float(x) for x in fz],
                             "derivative": [float(x) for x in dz]})
        print(f"zeros {kind} {p}: {time.time() - t0:.1f}s", flush=True)

    out["radii"] = []
    for kind, p in fams:
        if kind == "lommel" and mp.mpf(p) <= -HALF:
            continue  # no admissible radius problem (see the ledger)
        zrow = next(z for z in out["zeros"] if z["family"] == kind and z["param"] == float(mp.mpf(p)))
        x1 = mp.findroot(lambda z: even_B(kind, p, z), mp.mpf(zrow["derivative"][0]))
        for norm in ("power", "shift", "sqrt"):
            up = x1 * x1 if norm == "sqrt" else x1
            for alpha in ("0", "0.5", "0.9"):
                g = lambda r: curvature(kind, p, norm, r) - mp.mpf(alpha)
                lo, hi = mp.mpf("1e-8"), up * (1 - mp.mpf("1e-12"))
                assert g(lo) > 0 > g(hi)
                root = bisect(g, lo, hi)
                out["radii"].append({"family": kind, "param": float(mp.mpf(p)), "norm": norm,
                                     "alpha": float(mp.mpf(alpha)), "radius": float(root),
                                     "upper_endpoint": float(up), "radius_str": s(root)})
        print(f"radii {kind} {p}: {time.time() - t0:.1f}s", flush=True)

    # curvature samples for the closed-form Struve nu = 1/2 and generic families
    out["curvature"] = []
    for kind, p, norm, r in [("struve", "0.5", "shift", "1"), ("lommel", "0.5", "power", "0.5"),
                             ("lommel", "-0.25", "shift", "0.3"), ("struve", "0", "sqrt", "2"),
                             ("lommel", "0.9", "sqrt", "4")]:
        out["curvature"].append({"family": kind, "param": float(mp.mpf(p)), "norm": norm,
                                 "r": float(mp.mpf(r)),
                                 "value": float(curvature(kind, p, norm, mp.mpf(r)))})

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(out, indent=1) + "\n")
    print(f"wrote {OUT} in {time.time() - t0:.1f}s")


if __name__ == "__main__":
    main()
