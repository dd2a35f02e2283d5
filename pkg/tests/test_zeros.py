import math

import numpy as np
import pytest

from convexity_radii.errors import BracketFailure
from convexity_radii.family import Family, FamilySpec
from convexity_radii.specfun import family_series, sum_even_series
from convexity_radii.zeros import (NormalizedFunction, derivative_zeros, derivative_zeros_direct,
                                   function_zeros, imaginary_axis_zero, interlacing_certificate)

VALID = ([FamilySpec.lommel(m) for m in (-0.25, -0.1, 0.1, 0.25, 0.5, 0.75, 0.9)]
         + [FamilySpec.struve(v) for v in (-0.5, -0.25, 0.0, 0.25, 0.5)])


def bisect(f, lo, hi, n=200):
    flo = f(lo)
    for _ in range(n):
        mid = 0.5 * (lo + hi)
        if (f(mid) > 0) == (flo > 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def fixture_row(ref, fam):
    return next(z for z in ref["zeros"]
                if z["family"] == fam.family.value and z["param"] == fam.param)


# --- closed-form anchors --------------------------------------------------------

def test_struve_half_double_zeros():
    t = function_zeros(FamilySpec.struve(0.5), 5)
    for n, r in enumerate(t.records, start=1):
        assert abs(r.value - 2 * math.pi * n) <= 1e-9
        assert r.multiplicity == 2


def test_struve_half_derivative_zero():
    root = bisect(lambda z: math.tan(z / 2) - 2 * z, 2.5, 3.0)
    d = derivative_zeros(FamilySpec.struve(0.5), 3)
    assert abs(d.records[0].value - root) <= 1e-9
    # the double zeros of H_{1/2} are simple zeros of the derivative
    assert [r.value for r in d.inherited] == pytest.approx([2 * math.pi * n for n in (1, 2, 3)],
                                                         abs=1e-9)


def test_struve_minus_half():
    assert function_zeros(FamilySpec.struve(-0.5), 1).records[0].value == pytest.approx(math.pi,
                                                                                          abs=1e-10)
    root = bisect(lambda z: math.tan(z) - 2 * z, 1.0, 1.5)
    assert derivative_zeros(FamilySpec.struve(-0.5), 1).records[0].value == pytest.approx(root,
                                                                                            abs=1e-10)


def test_lommel_first_zero_in_window():
    x = function_zeros(FamilySpec.lommel(0.5), 1).records[0].value
    assert 0 < x < 20
    assert derivative_zeros(FamilySpec.lommel(0.5), 1).records[0].value < x


# --- fixtures -----------------------------------------------------------------------

@pytest.mark.parametrize("fam", VALID, ids=str)
def test_zeros_against_fixture(ref, fam):
    row = fixture_row(ref, fam)
    fz = function_zeros(fam, 10)
    assert np.max(np.abs(fz.values() - np.array(row["function"][:10]))) <= 1e-9
    d = derivative_zeros(fam, 10, fz)
    x, _ = d.spectral_nodes()
    k = min(len(x), len(row["derivative"]))
    assert np.max(np.abs(x[:k] - np.array(row["derivative"][:k]))) <= 1e-9


@pytest.mark.parametrize("fam", VALID, ids=str)
def test_zero_records_well_formed(fam):
    t = function_zeros(fam, 10)
    vals = t.values()
    assert np.all(np.diff(vals) > 0)
    assert [r.index for r in t.records] == list(range(1, 11))
    nf = NormalizedFunction(fam)
    for r in t.records:
        assert r.bracket_lo <= r.value <= r.bracket_hi
        if r.multiplicity == 1:
            a = nf.value(np.array([r.bracket_lo, r.bracket_hi]), 0)
            assert np.sign(a[0]) != np.sign(a[1]) or 0.0 in a


# --- interlacing ------------------------------------------------------------------------

@pytest.mark.parametrize("fam", VALID, ids=str)
def test_interlacing(fam):
    fz = function_zeros(fam, 10)
    cert = interlacing_certificate(fz, derivative_zeros(fam, 10, fz))
    assert cert.passed and cert.worst_margin > 1e-8


def test_interlacing_equal_tables_fail():
    fz = function_zeros(FamilySpec.lommel(0.9), 5)
    cert = interlacing_certificate(fz, fz)
    assert not cert.passed
    assert cert.worst_margin <= 0.0


@pytest.mark.parametrize("mu", [-0.75, -0.9])
def test_interlacing_breaks_below_minus_half(mu):
    # the derivative has no zero in (0, x_1) there, only imaginary ones
    fam = FamilySpec.lommel(mu)
    with pytest.raises(BracketFailure):
        derivative_zeros(fam, 10)
    y = imaginary_axis_zero(fam)
    assert 0.5 < y < 1.0
    direct = derivative_zeros_direct(fam, 2).values()
    assert direct[0] > function_zeros(fam, 1).records[0].value


# --- simplicity ------------------------------------------------------------------------

@pytest.mark.parametrize("fam", VALID, ids=str)
def test_zero_simplicity(fam):
    nf = NormalizedFunction(fam)
    grid = np.linspace(0.05, 40.0, 4000)
    scale_vals = np.abs(nf.value(grid, 0))
    for r in function_zeros(fam, 10).records:
        if r.multiplicity > 1:
            continue
        scale = np.max(scale_vals[np.abs(grid - r.value) <= math.pi])
        _, d = nf.function(np.array([r.value]), 0)
        assert abs(d[0]) > 1e-8 * scale


# --- Laguerre-type inequality -------------------------------------------------------------

@pytest.mark.parametrize("fam", [FamilySpec.lommel(m) for m in (0.1, 0.25, 0.5, 0.75, 0.9)]
                         + [FamilySpec.struve(v) for v in (-0.5, -0.25, 0.0, 0.25, 0.5)], ids=str)
def test_laguerre_positive_before_first_zero(fam):
    x1 = function_zeros(fam, 1).records[0].value
    z = np.linspace(1e-3, x1 - 1e-3, 200)
    s = sum_even_series(family_series(fam), z * z, ("A", "B", "C"))
    A, B, C = (np.asarray(s.values[k], dtype=float) for k in "ABC")
    assert np.all(B * B - A * C - fam.leading_exponent * A * A > 0)


# --- Hadamard product -----------------------------------------------------------------------

def hadamard_errors(fam, counts=(25, 50, 100, 200)):
    d = derivative_zeros(fam, 200, function_zeros(fam, 200))
    x, m = d.spectral_nodes()
    nodes = np.repeat(x, m.astype(int))
    z = 0.5 * x[0]
    e0 = fam.leading_exponent
    B = float(sum_even_series(family_series(fam), np.array([z * z]), ("B",)).values["B"][0]) / e0
    return [abs(np.prod(1.0 - z * z / nodes[:n] ** 2) / B - 1.0) for n in counts]


@pytest.mark.parametrize("fam", VALID, ids=str)
def test_hadamard_monotone_in_n(fam):
    errs = hadamard_errors(fam)
    assert all(a > b for a, b in zip(errs, errs[1:]))


@pytest.mark.parametrize("fam", VALID, ids=str)
def test_hadamard_partial_product_200(fam):
    # truncation leaves about z^2 / (pi x_200); below 2e-4 only for small x'_1
    assert hadamard_errors(fam)[-1] <= 2e-4
