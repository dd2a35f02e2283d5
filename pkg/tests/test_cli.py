import csv
import io
import json
import math
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from convexity_radii import cli
from convexity_radii.family import FamilySpec, NormKind, RadiusQuery
from convexity_radii.radius import first_derivative_zero, solve_radius


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# --- serialization ------------------------------------------------------------------

@given(st.floats(allow_nan=False, allow_infinity=False))
def test_format_float_round_trip(x):
    assert float(cli.format_float(x)) == x


def test_format_float_special():
    assert cli.format_float(0.0) == "0.0"
    assert cli.format_float(3.0) == "3.0"
    assert cli.format_float(math.inf) == "Infinity"
    assert cli.format_float(-math.inf) == "-Infinity"
    assert cli.format_float(math.nan) == "NaN"
    assert json.loads(cli.dumps({"a": [math.inf]}))["a"][0] == math.inf


def test_dumps_rejects_unknown():
    with pytest.raises(TypeError):
        cli.dumps(object())


def test_radius_json_bit_exact(capsys):
    code, out, _ = run(capsys, "radius", "--family", "lommel", "--mu", "0.25", "--norm", "g",
                       "--alpha", "0.3")
    assert code == 0
    rec = cli.load_record(out)
    res = solve_radius(RadiusQuery(FamilySpec.lommel(0.25), NormKind.SHIFT, 0.3))
    assert rec.schema_version == "1" and rec.command == "radius"
    assert rec.outputs["radius"] == res.radius
    assert rec.outputs["upper_endpoint"] == res.upper_endpoint
    assert rec.outputs["bracket"] == list(res.bracket)
    assert rec.outputs["residual"] == res.residual
    assert rec.outputs["verified"] == "unverified"
    # re-serializing the parsed record reproduces the text
    assert cli.dumps(rec.as_dict()) + "\n" == out


# --- radius ---------------------------------------------------------------------------

def test_radius_certify_example(capsys):
    code, out, _ = run(capsys, "radius", "--family", "struve", "--nu", "0.5", "--norm", "v",
                       "--alpha", "0", "--certify")
    assert code == 0
    rec = cli.load_record(out)
    assert rec.outputs["verified"] == "disk_checked"
    assert rec.checks[0]["passed"] is True
    assert rec.outputs["radius"] < rec.outputs["first_derivative_zero"]


def test_radius_sqrt_reports_bound(capsys):
    code, out, _ = run(capsys, "radius", "--family", "struve", "--nu", "0.5", "--norm", "w",
                       "--alpha", "0")
    rec = cli.load_record(out)
    assert code == 0 and rec.outputs["within_stated_bound"] is False
    assert rec.outputs["upper_endpoint"] == pytest.approx(
        first_derivative_zero(FamilySpec.struve(0.5)) ** 2, rel=1e-15)


def test_radius_csv(capsys):
    code, out, _ = run(capsys, "radius", "--family", "lommel", "--mu", "0.5", "--norm", "f",
                       "--alpha", "0.5", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 1
    res = solve_radius(RadiusQuery(FamilySpec.lommel(0.5), NormKind.POWER, 0.5))
    assert float(rows[0]["radius"]) == res.radius


def test_certification_failure_exit_code(capsys, monkeypatch):
    from convexity_radii import verify
    real = verify.disk_certify

    def inflated(res, q, *a, **k):
        import dataclasses
        return real(dataclasses.replace(res, radius=1.2 * res.radius), q, *a, **k)

    monkeypatch.setattr(verify, "disk_certify", inflated)
    code, out, _ = run(capsys, "radius", "--family", "lommel", "--mu", "0.5", "--norm", "f",
                       "--alpha", "0.5", "--certify")
    assert code == 1
    rec = cli.load_record(out)
    assert rec.outputs["verified"] == "unverified" and rec.checks[0]["passed"] is False


@pytest.mark.parametrize("argv,needle", [
    (["radius", "--family", "lommel", "--mu", "-0.5", "--norm", "f", "--alpha", "0"],
     "normalization f requires mu != -1/2"),
    (["radius", "--family", "struve", "--nu", "0.7", "--norm", "u", "--alpha", "0"], "nu"),
    (["radius", "--family", "lommel", "--mu", "0.5", "--norm", "u", "--alpha", "0"], "norm"),
    (["radius", "--family", "lommel", "--mu", "0.5", "--norm", "f", "--alpha", "1"], "alpha"),
    (["radius", "--family", "lommel", "--norm", "f", "--alpha", "0"], "--mu"),
    (["verify", "--suite", "medium"], "invalid choice"),
    (["zeros", "--family", "struve", "--nu", "0", "--count", "0"], "count"),
    (["bogus"], "invalid choice"),
])
def test_usage_errors_exit_2(capsys, argv, needle):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert needle in err


def test_numeric_failure_exit_1(capsys):
    code, _, err = run(capsys, "radius", "--family", "lommel", "--mu", "-0.75", "--norm", "g",
                       "--alpha", "0")
    assert code == 1 and "BracketFailure" in err


# --- zeros ----------------------------------------------------------------------------

def test_zeros_command(capsys):
    code, out, _ = run(capsys, "zeros", "--family", "struve", "--nu", "0.5", "--count", "3")
    rec = cli.load_record(out)
    assert code == 0
    vals = [z["value"] for z in rec.outputs["zeros"]]
    assert vals == pytest.approx([2 * math.pi * n for n in (1, 2, 3)], abs=1e-9)
    assert all(z["multiplicity"] == 2 for z in rec.outputs["zeros"])


def test_zeros_derivative_csv(capsys):
    code, out, _ = run(capsys, "zeros", "--family", "lommel", "--mu", "0.5", "--deriv", "1",
                       "--count", "2", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [r["index"] for r in rows] == ["1", "2"]
    assert float(rows[0]["value"]) == first_derivative_zero(FamilySpec.lommel(0.5))


# --- sweep ----------------------------------------------------------------------------

def test_sweep_grid(capsys):
    code, out, _ = run(capsys, "sweep", "--family", "lommel", "--param-grid", "0.1:0.9:0.2",
                       "--alpha-grid", "0:0.8:0.2", "--norm", "g")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 25
    assert tuple(rows[0]) == cli.SWEEP_HEADER
    assert all(r["status"] == "ok" for r in rows)
    for p in {r["param"] for r in rows}:
        radii = [float(r["radius"]) for r in rows if r["param"] == p]
        assert all(a > b for a, b in zip(radii, radii[1:]))


def test_sweep_negative_grid_and_struve(capsys):
    code, out, _ = run(capsys, "sweep", "--family", "struve", "--param-grid", "-0.5:0.5:0.25",
                       "--norm", "v")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [float(r["param"]) for r in rows] == [-0.5, -0.25, 0.0, 0.25, 0.5]
    for r in rows:
        assert float(r["radius"]) < float(r["upper_endpoint"])


def test_sweep_empty_grid(capsys):
    code, out, _ = run(capsys, "sweep", "--family", "lommel", "--param-grid", "0.5:0.1:0.1",
                       "--norm", "f")
    assert code == 0 and out == ",".join(cli.SWEEP_HEADER) + "\n"


def test_sweep_rejects_mu_minus_half(capsys):
    code, _, err = run(capsys, "sweep", "--family", "lommel", "--param-grid", "-0.5:0.5:0.25",
                       "--norm", "g")
    assert code == 2 and "mu != -1/2" in err


def test_sweep_failure_rows(capsys):
    code, out, _ = run(capsys, "sweep", "--family", "lommel", "--param-grid", "-0.75:-0.25:0.5",
                       "--norm", "g")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 1
    assert [r["status"] for r in rows] == ["BracketFailure", "ok"]
    assert rows[0]["radius"] == ""


def test_sweep_threads_same_output(capsys, monkeypatch, tmp_path):
    argv = ["sweep", "--family", "struve", "--param-grid", "-0.5:0.5:0.25", "--alpha-grid",
            "0:0.5:0.5", "--norm", "u", "--format", "json"]
    _, serial, _ = run(capsys, *argv)
    monkeypatch.setenv("CONVEXITY_RADII_THREADS", "4")
    assert cli.worker_count() == 4
    target = tmp_path / "out.json"
    assert cli.main(argv + ["--out", str(target)]) == 0
    assert target.read_text() == serial


def test_parse_grid():
    assert cli.parse_grid("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert cli.parse_grid("0.3") == [0.3]
    assert cli.parse_grid("1:0:0.1") == []
    assert cli.parse_grid("0:0.3:0.1") == [0.0, 0.1, 0.2, 0.3]


# --- verify ---------------------------------------------------------------------------

def test_verify_fast(capsys):
    code, out, err = run(capsys, "verify", "--suite", "fast")
    rec = cli.load_record(out)
    assert code == 0
    assert rec.outputs["passed"] == rec.outputs["total"] and rec.outputs["first_failure"] is None
    assert err.count("[PASS]") == rec.outputs["total"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "convexity_radii", "radius", "--family", "struve",
                           "--nu", "0", "--norm", "u", "--alpha", "0.2"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert cli.load_record(proc.stdout).outputs["radius"] > 0
