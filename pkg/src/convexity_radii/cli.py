"""Command-line front end: ``convexity-radii radius|zeros|sweep|verify``.

Exit codes: 0 success, 1 numerical failure, 2 usage or parameter error.
JSON is written with every float at 17 significant digits so that parsing
it back gives bit-identical values.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import ConvexityRadiiError, ParameterRangeError
from .family import Family, FamilySpec, RadiusQuery, norm_from_letter
from .radius import first_derivative_zero, solve_radius

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2
SWEEP_HEADER = ("family", "param", "norm", "alpha", "radius", "upper_endpoint", "residual", "status")


@dataclass
class OutputRecord:
    command: str
    inputs: dict
    outputs: dict
    checks: list = field(default_factory=list)
    schema_version: str = SCHEMA_VERSION

    def as_dict(self) -> dict:
        return {"schema_version": self.schema_version, "command": self.command,
                "inputs": self.inputs, "outputs": self.outputs, "checks": self.checks}


# ---------------------------------------------------------------------------
# serialization


def format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    text = "%.17g" % x
    # keep integral values recognisably float after a round trip
    return text if any(c in text for c in ".en") else text + ".0"


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats at 17 significant digits (non-finite as Infinity/NaN)."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return dumps(obj.item(), indent, _level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def load_record(text: str) -> OutputRecord:
    d = json.loads(text)
    return OutputRecord(d["command"], d["inputs"], d["outputs"], d.get("checks", []),
                        d["schema_version"])


def _report_summary(rep) -> dict:
    return {"check_name": rep.check_name, "passed": bool(rep.passed),
            "worst_margin": float(rep.worst_margin), "details": rep.details}


# ---------------------------------------------------------------------------
# argument handling


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def parse_grid(text: str) -> list:
    """Inclusive grid "lo:hi:step" (or a single number); values rounded to 12 digits."""
    parts = text.split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None
    if len(nums) == 1:
        return [nums[0]]
    if len(nums) != 3:
        raise argparse.ArgumentTypeError(f"grid must be lo:hi:step, got {text!r}")
    lo, hi, step = nums
    if not step > 0:
        raise argparse.ArgumentTypeError("grid step must be positive")
    if hi < lo:
        return []
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(n)]


def _family_args(p, required=True):
    p.add_argument("--family", choices=[f.value for f in Family], required=required)
    p.add_argument("--mu", type=float, help="Lommel parameter")
    p.add_argument("--nu", type=float, help="Struve parameter")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="convexity-radii",
                     description="Radii of convexity of normalized Lommel and Struve functions.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("radius", help="solve one radius equation")
    _family_args(p)
    p.add_argument("--norm", required=True, help="f, g, h (Lommel) or u, v, w (Struve)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--certify", action="store_true", help="run the disk certification")
    p.add_argument("--theta-points", type=int, default=721)
    p.add_argument("--shrink", type=float, default=0.99)
    p.add_argument("--format", choices=["json", "csv"], default="json")

    p = sub.add_parser("zeros", help="zero table of the function or its derivative")
    _family_args(p)
    p.add_argument("--deriv", type=int, choices=[0, 1], default=0)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--format", choices=["json", "csv"], default="json")

    p = sub.add_parser("sweep", help="radii over a parameter and alpha grid")
    p.add_argument("--family", choices=[f.value for f in Family], required=True)
    p.add_argument("--param-grid", type=parse_grid, required=True)
    p.add_argument("--alpha-grid", type=parse_grid, default=[0.0])
    p.add_argument("--norm", required=True)
    p.add_argument("--out", help="write to FILE instead of stdout")
    p.add_argument("--format", choices=["json", "csv"], default="csv")

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=["fast", "full"], default="fast")
    p.add_argument("--seed", type=int, default=None, help="jitter the oracle grids")
    p.add_argument("--format", choices=["json"], default="json")
    return parser


def _family_from(args, parser) -> FamilySpec:
    fam = Family(args.family)
    value, name, other = ((args.mu, "--mu", args.nu) if fam is Family.LOMMEL
                          else (args.nu, "--nu", args.mu))
    if value is None:
        parser.error(f"{name} is required for --family {fam.value}")
    if other is not None:
        parser.error(f"{'--nu' if name == '--mu' else '--mu'} does not apply to --family {fam.value}")
    try:
        return FamilySpec(fam, value)
    except ParameterRangeError as exc:
        parser.error(str(exc))


def _query_from(family: FamilySpec, letter: str, alpha: float, parser) -> RadiusQuery:
    try:
        return RadiusQuery(family, norm_from_letter(family.family, letter), alpha)
    except ParameterRangeError as exc:
        parser.error(str(exc))


def worker_count() -> int:
    raw = os.environ.get("CONVEXITY_RADII_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


# ---------------------------------------------------------------------------
# commands


def _result_outputs(res) -> dict:
    return {"radius": res.radius, "upper_endpoint": res.upper_endpoint,
            "bracket": [res.bracket[0], res.bracket[1]], "residual": res.residual,
            "iterations": res.iterations, "verified": res.verified.value,
            "within_stated_bound": res.within_stated_bound}


def cmd_radius(args, parser):
    from .verify import certified, disk_certify

    family = _family_from(args, parser)
    query = _query_from(family, args.norm, args.alpha, parser)
    inputs = {"family": family.family.value, "param": family.param, "norm": args.norm,
              "alpha": query.alpha, "tol": args.tol, "certify": bool(args.certify)}
    res = solve_radius(query, tol=args.tol)
    outputs = _result_outputs(res)
    outputs["first_derivative_zero"] = first_derivative_zero(family)
    checks, code = [], EXIT_OK
    if args.certify:
        rep = disk_certify(res, query, args.theta_points, args.shrink)
        res = certified(res, rep)
        outputs["verified"] = res.verified.value
        checks.append(_report_summary(rep))
        if not rep.passed:
            code = EXIT_NUMERIC
    return OutputRecord("radius", inputs, outputs, checks), code


def cmd_zeros(args, parser):
    from .zeros import derivative_zeros, function_zeros

    family = _family_from(args, parser)
    if args.count < 1:
        parser.error("--count must be >= 1")
    base = function_zeros(family, args.count)
    table = base if args.deriv == 0 else derivative_zeros(family, args.count, base)
    rows = [{"index": r.index, "value": r.value, "bracket": [r.bracket_lo, r.bracket_hi],
             "residual": r.residual, "multiplicity": r.multiplicity} for r in table.records]
    inputs = {"family": family.family.value, "param": family.param, "deriv": args.deriv,
              "count": args.count}
    return OutputRecord("zeros", inputs, {"zeros": rows}), EXIT_OK


def _sweep_row(query: RadiusQuery, letter: str) -> dict:
    row = {"family": query.family.family.value, "param": query.family.param, "norm": letter,
           "alpha": query.alpha, "radius": None, "upper_endpoint": None, "residual": None,
           "status": "ok"}
    try:
        res = solve_radius(query)
    except ConvexityRadiiError as exc:
        row["status"] = type(exc).__name__
        return row
    row.update(radius=res.radius, upper_endpoint=res.upper_endpoint, residual=res.residual)
    return row


def cmd_sweep(args, parser):
    fam = Family(args.family)
    queries = []
    for p in args.param_grid:
        try:
            spec = FamilySpec(fam, p)
        except ParameterRangeError as exc:
            parser.error(f"param grid value {p:g}: {exc}")
        for a in args.alpha_grid:
            queries.append(_query_from(spec, args.norm, a, parser))
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        rows = list(pool.map(lambda q: _sweep_row(q, args.norm), queries))
    rows.sort(key=lambda r: (r["param"], r["alpha"]))
    inputs = {"family": fam.value, "param_grid": args.param_grid,
              "alpha_grid": args.alpha_grid, "norm": args.norm}
    code = EXIT_OK if all(r["status"] == "ok" for r in rows) else EXIT_NUMERIC
    return OutputRecord("sweep", inputs, {"rows": rows}), code


def cmd_verify(args, parser):
    from .verify import run_suite

    reports = run_suite(args.suite, seed=args.seed, workers=worker_count())
    for rep in reports:
        print(rep.line(), file=sys.stderr)
    checks = [_report_summary(r) for r in reports]
    failed = [r for r in reports if not r.passed]
    outputs = {"total": len(reports), "passed": len(reports) - len(failed),
               "first_failure": failed[0].check_name if failed else None}
    if failed:
        print(f"first failing check: {failed[0].check_name}", file=sys.stderr)
    inputs = {"suite": args.suite, "seed": args.seed}
    return OutputRecord("verify", inputs, outputs, checks), EXIT_NUMERIC if failed else EXIT_OK


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return format_float(v)
    return str(v)


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in rows:
        w.writerow([_csv_cell(r[k]) for k in SWEEP_HEADER])
    return buf.getvalue()


def _record_csv(rec: OutputRecord) -> str:
    if rec.command == "sweep":
        return sweep_csv(rec.outputs["rows"])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if rec.command == "zeros":
        w.writerow(("index", "value", "bracket_lo", "bracket_hi", "residual", "multiplicity"))
        for z in rec.outputs["zeros"]:
            w.writerow([z["index"], format_float(z["value"]), format_float(z["bracket"][0]),
                        format_float(z["bracket"][1]), format_float(z["residual"]),
                        z["multiplicity"]])
        return buf.getvalue()
    flat = {**rec.inputs, **{k: v for k, v in rec.outputs.items() if k != "bracket"}}
    w.writerow(list(flat))
    w.writerow([_csv_cell(v) for v in flat.values()])
    return buf.getvalue()


COMMANDS = {"radius": cmd_radius, "zeros": cmd_zeros, "sweep": cmd_sweep, "verify": cmd_verify}


_GRID_FLAGS = ("--param-grid", "--alpha-grid")


def _attach_grid_values(argv):
    """Join "--param-grid -0.5:0.5:0.25" so argparse does not read a flag."""
    out, it = [], iter(argv)
    for a in it:
        if a in _GRID_FLAGS:
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _attach_grid_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        rec, code = COMMANDS[args.command](args, parser)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    except ParameterRangeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvexityRadiiError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = _record_csv(rec) if args.format == "csv" else dumps(rec.as_dict()) + "\n"
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
