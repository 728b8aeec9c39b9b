"""Command-line front end: parse spec documents, dispatch, emit JSON reports.

Every command prints one JSON report to stdout.  Reports are deterministic
for identical (argv, spec file, seed): no timestamps, stable key order.
Exit codes: 0 success, 1 usage error, 2 spec/parameter validation error,
3 theorem-hypothesis violation (with a partial report).

Grids and interval tables can additionally be written as CSV; samples go to
a plain one-value-per-line file.  File outputs are written atomically.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from fractions import Fraction
from typing import Optional

import numpy as np

from . import __version__
from .classifier import classify, counterexample_demo
from .convspec import ConvolutionSpec
from .errors import (
    BernconvError,
    HypothesisViolationError,
    SpecValidationError,
)
from .evaluate import cdf, cdf_grid, char_fn, moments, sample
from .image_measure import run_law_suite
from .intervals import Interval
from .oracle import box_count, compare_cdf, truncated_hellinger
from .product_measure import BinaryLaws
from .sequences import ProductVerdict, SeriesVerdict
from .specdoc import parse_document, to_document
from .support import (
    cylinders,
    dimension_estimate,
    nowhere_dense_verdict,
    support_measure,
    unique_representation,
)

SCHEMA_ID = "bernconv-report/1"

AS_PRINTED_WARNING = (
    "the as-printed dimension formula disagrees with box counting on the "
    "middle-thirds benchmark; log-corrected is the default everywhere"
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 with usage text, not argparse's 2
        raise _UsageError(message)


# ---------------------------------------------------------------------------
# JSON rendering
# ---------------------------------------------------------------------------


def _iv(iv: Interval) -> dict:
    return {"lo": iv.lo, "hi": iv.hi}


def _series(v: SeriesVerdict) -> dict:
    out: dict = {"kind": v.kind}
    if v.sum_bound is not None:
        out["sum_bound"] = _iv(v.sum_bound)
    if v.partial_sum is not None:
        ps = v.partial_sum
        out["partial_sum"] = None if ps != ps else ps  # NaN -> null
        out["terms_examined"] = v.terms_examined
    return out


def _product(v: ProductVerdict) -> dict:
    out: dict = {"kind": v.kind}
    if v.lower_bound is not None:
        out["lower_bound"] = v.lower_bound
    if v.partial_product is not None:
        out["partial_product"] = v.partial_product
        out["factors_examined"] = v.factors_examined
    return out


def _verdict_json(v) -> dict:
    if isinstance(v, SeriesVerdict):
        return {"type": "series", **_series(v)}
    return {"type": "product", **_product(v)}


def _report(command: str, result: dict, spec_doc: Optional[dict] = None,
            params: Optional[dict] = None, seed: Optional[int] = None,
            warnings: Optional[list] = None) -> dict:
    return {
        "schema": SCHEMA_ID,
        "tool": {"name": "bernconv", "version": __version__},
        "command": command,
        "spec": spec_doc,
        "params": params or {},
        "seed": seed,
        "result": result,
        "warnings": warnings or [],
    }


def _emit(report: dict) -> None:
    sys.stdout.write(json.dumps(report, indent=2, allow_nan=False) + "\n")


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".bernconv-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_spec(path: str) -> tuple[ConvolutionSpec, dict]:
    try:
        with open(path) as handle:
            doc = json.load(handle)
    except OSError as exc:
        raise SpecValidationError(f"cannot read spec file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecValidationError(f"spec file {path} is not valid JSON: {exc}") from exc
    spec, name, description = parse_document(doc)
    return spec, to_document(spec, name, description)


def _spec_warnings(spec: ConvolutionSpec) -> list[str]:
    digits = spec.digits
    clamped: tuple[int, ...] = ()
    if hasattr(digits, "clamped_indices"):
        clamped = digits.clamped_indices()
    else:
        overrides, form = digits.normal_form()
        if form.kind != "const" and form.c != 0.0:
            clamped = tuple(
                k for k in range(len(overrides) + 1, len(overrides) + 65)
                if not (0.0 <= form.raw(k) <= 1.0)
            )
    if clamped:
        shown = ", ".join(map(str, clamped[:8])) + (", ..." if len(clamped) > 8 else "")
        return [f"digit probabilities clamped to [0,1] at indices {shown}"]
    return []


def _parse_box_size(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecValidationError(f"invalid box size {text!r}") from exc


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _cmd_classify(args) -> dict:
    spec, doc = _load_spec(args.spec)
    verdict = classify(spec, strict_hypothesis=args.strict_hypothesis)
    result = {
        "outcome": verdict.outcome,
        "certificates": [
            {"name": c.name, "verdict": _verdict_json(c.verdict), "certified": c.certified}
            for c in verdict.certificates
        ],
        "hypothesis_report": {
            "gap_ratios_exceed_one": verdict.hypothesis_report.gap_ratios_exceed_one,
            "boundary_case": verdict.hypothesis_report.boundary_case,
            "detail": verdict.hypothesis_report.detail,
        },
    }
    return _report("classify", result, doc, {"strict_hypothesis": args.strict_hypothesis},
                   warnings=_spec_warnings(spec))


def _cmd_support(args) -> dict:
    spec, doc = _load_spec(args.spec)
    approx = cylinders(spec, args.level)
    result = {
        "level": approx.level,
        "interval_count": approx.count,
        "gap_count": approx.gap_count,
        "total_length": _iv(approx.total_length),
        "max_component_length": approx.max_component_length(),
        "exact": approx.exact_total_length is not None,
    }
    if args.csv:
        rows = "\n".join(f"{lo!r},{hi!r}" for lo, hi in approx.intervals.tolist())
        _write_atomic(args.csv, "lo,hi\n" + rows + "\n")
        result["csv_path"] = args.csv
    elif approx.count <= args.max_intervals:
        result["intervals"] = [[lo, hi] for lo, hi in approx.intervals.tolist()]
    else:
        result["intervals_omitted"] = (
            f"{approx.count} intervals exceed --max-intervals={args.max_intervals}; use --csv"
        )
    try:
        verdict = nowhere_dense_verdict(spec)
        result["nowhere_dense"] = {"kind": verdict.kind, "reason": verdict.reason}
    except HypothesisViolationError as exc:
        result["nowhere_dense"] = {"kind": "hypothesis-violation", "reason": str(exc)}
    rep = unique_representation(spec)
    result["unique_representation"] = {"kind": rep.kind, "reason": rep.reason}
    return _report("support", result, doc, {"level": args.level},
                   warnings=_spec_warnings(spec))


def _cmd_measure(args) -> dict:
    spec, doc = _load_spec(args.spec)
    verdict = support_measure(spec)
    result = {
        "kind": verdict.kind,
        "value": None if verdict.value is None else _iv(verdict.value),
        "certificate": _verdict_json(verdict.certificate),
    }
    return _report("measure", result, doc)


def _cmd_dimension(args) -> dict:
    spec, doc = _load_spec(args.spec)
    est = dimension_estimate(spec, args.variant, args.horizon)
    warnings = [AS_PRINTED_WARNING] if args.variant == "as-printed" else []
    result = {
        "variant": est.variant,
        "liminf": est.liminf_value,
        "limsup": est.limsup_value,
        "terms_used": est.terms_used,
    }
    return _report("dimension", result, doc,
                   {"variant": args.variant, "horizon": args.horizon}, warnings=warnings)


def _grid(args) -> np.ndarray:
    if args.points < 2:
        raise SpecValidationError("--points must be at least 2")
    return np.linspace(args.from_, args.to, args.points)


def _cmd_cdf(args) -> dict:
    spec, doc = _load_spec(args.spec)
    params = {"horizon": args.horizon}
    if args.x is not None:
        value = cdf(spec, args.x, horizon=args.horizon)
        result = {"x": args.x, "cdf": _iv(value)}
        params["x"] = args.x
        return _report("cdf", result, doc, params)
    params.update({"from": args.from_, "to": args.to, "points": args.points})
    xs = _grid(args)
    lo, hi = cdf_grid(spec, xs, horizon=args.horizon)
    result = {"points": len(xs)}
    if args.csv:
        rows = "\n".join(
            f"{x!r},{l!r},{h!r}" for x, l, h in zip(xs.tolist(), lo.tolist(), hi.tolist())
        )
        _write_atomic(args.csv, "x,lo,hi\n" + rows + "\n")
        result["csv_path"] = args.csv
    else:
        result["grid"] = [
            {"x": x, "lo": l, "hi": h}
            for x, l, h in zip(xs.tolist(), lo.tolist(), hi.tolist())
        ]
    return _report("cdf", result, doc, params)


def _cmd_charfn(args) -> dict:
    spec, doc = _load_spec(args.spec)
    params = {"tol": args.tol}
    if args.t is not None:
        v = char_fn(spec, args.t, tol=args.tol)
        result = {
            "t": args.t,
            "re": v.value.real,
            "im": v.value.imag,
            "radius": v.radius,
            "terms_used": v.terms_used,
        }
        params["t"] = args.t
        return _report("charfn", result, doc, params)
    params.update({"from": args.from_, "to": args.to, "points": args.points})
    ts = _grid(args)
    values = [char_fn(spec, float(t), tol=args.tol) for t in ts]
    result = {"points": len(ts)}
    if args.csv:
        rows = "\n".join(
            f"{t!r},{v.value.real!r},{v.value.imag!r}" for t, v in zip(ts.tolist(), values)
        )
        _write_atomic(args.csv, "t,re,im\n" + rows + "\n")
        result["csv_path"] = args.csv
    else:
        result["grid"] = [
            {"t": t, "re": v.value.real, "im": v.value.imag, "radius": v.radius}
            for t, v in zip(ts.tolist(), values)
        ]
    return _report("charfn", result, doc, params)


def _cmd_moments(args) -> dict:
    spec, doc = _load_spec(args.spec)
    mean, variance = moments(spec)
    return _report("moments", {"mean": _iv(mean), "variance": _iv(variance)}, doc)


def _cmd_sample(args) -> dict:
    spec, doc = _load_spec(args.spec)
    values = sample(spec, args.count, seed=args.seed, horizon=args.horizon)
    params = {"count": args.count, "horizon": args.horizon}
    result: dict = {
        "count": len(values),
        "truncation_bias_bound": spec.scales.tail_interval(args.horizon).hi,
    }
    if args.out:
        _write_atomic(args.out, "".join(f"{v!r}\n" for v in values))
        result["out_path"] = args.out
    else:
        result["values"] = values
    return _report("sample", result, doc, params, seed=args.seed)


def _cmd_laws(args) -> dict:
    suite = run_law_suite(count=args.count, seed=args.seed)
    result = {
        "instances": suite.instances,
        "hypothesis_counts": suite.hypothesis_counts,
        "violations": suite.violations,
        "violation_count": len(suite.violations),
        "witness_passed": suite.witness_passed,
    }
    return _report("laws", result, params={"count": args.count}, seed=args.seed)


def _cmd_demo(args) -> dict:
    demo = counterexample_demo(args.p, args.scale, level=args.level, cell_width=args.cell_width)
    result = {
        "reference_p": demo.reference_p,
        "scale": demo.scale,
        "level": demo.level,
        "hellinger_factor": demo.hellinger_factor_value,
        "product_criterion": _product(demo.product),
        "upstairs_outcome": demo.dichotomy.outcome,
        "cell_edges": list(demo.cell_edges),
        "biased_cells": list(demo.biased_cells),
        "fair_cells": list(demo.fair_cells),
        "overlap_mass": demo.overlap_mass,
        "note": demo.note,
    }
    params = {"p": args.p, "scale": args.scale, "level": args.level,
              "cell_width": args.cell_width}
    return _report("demo-counterexample", result, params=params)


def _cmd_oracle_box_count(args) -> dict:
    spec, doc = _load_spec(args.spec)
    box = _parse_box_size(args.box_size)
    res = box_count(spec, args.level, box)
    result = {
        "box_size": res.box_size,
        "occupied": res.occupied,
        "dim_estimate": res.dim_estimate,
    }
    return _report("oracle", {"box-count": result}, doc,
                   {"level": args.level, "box_size": args.box_size})


def _cmd_oracle_hellinger(args) -> dict:
    mu_spec, mu_doc = _load_spec(args.mu)
    nu_spec, _ = _load_spec(args.nu)
    mu = BinaryLaws(mu_spec.digits)
    nu = BinaryLaws(nu_spec.digits)
    enumerated = truncated_hellinger(mu, nu, args.level)
    from .product_measure import hellinger_factor

    product = 1.0
    for k in range(1, args.level + 1):
        product *= hellinger_factor(mu.law(k), nu.law(k))
    result = {
        "level": args.level,
        "enumerated": enumerated,
        "factor_product": product,
        "abs_difference": abs(enumerated - product),
    }
    return _report("oracle", {"hellinger": result}, mu_doc, {"level": args.level})


def _cmd_oracle_compare_cdf(args) -> dict:
    spec, doc = _load_spec(args.spec)
    cmp = compare_cdf(spec, args.level, grid=args.grid, horizon=args.horizon)
    result = {
        "level": cmp.level,
        "horizon": cmp.horizon,
        "grid_points": cmp.grid_points,
        "max_violation": cmp.max_violation,
        "worst_x": cmp.worst_x,
    }
    return _report("oracle", {"compare-cdf": result}, doc,
                   {"level": args.level, "grid": args.grid, "horizon": args.horizon})


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(prog="bernconv", description=__doc__, add_help=True)
    sub = parser.add_subparsers(dest="command", required=True)

    def spec_arg(p):
        p.add_argument("spec", help="path to a spec JSON document")

    p = sub.add_parser("classify", help="distribution-type trichotomy with certificates")
    spec_arg(p)
    p.add_argument("--strict-hypothesis", action="store_true",
                   help="error out (exit 3) when the all-gaps hypothesis is uncertified")
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("support", help="cylinder intervals of the support")
    spec_arg(p)
    p.add_argument("--level", type=int, default=8)
    p.add_argument("--csv", help="write intervals as CSV (lo,hi) to this path")
    p.add_argument("--max-intervals", type=int, default=512,
                   help="largest interval list embedded in the JSON report")
    p.set_defaults(fn=_cmd_support)

    p = sub.add_parser("measure", help="Lebesgue measure of the support")
    spec_arg(p)
    p.set_defaults(fn=_cmd_measure)

    p = sub.add_parser("dimension", help="support dimension estimate")
    spec_arg(p)
    p.add_argument("--variant", choices=["log-corrected", "as-printed"],
                   default="log-corrected")
    p.add_argument("--horizon", type=int, default=10_000)
    p.set_defaults(fn=_cmd_dimension)

    p = sub.add_parser("cdf", help="distribution function (point or grid)")
    spec_arg(p)
    p.add_argument("--x", type=float)
    p.add_argument("--from", dest="from_", type=float, default=0.0)
    p.add_argument("--to", type=float, default=1.0)
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--horizon", type=int, default=64)
    p.add_argument("--csv", help="write the grid as CSV (x,lo,hi)")
    p.set_defaults(fn=_cmd_cdf)

    p = sub.add_parser("charfn", help="characteristic function (point or grid)")
    spec_arg(p)
    p.add_argument("--t", type=float)
    p.add_argument("--from", dest="from_", type=float, default=0.0)
    p.add_argument("--to", type=float, default=50.0)
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--csv", help="write the grid as CSV (t,re,im)")
    p.set_defaults(fn=_cmd_charfn)

    p = sub.add_parser("moments", help="mean and variance with tail bounds")
    spec_arg(p)
    p.set_defaults(fn=_cmd_moments)

    p = sub.add_parser("sample", help="seeded truncated samples")
    spec_arg(p)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--horizon", type=int, default=48)
    p.add_argument("--out", help="write one value per line to this path")
    p.set_defaults(fn=_cmd_sample)

    p = sub.add_parser("laws", help="randomized pushforward-law suite")
    p.add_argument("--count", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_laws)

    p = sub.add_parser("demo-counterexample",
                       help="singular product laws whose image laws share mass")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--scale", type=float, required=True)
    p.add_argument("--level", type=int, default=20)
    p.add_argument("--cell-width", type=float, default=0.25)
    p.set_defaults(fn=_cmd_demo)

    p = sub.add_parser("oracle", help="brute-force validators")
    osub = p.add_subparsers(dest="oracle_command", required=True)

    q = osub.add_parser("box-count", help="occupied-box count of the cylinder union")
    spec_arg(q)
    q.add_argument("--level", type=int, required=True)
    q.add_argument("--box-size", required=True,
                   help="box size; rationals like 1/6561 are exact")
    q.set_defaults(fn=_cmd_oracle_box_count)

    q = osub.add_parser("hellinger", help="enumerated truncated affinity vs the factor product")
    q.add_argument("mu", help="spec document providing the first binary law")
    q.add_argument("nu", help="spec document providing the second binary law")
    q.add_argument("--level", type=int, default=12)
    q.set_defaults(fn=_cmd_oracle_hellinger)

    q = osub.add_parser("compare-cdf", help="sandwich check of the digit-walk CDF")
    spec_arg(q)
    q.add_argument("--level", type=int, default=16)
    q.add_argument("--grid", type=int, default=200)
    q.add_argument("--horizon", type=int, default=40)
    q.set_defaults(fn=_cmd_oracle_compare_cdf)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        parser.print_usage(sys.stderr)
        return 1
    try:
        report = args.fn(args)
    except HypothesisViolationError as exc:
        _emit(_report(args.command, {"error": {
            "type": "HypothesisViolationError", "message": str(exc)}}))
        return 3
    except BernconvError as exc:
        _emit({"schema": SCHEMA_ID,
               "tool": {"name": "bernconv", "version": __version__},
               "command": args.command,
               "error": {"type": type(exc).__name__, "message": str(exc)}})
        return 2
    except ValueError as exc:
        _emit({"schema": SCHEMA_ID,
               "tool": {"name": "bernconv", "version": __version__},
               "command": args.command,
               "error": {"type": "ValueError", "message": str(exc)}})
        return 2
    _emit(report)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
