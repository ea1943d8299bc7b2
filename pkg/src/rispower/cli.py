"""Command-line front end.

Every subcommand writes one JSON report to stdout (or ``--out``); ``scale``
writes CSV unless ``--format json`` is given. Exit codes: 0 success,
1 a validation check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, fixtures
from .calibration import (
    DEFAULT_ABS_TOL,
    DEFAULT_REL_TOL,
    UNIT_SEMANTICS,
    calibrate_spec,
    check_polarization_ratio,
    fit_linear,
    predict_residuals,
)
from .formats import ParseError, format_coding, parse_coding, parse_dataset, parse_spec, read_text
from .model import (
    CodingState,
    DeviceClass,
    drive_circuit_count,
    on_bit_count,
    total_power,
)
from .optimizer import optimize_global_offset
from .scaling import DEFAULT_ASSUMPTIONS, ScalingAssumptions, crossover, power_curve
from .units import human_power, parse_power
from .validation import run_suite

EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def q(value, unit: str) -> dict:
    """Quantity with its unit label, as stored in reports."""
    if isinstance(value, (np.integer,)):
        value = int(value)
    elif isinstance(value, np.floating):
        value = float(value)
    return {"value": value, "unit": unit}


class Report:
    def __init__(self, command: str, options: dict):
        self.command = command
        self.options = options
        self.inputs: list[tuple[str, str]] = []
        self.results: dict = {}
        self.warnings: list[str] = []

    def add_input(self, name: str, text: str) -> str:
        self.inputs.append((name, text))
        return text

    def as_dict(self) -> dict:
        h = hashlib.sha256()
        h.update(json.dumps({"command": self.command, "options": self.options,
                             "inputs": self.inputs}, sort_keys=True).encode())
        return {
            "command": self.command,
            "config_hash": h.hexdigest(),
            "options": self.options,
            "results": self.results,
            "warnings": self.warnings,
            "version": __version__,
        }


def _load_spec(ref: str, report: Report):
    path = Path(ref)
    if path.is_file():
        return parse_spec(report.add_input(ref, read_text(path)), source=ref)
    name = path.stem if path.suffix == ".spec" else ref
    if name in fixtures.SPEC_NAMES:
        return parse_spec(report.add_input(f"fixture:{name}", fixtures.spec_text(name)),
                          source=f"fixtures/{name}.spec")
    raise InputError(f"spec {ref!r} is neither a file nor a bundled fixture "
                     f"({', '.join(fixtures.SPEC_NAMES)})")


def _load_coding(ref: str, spec, report: Report) -> CodingState:
    if ref in ("all-zeros", "zeros"):
        report.add_input("coding", ref)
        return CodingState.zeros(spec.n_cells)
    if ref in ("all-ones", "ones"):
        report.add_input("coding", ref)
        return CodingState.all_ones(spec)
    path = Path(ref)
    if not path.is_file():
        raise InputError(f"coding file {ref!r} not found (or use all-ones / all-zeros)")
    return parse_coding(report.add_input(ref, read_text(path)), source=ref)


def _load_dataset(ref: str, report: Report, **meta):
    path = Path(ref)
    if not path.is_file():
        raise InputError(f"dataset file {ref!r} not found")
    return parse_dataset(report.add_input(ref, read_text(path)), source=ref, **meta)


def _breakdown(b) -> dict:
    return {
        "controller": q(b.controller, "W"),
        "drive_circuits": q(b.drive_circuits, "W"),
        "units": q(b.units, "W"),
        "total": q(b.total, "W"),
    }


def _fit_dict(fit) -> dict:
    per = {"bits": "W/bit", "cells": "W/cell", "dual_cells": "W/dual_cell"}[fit.unit]
    return {
        "slope": q(fit.slope, per),
        "intercept": q(fit.intercept, "W"),
        "r_squared": q(fit.r_squared, "1"),
        "max_abs_residual": q(fit.max_abs_residual, "W"),
        "n_points": q(fit.n_points, "count"),
    }


def cmd_compute(args, report: Report) -> int:
    spec = _load_spec(args.spec, report)
    coding = _load_coding(args.coding, spec, report)
    b = total_power(spec, coding)
    report.results = {
        "spec": spec.name,
        "device_class": spec.device_class.value,
        "breakdown": _breakdown(b),
        "drive_circuit_count": q(drive_circuit_count(spec), "count"),
        "on_bits": q(on_bit_count(spec, coding), "count"),
    }
    return EXIT_OK


def cmd_fit(args, report: Report) -> int:
    meta = dict(unit=args.unit, polarization=args.polarization, ris_id=args.ris_id or "")
    ds = _load_dataset(args.dataset, report, **meta)
    fit = fit_linear(ds)
    report.results = {"fit": _fit_dict(fit), "unit": args.unit}
    status = EXIT_OK
    if args.single_dataset:
        single = fit_linear(_load_dataset(args.single_dataset, report, unit="cells",
                                          polarization="v", ris_id=args.ris_id or ""))
        rc = check_polarization_ratio(fit, single, args.tolerance_rel)
        report.results["single_fit"] = _fit_dict(single)
        report.results["polarization_ratio"] = {
            "ratio": q(rc.ratio, "1"), "tolerance": q(rc.rel_tol, "1"), "passed": rc.passed,
        }
        if not rc.passed:
            status = EXIT_FAILED
    if args.spec:
        spec = _load_spec(args.spec, report)
        cal = calibrate_spec(spec, fit)
        res = predict_residuals(cal.spec, ds)
        report.results["calibration"] = {
            "pin_on_bit_power": q(cal.spec.pin_on_bit_power, "W"),
            "switch_cell_power": q(cal.spec.switch_cell_power, "W"),
            "controller_power": q(cal.spec.controller_power, "W"),
            "slack": q(cal.slack, "W"),
            "max_abs_residual": q(res.max_abs, "W"),
        }
    return status


def cmd_validate(args, report: Report) -> int:
    ids = list(args.fixtures)
    if ids == ["all"]:
        ids = list(fixtures.FIXTURE_IDS)
    if args.spec or args.dataset:
        if not (args.spec and args.dataset):
            raise InputError("--spec and --dataset must be given together")
    elif not ids:
        raise InputError("no fixtures selected (name one or more of "
                         f"{', '.join(fixtures.FIXTURE_IDS)}, or 'all')")
    status = EXIT_OK
    out = {}
    for fid in ids:
        if fid not in fixtures.FIXTURE_IDS:
            raise InputError(f"unknown fixture {fid!r}")
        checks = run_suite(fid, args.tolerance_abs, args.tolerance_rel)
        rows = []
        for c in checks:
            rows.append({
                "check": c.name,
                "passed": c.passed,
                "informational": c.informational,
                "values": {k: q(v, u) for k, (v, u) in c.values.items()},
            })
            if not c.passed:
                if c.informational:
                    report.warnings.append(f"{fid}: {c.name} outside tolerance (informational)")
                else:
                    status = EXIT_FAILED
        if fid == "ris2":
            report.warnings.append("ris2: measured all-ON power differs from the model; see residuals")
        out[fid] = {"passed": all(r["passed"] for r in rows if not r["informational"]), "checks": rows}
    if args.spec:
        spec = _load_spec(args.spec, report)
        ds = _load_dataset(args.dataset, report, unit=args.unit, polarization=args.polarization)
        res = predict_residuals(spec, ds)
        out["files"] = {
            "residuals": [q(float(r), "W") for r in res.residuals],
            "max_abs_residual": q(res.max_abs, "W"),
            "mean_abs_residual": q(res.mean_abs, "W"),
        }
    report.results = out
    return status


def _parse_range(text: str) -> list[int]:
    try:
        span, _, step = text.partition(":")
        lo, sep, hi = span.partition("..")
        if not sep:
            return [int(v) for v in text.split(",")]
        step_i = int(step) if step else 1
        if step_i < 1:
            raise ValueError
        return list(range(int(lo), int(hi) + 1, step_i))
    except ValueError:
        raise InputError(f"bad range {text!r}; use LO..HI[:STEP] or a comma list") from None


def cmd_scale(args, report: Report) -> int:
    cls = DeviceClass.parse(args.device_class)
    a = ScalingAssumptions(
        controller_power=parse_power(args.controller_power) if args.controller_power else DEFAULT_ASSUMPTIONS.controller_power,
        pin_on_bit_power=parse_power(args.pin_power) if args.pin_power else DEFAULT_ASSUMPTIONS.pin_on_bit_power,
        varactor_drive_power=parse_power(args.drive_power) if args.drive_power else DEFAULT_ASSUMPTIONS.varactor_drive_power,
    )
    ns = _parse_range(args.range)
    curve = power_curve(cls, ns, a)
    report.results = {
        "device_class": cls.value,
        "assumptions": {
            "controller_power": q(a.controller_power, "W"),
            "pin_on_bit_power": q(a.pin_on_bit_power, "W"),
            "varactor_drive_power": q(a.varactor_drive_power, "W"),
        },
        "curve": [{"n": q(int(n), "count"), "power": q(float(w), "W")} for n, w in zip(*curve)],
    }
    if args.crossover:
        other = DeviceClass.parse(args.crossover)
        n_star = crossover(cls, other, a)
        report.results["crossover"] = {"against": other.value,
                                       "n": None if n_star is None else q(n_star, "count")}
    if args.format == "csv":
        lines = ["n,power_watts"] + [f"{int(n)},{float(w)!r}" for n, w in zip(*curve)]
        report.csv = "\n".join(lines) + "\n"
    return EXIT_OK


def cmd_optimize(args, report: Report) -> int:
    spec = _load_spec(args.spec, report)
    if spec.device_class is not DeviceClass.PIN_DIODE:
        raise InputError(f"optimize supports PIN-diode surfaces only; {spec.name or 'spec'} is "
                         f"{spec.device_class.value}")
    coding = _load_coding(args.coding, spec, report)
    res = optimize_global_offset(coding, spec)
    report.results = {
        "offset": q(res.offset, "state"),
        "power_before": q(res.power_before, "W"),
        "power_after": q(res.power_after, "W"),
        "savings": q(res.savings, "W"),
        "on_bits_before": q(on_bit_count(spec, coding), "count"),
        "on_bits_after": q(on_bit_count(spec, res.coding), "count"),
    }
    if args.optimized_coding:
        Path(args.optimized_coding).write_text(format_coding(res.coding), encoding="utf-8")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report to this file instead of stdout")
    common.add_argument("--pretty", action="store_true", help="also print a readable summary to stderr")

    parser = argparse.ArgumentParser(prog="rispower", description="RIS power consumption model toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", parents=[common], help="power breakdown for a spec and coding")
    p.add_argument("--spec", required=True, help="spec file or bundled fixture name (ris1..ris6)")
    p.add_argument("--coding", required=True, help="coding CSV, or all-ones / all-zeros")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("fit", parents=[common], help="least-squares line through a measurement CSV")
    p.add_argument("--dataset", required=True)
    p.add_argument("--unit", choices=UNIT_SEMANTICS, default="cells", help="what n_on counts")
    p.add_argument("--polarization", choices=("v", "h", "dual"), default="v")
    p.add_argument("--ris-id")
    p.add_argument("--single-dataset", help="single-polarization CSV for the slope-ratio check")
    p.add_argument("--spec", help="template spec to calibrate from the fit")
    p.add_argument("--tolerance-rel", type=float, default=DEFAULT_REL_TOL)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("validate", parents=[common], help="run validation suites on bundled fixtures")
    p.add_argument("fixtures", nargs="*", help="fixture ids (ris1..ris6) or 'all'")
    p.add_argument("--spec")
    p.add_argument("--dataset")
    p.add_argument("--unit", choices=UNIT_SEMANTICS, default="cells")
    p.add_argument("--polarization", choices=("v", "h", "dual"), default="v")
    p.add_argument("--tolerance-abs", type=parse_power, default=DEFAULT_ABS_TOL,
                   help="absolute tolerance for additivity checks (e.g. 0.5mW)")
    p.add_argument("--tolerance-rel", type=float, default=DEFAULT_REL_TOL)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("scale", parents=[common], help="simplified power-vs-size curve")
    p.add_argument("device_class", help="pin, varactor, vdiscrete or rf")
    p.add_argument("range", help="LO..HI[:STEP] or comma list of cell counts")
    p.add_argument("--controller-power")
    p.add_argument("--pin-power")
    p.add_argument("--drive-power")
    p.add_argument("--crossover", metavar="CLASS")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_scale)

    p = sub.add_parser("optimize", parents=[common], help="global state offset minimizing ON bits")
    p.add_argument("--spec", required=True)
    p.add_argument("--coding", required=True)
    p.add_argument("--optimized-coding", help="write the shifted coding CSV here")
    p.set_defaults(func=cmd_optimize)
    return parser


_EXCLUDED_OPTIONS = {"func", "out", "pretty", "command", "optimized_coding"}


def _pretty(report: Report, stream) -> None:
    def walk(prefix, obj):
        if isinstance(obj, dict) and set(obj) == {"value", "unit"}:
            v, u = obj["value"], obj["unit"]
            text = human_power(v) if u == "W" and isinstance(v, float) else f"{v} {u}"
            print(f"  {prefix:<58} {text}", file=stream)
        elif isinstance(obj, dict):
            for k, v in obj.items():
                walk(f"{prefix}.{k}" if prefix else k, v)
        elif isinstance(obj, list):
            for i, v in enumerate(obj):
                walk(f"{prefix}[{i}]", v)
        else:
            print(f"  {prefix:<58} {obj}", file=stream)

    print(f"rispower {report.command}", file=stream)
    walk("", report.results)
    for w in report.warnings:
        print(f"  warning: {w}", file=stream)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    options = {k: v for k, v in sorted(vars(args).items()) if k not in _EXCLUDED_OPTIONS}
    report = Report(args.command, options)
    report.csv = None
    try:
        status = args.func(args, report)
    except (InputError, ParseError, KeyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"rispower {args.command}: error: {msg}", file=sys.stderr)
        return EXIT_INPUT

    text = report.csv if report.csv is not None else json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.pretty:
        _pretty(report, sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
