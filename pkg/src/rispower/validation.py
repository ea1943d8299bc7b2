"""Per-surface validation suites run against the bundled fixtures."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fixtures
from .calibration import (
    DEFAULT_ABS_TOL,
    DEFAULT_REL_TOL,
    FLOAT_GUARD,
    check_coding_additivity,
    check_order_invariance,
    check_polarization_ratio,
    fit_linear,
    generate_dataset,
    predict_residuals,
)
from .model import (
    CodingState,
    control_signal_count,
    drive_circuit_count,
    drive_power,
    static_power,
    total_power,
    units_power,
)

# model-generated sweep used for the dual/single slope comparison on 2#
RIS2_SWEEP = tuple(range(0, 3601, 60))


@dataclass
class Check:
    name: str
    passed: bool
    values: dict = field(default_factory=dict)  # name -> (number, unit)
    informational: bool = False


def _close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol + FLOAT_GUARD


def suite_ris1(abs_tol: float, rel_tol: float) -> list[Check]:
    spec = fixtures.load_spec("ris1")
    alt = fixtures.load_spec("ris1_alt")
    n = drive_circuit_count(spec)
    p = static_power(spec)
    return [
        Check("drive circuit count", n == 32, {"count": (n, "count"), "expected": (32, "count")}),
        Check("static power", _close(p, 4.80224, 1e-9),
              {"static_power": (p, "W"), "expected": (4.80224, "W")}),
        Check("static power with 0.066 mW shift registers", True,
              {"static_power": (static_power(alt), "W")}, informational=True),
    ]


def suite_ris2(abs_tol: float, rel_tol: float) -> list[Check]:
    spec = fixtures.load_spec("ris2")
    dual = fit_linear(generate_dataset(spec, RIS2_SWEEP, unit="dual_cells", polarization="dual"))
    single = fit_linear(generate_dataset(spec, RIS2_SWEEP, unit="cells", polarization="v"))
    ratio = check_polarization_ratio(dual, single, rel_tol)
    res = predict_residuals(spec, fixtures.ris2_measured())
    return [
        Check("fit recovers static power",
              abs(single.intercept / 15.73 - 1) <= 1e-9 and abs(dual.intercept / 15.73 - 1) <= 1e-9,
              {"intercept_single": (single.intercept, "W"), "intercept_dual": (dual.intercept, "W")}),
        Check("fit recovers per-bit power", abs(single.slope / 12.56e-3 - 1) <= 1e-9,
              {"slope_single": (single.slope, "W/cell"), "slope_dual": (dual.slope, "W/cell")}),
        Check("dual/single slope ratio", ratio.passed,
              {"ratio": (ratio.ratio, "1"), "tolerance": (rel_tol, "1")}),
        Check("residuals against measured all-OFF / all-ON", True,
              {"residual_all_off": (float(res.residuals[0]), "W"),
               "residual_all_on": (float(res.residuals[-1]), "W"),
               "max_abs_residual": (res.max_abs, "W")},
              informational=True),
    ]


def suite_ris3(abs_tol: float, rel_tol: float) -> list[Check]:
    spec = fixtures.load_spec("ris3")
    on = total_power(spec, CodingState.all_ones(spec)).total
    off = total_power(spec, CodingState.zeros(spec.n_cells)).total
    column = np.zeros(spec.n_cells, dtype=np.int64)
    column[:32] = 1
    rng = np.random.default_rng(3)
    scattered = np.zeros(spec.n_cells, dtype=np.int64)
    scattered[rng.choice(spec.n_cells, size=32, replace=False)] = 1
    order = check_order_invariance(spec, [CodingState.from_columns(column), CodingState.from_columns(scattered)])
    fit = fit_linear(fixtures.ris3_measured())
    return [
        Check("all cells ON", _close(on, 12.66, 10e-3), {"total": (on, "W"), "expected": (12.66, "W")}),
        Check("all cells OFF", _close(off, 6.52, 10e-3), {"total": (off, "W"), "expected": (6.52, "W")}),
        Check("first column vs 32 random cells", order.passed,
              {"total_column": (order.totals[0], "W"), "total_random": (order.totals[1], "W")}),
        Check("two-point fit slope", _close(fit.slope, 11.99e-3, 0.01e-3),
              {"slope": (fit.slope, "W/cell"), "intercept": (fit.intercept, "W")}),
    ]


def suite_ris4(abs_tol: float, rel_tol: float) -> list[Check]:
    spec = fixtures.load_spec("ris4")
    columns = fixtures.ris4_columns()
    per_col = [(str(c), row["11"]) for c, row in sorted(columns.items())]
    reproduced = check_coding_additivity(per_col, fixtures.ris4_combinations_reference(), abs_tol)
    measured = check_coding_additivity(per_col, fixtures.ris4_combinations(), abs_tol)
    col_checks = check_coding_additivity(
        [(f"{c}:{code}", w) for c, row in columns.items() for code, w in row.items()],
        [((f"{c}:10", f"{c}:01"), row["11"]) for c, row in sorted(columns.items())],
        abs_tol,
    )
    n_c = control_signal_count(spec, "v")
    checks = [
        Check("control signals", n_c == 128, {"count": (n_c, "count")}),
        Check("combination sums reproduce reported theoretical values", reproduced.passed,
              {f"delta[{'+'.join(r.labels)}]": (r.delta, "W") for r in reproduced.combos}
              | {"max_abs_delta": (reproduced.max_abs_delta, "W"), "tolerance": (abs_tol, "W")}),
        Check("measured combinations vs column sums", measured.passed,
              {f"delta[{'+'.join(r.labels)}]": (r.delta, "W") for r in measured.combos}
              | {"max_abs_delta": (measured.max_abs_delta, "W")},
              informational=True),
        Check('column "11" vs "10" + "01"', col_checks.passed,
              {f"delta[col{r.labels[0].split(':')[0]}]": (r.delta, "W") for r in col_checks.combos}
              | {"max_abs_delta": (col_checks.max_abs_delta, "W"), "tolerance": (abs_tol, "W")}),
    ]
    return checks


def suite_ris5(abs_tol: float, rel_tol: float) -> list[Check]:
    spec = fixtures.load_spec("ris5")
    n = drive_circuit_count(spec)
    dp = drive_power(spec)
    up = units_power(spec, CodingState.zeros(spec.n_cells))
    return [
        Check("drive circuit count", n == 4, {"count": (n, "count")}),
        Check("drive power", _close(dp, 1.72, 1e-12), {"drive_power": (dp, "W"), "expected": (1.72, "W")}),
        Check("unit-cell power", up == 0.0, {"units": (up, "W")}),
    ]


def suite_ris6(abs_tol: float, rel_tol: float) -> list[Check]:
    spec = fixtures.load_spec("ris6")
    rng = np.random.default_rng(6)
    codings = [
        CodingState.zeros(spec.n_cells),
        CodingState.all_ones(spec),
        CodingState.from_columns(rng.integers(0, 2, spec.n_cells)),
    ]
    powers = [units_power(spec, c) for c in codings]
    dp = drive_power(spec)
    return [
        Check("drive power", _close(dp, 0.240, 1e-12), {"drive_power": (dp, "W")}),
        Check("unit-cell power", _close(powers[0], 64 * 495e-6, 1e-12),
              {"units": (powers[0], "W"), "expected": (64 * 495e-6, "W")}),
        Check("unit-cell power independent of coding", len(set(powers)) == 1,
              {f"units[{name}]": (p, "W") for name, p in zip(("zeros", "ones", "random"), powers)}),
    ]


SUITES = {
    "ris1": suite_ris1,
    "ris2": suite_ris2,
    "ris3": suite_ris3,
    "ris4": suite_ris4,
    "ris5": suite_ris5,
    "ris6": suite_ris6,
}


def run_suite(fixture_id: str, abs_tol: float = DEFAULT_ABS_TOL,
              rel_tol: float = DEFAULT_REL_TOL) -> list[Check]:
    try:
        suite = SUITES[fixture_id]
    except KeyError:
        raise KeyError(f"no validation suite for {fixture_id!r} (available: {', '.join(SUITES)})") from None
    return suite(abs_tol, rel_tol)
