"""Fitting measured power data and structural consistency checks.

Datasets are ``(n_on, watts)`` points. What ``n_on`` counts is explicit:
``"bits"`` (ON bits), ``"cells"`` (cells with every bit ON in one
polarization) or ``"dual_cells"`` (cells with every bit ON in both).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .model import (
    CodingState,
    DeviceClass,
    RisHardwareSpec,
    static_power,
    total_power,
)

UNIT_SEMANTICS = ("bits", "cells", "dual_cells")

# Decimal inputs such as 58.7 mW - 58.2 mW land a few 1e-19 W off the
# nominal difference; comparisons allow this much slack.
FLOAT_GUARD = 1e-12

DEFAULT_ABS_TOL = 0.5e-3
DEFAULT_REL_TOL = 0.05


@dataclass(frozen=True)
class MeasurementPoint:
    n_on: int
    power: float
    label: str = ""

    def __post_init__(self):
        if self.n_on < 0:
            raise ValueError("n_on must be non-negative")
        if not self.power >= 0:
            raise ValueError("measured power must be non-negative")


@dataclass(frozen=True)
class MeasurementDataset:
    points: tuple[MeasurementPoint, ...]
    ris_id: str = ""
    polarization: str = "v"
    voltage: float | None = None
    unit: str = "cells"

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if self.unit not in UNIT_SEMANTICS:
            raise ValueError(f"unit must be one of {UNIT_SEMANTICS}, got {self.unit!r}")
        if self.polarization not in ("v", "h", "dual"):
            raise ValueError("dataset polarization must be v, h or dual")

    @property
    def n_on(self) -> np.ndarray:
        return np.array([p.n_on for p in self.points], dtype=np.int64)

    @property
    def powers(self) -> np.ndarray:
        return np.array([p.power for p in self.points], dtype=float)


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    max_abs_residual: float
    n_points: int
    unit: str = "cells"


def fit_linear(dataset: MeasurementDataset) -> FitResult:
    """Ordinary least-squares line ``power = slope * n_on + intercept``.

    The closed form is evaluated in exact rational arithmetic over the float
    inputs and rounded once, so the result is the correctly rounded OLS line
    and does not depend on point order.
    """
    pts = dataset.points
    if len(pts) < 2:
        raise ValueError("need at least two points to fit a line")
    x = [Fraction(p.n_on) for p in pts]
    y = [Fraction(p.power) for p in pts]
    n = len(pts)
    x_mean = sum(x) / n
    y_mean = sum(y) / n
    dx = [xi - x_mean for xi in x]
    dy = [yi - y_mean for yi in y]
    sxx = sum(d * d for d in dx)
    if sxx == 0:
        raise ValueError("all n_on values are identical; slope is undefined")
    slope = sum(a * b for a, b in zip(dx, dy)) / sxx
    intercept = y_mean - slope * x_mean

    resid = [yi - (slope * xi + intercept) for xi, yi in zip(x, y)]
    ss_res = sum(r * r for r in resid)
    ss_tot = sum(d * d for d in dy)
    r2 = Fraction(1) if ss_tot == 0 else 1 - ss_res / ss_tot
    return FitResult(
        slope=float(slope),
        intercept=float(intercept),
        r_squared=float(min(Fraction(1), max(Fraction(0), r2))),
        max_abs_residual=float(max(abs(r) for r in resid)),
        n_points=n,
        unit=dataset.unit,
    )


@dataclass(frozen=True)
class RatioCheck:
    passed: bool
    ratio: float
    rel_tol: float


def check_polarization_ratio(fit_dual: FitResult, fit_single: FitResult,
                             rel_tol: float = DEFAULT_REL_TOL) -> RatioCheck:
    """Dual-polarization slope should be twice the single-polarization slope."""
    if fit_single.slope == 0:
        raise ValueError("single-polarization slope is zero; ratio undefined")
    ratio = fit_dual.slope / fit_single.slope
    return RatioCheck(passed=abs(ratio - 2.0) <= rel_tol, ratio=ratio, rel_tol=rel_tol)


@dataclass(frozen=True)
class ComboResult:
    labels: tuple[str, ...]
    theoretical: float
    measured: float
    delta: float  # measured - theoretical
    passed: bool


@dataclass(frozen=True)
class AdditivityReport:
    combos: tuple[ComboResult, ...]
    abs_tol: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.combos)

    @property
    def max_abs_delta(self) -> float:
        return max((abs(c.delta) for c in self.combos), default=0.0)


def check_coding_additivity(
    per_group: Sequence[tuple[str, float]],
    combos: Sequence[tuple[Iterable[str], float]],
    abs_tol: float = DEFAULT_ABS_TOL,
) -> AdditivityReport:
    """Compare measured combined power with the sum of its members."""
    table = dict(per_group)
    rows = []
    for labels, measured in combos:
        labels = tuple(labels)
        missing = [lb for lb in labels if lb not in table]
        if missing:
            raise KeyError(f"unknown group label(s): {', '.join(missing)}")
        theoretical = math.fsum(table[lb] for lb in labels)
        delta = measured - theoretical
        rows.append(ComboResult(labels, theoretical, measured, delta,
                                abs(delta) <= abs_tol + FLOAT_GUARD))
    return AdditivityReport(tuple(rows), abs_tol)


@dataclass(frozen=True)
class Calibration:
    spec: RisHardwareSpec
    slack: float  # fitted intercept minus static power of the template


def _units_per_step(spec: RisHardwareSpec, unit: str) -> int:
    """How many ON bits (PIN) or configured cell-polarizations (switch) one step of n_on adds."""
    if unit == "bits":
        if spec.device_class is DeviceClass.RF_SWITCH:
            raise ValueError("bit-count datasets do not apply to RF-switch surfaces")
        return 1
    per_cell = 1
    if spec.device_class is DeviceClass.PIN_DIODE:
        b = spec.uniform_bits
        if b is None:
            raise ValueError("cell-count datasets need a uniform bit resolution")
        per_cell = b
    if unit == "dual_cells":
        if spec.polarization.count != 2:
            raise ValueError("dual_cells dataset given for a single-polarization surface")
        return 2 * per_cell
    return per_cell


def calibrate_spec(template: RisHardwareSpec, fit: FitResult, *,
                   absorb_slack: bool = True) -> Calibration:
    """Set the per-unit device power from ``fit.slope``.

    The slope is divided by the number of ON bits (or switch cell-polarizations)
    one unit of ``n_on`` represents. The gap between the fitted intercept and
    the template's static power is returned as ``slack`` and, by default,
    folded into the controller power.
    """
    if fit.slope < 0:
        raise ValueError("negative slope cannot be calibrated into a device power")
    per = _units_per_step(template, fit.unit)
    slack = fit.intercept - static_power(template)
    changes = {}
    if template.device_class is DeviceClass.PIN_DIODE:
        changes["pin_on_bit_power"] = fit.slope / per
    elif template.device_class is DeviceClass.RF_SWITCH:
        changes["switch_cell_power"] = fit.slope / per
    else:
        raise ValueError("calibration needs a PIN-diode or RF-switch template")
    if absorb_slack:
        controller = template.controller_power + slack
        if controller < 0:
            raise ValueError("fitted intercept is below the template's drive-circuit power")
        changes["controller_power"] = controller
    return Calibration(replace(template, **changes), slack)


def coding_for_count(spec: RisHardwareSpec, n_on: int, unit: str = "cells",
                     polarization: str = "v") -> CodingState:
    """Coding with the first ``n_on`` units switched fully ON, in cell order.

    ``polarization`` selects the direction for ``"cells"`` and ``"bits"``.
    """
    states = np.zeros((spec.n_cells, 2), dtype=np.int64)
    full = spec.max_states - 1
    if unit == "dual_cells":
        if spec.polarization.count != 2:
            raise ValueError("dual_cells count given for a single-polarization surface")
        if n_on > spec.n_cells:
            raise ValueError(f"n_on={n_on} exceeds {spec.n_cells} cells")
        states[:n_on] = full[:n_on]
        return CodingState(states)
    if polarization == "dual":
        polarization = "v"
    k = 0 if polarization == "v" else 1
    if not spec.polarization.indicator(polarization):
        raise ValueError(f"surface cannot be configured in polarization {polarization!r}")
    if unit == "cells":
        if n_on > spec.n_cells:
            raise ValueError(f"n_on={n_on} exceeds {spec.n_cells} cells")
        states[:n_on, k] = full[:n_on, k]
        return CodingState(states)
    if unit != "bits":
        raise ValueError(f"unknown unit semantics {unit!r}")
    bits = spec.bits[:, k]
    if n_on > bits.sum():
        raise ValueError(f"n_on={n_on} exceeds {int(bits.sum())} available bits")
    remaining = n_on
    for i, b in enumerate(bits):
        if remaining <= 0:
            break
        take = min(int(b), remaining)
        states[i, k] = (1 << take) - 1
        remaining -= take
    return CodingState(states)


@dataclass(frozen=True)
class ResidualReport:
    predicted: np.ndarray = field(repr=False)
    residuals: np.ndarray = field(repr=False)  # measured - model
    max_abs: float
    mean_abs: float


def predict_residuals(spec: RisHardwareSpec, dataset: MeasurementDataset) -> ResidualReport:
    """Model prediction for every dataset point and the measured-minus-model residuals."""
    if dataset.unit == "dual_cells" and spec.polarization.count != 2:
        raise ValueError("dataset counts dual-polarization cells but the surface is single-polarized")
    pol = dataset.polarization
    if pol != "dual" and not spec.polarization.indicator(pol):
        raise ValueError(f"dataset polarization {pol!r} is not configurable on this surface")
    predicted = np.array([
        total_power(spec, coding_for_count(spec, p.n_on, dataset.unit, pol)).total
        for p in dataset.points
    ], dtype=float)
    resid = dataset.powers - predicted
    abs_r = np.abs(resid)
    return ResidualReport(
        predicted=predicted,
        residuals=resid,
        max_abs=float(abs_r.max()) if abs_r.size else 0.0,
        mean_abs=float(abs_r.mean()) if abs_r.size else 0.0,
    )


def generate_dataset(spec: RisHardwareSpec, n_values: Iterable[int], unit: str = "cells",
                     polarization: str = "v", ris_id: str = "") -> MeasurementDataset:
    """Synthetic dataset whose powers come straight from the model."""
    pts = tuple(
        MeasurementPoint(int(n), total_power(spec, coding_for_count(spec, int(n), unit, polarization)).total,
                         f"model n={int(n)}")
        for n in n_values
    )
    return MeasurementDataset(pts, ris_id=ris_id or spec.name, polarization=polarization, unit=unit)


@dataclass(frozen=True)
class OrderCheck:
    passed: bool
    totals: tuple[float, ...]


def check_order_invariance(spec: RisHardwareSpec, codings: Sequence[CodingState]) -> OrderCheck:
    """Codings that differ only in *which* bits are ON must give bit-identical totals."""
    totals = tuple(total_power(spec, c).total for c in codings)
    return OrderCheck(passed=len(set(totals)) <= 1, totals=totals)
