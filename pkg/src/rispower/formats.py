"""Text formats: hardware spec files, coding CSV and measurement CSV.

Spec files are ``key = value`` lines; ``#`` starts a comment. Powers need a
unit suffix. Example::

    device_class = pin_diode
    polarization = v
    cells = 512
    bit_resolution = 1
    group_size = 1
    signals_per_circuit = 8
    drive_power = 0W
    controller_power = 6.52W
    pin_on_bit_power = 11.99mW
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterator

import numpy as np

from .calibration import MeasurementDataset, MeasurementPoint
from .model import (
    CodingState,
    DeviceClass,
    DriveCircuitSpec,
    PolarizationMode,
    RisHardwareSpec,
)
from .units import UnitError, format_power, parse_power


class ParseError(ValueError):
    def __init__(self, source: str, line: int | None, message: str):
        self.source = source
        self.line = line
        self.message = message
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")


SPEC_KEYS = {
    "name", "device_class", "polarization", "cells", "bit_resolution",
    "bits_v", "bits_h", "configurable_v", "configurable_h",
    "group_size", "group_size_v", "group_size_h",
    "signals_per_circuit", "drive_power", "controller_power",
    "pin_on_bit_power", "switch_cell_power",
}
_POWER_KEYS = {"drive_power", "controller_power", "pin_on_bit_power", "switch_cell_power"}
_REQUIRED = {"device_class", "polarization", "cells", "signals_per_circuit",
             "drive_power", "controller_power"}


def _int(text: str, source: str, line: int, key: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(source, line, f"{key}: expected an integer, got {text!r}") from None


def _int_list(text: str, source: str, line: int, key: str) -> np.ndarray:
    return np.array([_int(t.strip(), source, line, key) for t in text.split(",") if t.strip()],
                    dtype=np.int64)


def parse_spec(text: str, source: str = "<spec>") -> RisHardwareSpec:
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ParseError(source, lineno, f"expected 'key = value', got {body!r}")
        key, value = (s.strip() for s in body.split("=", 1))
        if key not in SPEC_KEYS:
            raise ParseError(source, lineno, f"unknown key {key!r}")
        if key in raw:
            raise ParseError(source, lineno, f"duplicate key {key!r} (first on line {raw[key][1]})")
        raw[key] = (value, lineno)

    missing = sorted(_REQUIRED - raw.keys())
    if missing:
        raise ParseError(source, None, f"missing required key(s): {', '.join(missing)}")

    def line_of(key):
        return raw[key][1] if key in raw else None

    vals: dict = {}
    try:
        for key, (value, lineno) in raw.items():
            if key in _POWER_KEYS:
                vals[key] = parse_power(value, require_unit=True)
            elif key == "device_class":
                vals[key] = DeviceClass.parse(value)
            elif key == "polarization":
                vals[key] = PolarizationMode.parse(value)
            elif key == "name":
                vals[key] = value
            elif key in ("bits_v", "bits_h", "configurable_v", "configurable_h"):
                vals[key] = _int_list(value, source, lineno, key)
            else:
                vals[key] = _int(value, source, lineno, key)
    except (UnitError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(source, lineno, f"{key}: {exc}") from None

    cls: DeviceClass = vals["device_class"]
    pol: PolarizationMode = vals["polarization"]
    n = vals["cells"]
    if n < 1:
        raise ParseError(source, line_of("cells"), "cells must be at least 1")

    bits = np.zeros((n, 2), dtype=np.int64)
    conf = np.zeros((n, 2), dtype=np.int64)
    for k, p in enumerate("vh"):
        if not pol.indicator(p):
            for key in (f"bits_{p}", f"configurable_{p}"):
                if key in vals and np.any(vals[key]):
                    raise ParseError(source, line_of(key), f"{key} set but polarization {p!r} is not configurable")
            continue
        if f"bits_{p}" in vals:
            col = vals[f"bits_{p}"]
            if col.size != n:
                raise ParseError(source, line_of(f"bits_{p}"), f"bits_{p} has {col.size} entries, expected {n}")
            bits[:, k] = col
        elif "bit_resolution" in vals:
            bits[:, k] = vals["bit_resolution"]
        else:
            raise ParseError(source, None, f"need bit_resolution or bits_{p}")
        if f"configurable_{p}" in vals:
            col = vals[f"configurable_{p}"]
            if col.size != n:
                raise ParseError(source, line_of(f"configurable_{p}"),
                                 f"configurable_{p} has {col.size} entries, expected {n}")
            conf[:, k] = col
        elif cls.is_varactor:
            conf[:, k] = 1
        else:
            conf[:, k] = bits[:, k] > 0

    gs = vals.get("group_size")
    g_v = vals.get("group_size_v", gs)
    g_h = vals.get("group_size_h", gs)
    if g_v is None and pol.i_v or g_h is None and pol.i_h:
        raise ParseError(source, None, "need group_size (or group_size_v / group_size_h)")
    try:
        drive = DriveCircuitSpec(vals["signals_per_circuit"], vals["drive_power"])
        return RisHardwareSpec(
            device_class=cls,
            polarization=pol,
            bits=bits,
            configurable=conf,
            group_size=(g_v or 1, g_h or 1),
            drive=drive,
            controller_power=vals["controller_power"],
            pin_on_bit_power=vals.get("pin_on_bit_power", 0.0),
            switch_cell_power=vals.get("switch_cell_power", 0.0),
            name=vals.get("name", ""),
        )
    except ValueError as exc:
        raise ParseError(source, None, str(exc)) from None


def _is_uniform(spec: RisHardwareSpec) -> bool:
    for k, p in enumerate("vh"):
        if not spec.polarization.indicator(p):
            continue
        if not np.all(spec.configurable[:, k] == 1):
            return False
    return spec.uniform_bits is not None


def format_spec(spec: RisHardwareSpec) -> str:
    lines = []
    if spec.name:
        lines.append(f"name = {spec.name}")
    lines += [
        f"device_class = {spec.device_class.value}",
        f"polarization = {spec.polarization.label}",
        f"cells = {spec.n_cells}",
    ]
    if _is_uniform(spec):
        lines.append(f"bit_resolution = {spec.uniform_bits}")
    else:
        for k, p in enumerate("vh"):
            if spec.polarization.indicator(p):
                lines.append(f"bits_{p} = " + ",".join(str(int(b)) for b in spec.bits[:, k]))
                lines.append(f"configurable_{p} = " + ",".join(str(int(c)) for c in spec.configurable[:, k]))
    g_v, g_h = spec.group_size
    if g_v == g_h:
        lines.append(f"group_size = {g_v}")
    else:
        lines += [f"group_size_v = {g_v}", f"group_size_h = {g_h}"]
    lines += [
        f"signals_per_circuit = {spec.drive.signals_per_circuit}",
        f"drive_power = {format_power(spec.drive.rated_power)}",
        f"controller_power = {format_power(spec.controller_power)}",
        f"pin_on_bit_power = {format_power(spec.pin_on_bit_power)}",
        f"switch_cell_power = {format_power(spec.switch_cell_power)}",
    ]
    return "\n".join(lines) + "\n"


def _csv_rows(text: str, source: str) -> Iterator[tuple[int, list[str]]]:
    """Yield ``(line number, fields)`` skipping blank and ``#`` lines."""
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield lineno, [f.strip() for f in next(csv.reader([line]))]


def _header(rows, source: str, required: set[str], allowed: set[str]) -> dict[str, int]:
    try:
        lineno, header = next(rows)
    except StopIteration:
        raise ParseError(source, None, "file is empty (a header row is required)") from None
    cols = {name: i for i, name in enumerate(header)}
    unknown = set(cols) - allowed
    if unknown:
        raise ParseError(source, lineno, f"unknown column(s): {', '.join(sorted(unknown))}")
    missing = required - set(cols)
    if missing:
        raise ParseError(source, lineno, f"missing column(s): {', '.join(sorted(missing))}")
    return cols


def _parse_state(text: str) -> int:
    if text.lower().startswith("0b"):
        return int(text[2:], 2)
    return int(text)


def parse_coding(text: str, source: str = "<coding>") -> CodingState:
    """Coding CSV with columns ``cell_index,state_v,state_h``; a missing state column means 0."""
    rows = _csv_rows(text, source)
    cols = _header(rows, source, {"cell_index"}, {"cell_index", "state_v", "state_h"})
    if "state_v" not in cols and "state_h" not in cols:
        raise ParseError(source, None, "need at least one of state_v, state_h")
    seen: dict[int, tuple[int, int]] = {}
    for lineno, row in rows:
        if len(row) != len(cols):
            raise ParseError(source, lineno, f"expected {len(cols)} fields, got {len(row)}")
        try:
            idx = int(row[cols["cell_index"]])
            sv = _parse_state(row[cols["state_v"]]) if "state_v" in cols else 0
            sh = _parse_state(row[cols["state_h"]]) if "state_h" in cols else 0
        except ValueError:
            raise ParseError(source, lineno, f"non-integer field in {row!r}") from None
        if idx < 0 or sv < 0 or sh < 0:
            raise ParseError(source, lineno, "cell index and states must be non-negative")
        if idx in seen:
            raise ParseError(source, lineno, f"cell {idx} listed twice")
        seen[idx] = (sv, sh)
    n = len(seen)
    if n == 0:
        raise ParseError(source, None, "coding has no cells")
    if set(seen) != set(range(n)):
        gap = min(set(range(n)) - set(seen))
        raise ParseError(source, None, f"cell indices must cover 0..{n - 1}; {gap} is missing")
    return CodingState(np.array([seen[i] for i in range(n)], dtype=np.int64))


def format_coding(coding: CodingState) -> str:
    lines = ["cell_index,state_v,state_h"]
    lines += [f"{i},{int(v)},{int(h)}" for i, (v, h) in enumerate(coding.states)]
    return "\n".join(lines) + "\n"


def parse_dataset(text: str, source: str = "<dataset>", *, unit: str = "cells",
                  polarization: str = "v", ris_id: str = "",
                  voltage: float | None = None) -> MeasurementDataset:
    """Measurement CSV with columns ``n_on,power_watts,label``.

    Power fields may carry a unit suffix (``9.5mW``); bare numbers are watts.
    """
    rows = _csv_rows(text, source)
    cols = _header(rows, source, {"n_on", "power_watts"}, {"n_on", "power_watts", "label"})
    points = []
    for lineno, row in rows:
        if len(row) != len(cols):
            raise ParseError(source, lineno, f"expected {len(cols)} fields, got {len(row)}")
        try:
            n_on = int(row[cols["n_on"]])
            power = parse_power(row[cols["power_watts"]])
            label = row[cols["label"]] if "label" in cols else ""
            points.append(MeasurementPoint(n_on, power, label))
        except ValueError as exc:
            raise ParseError(source, lineno, str(exc)) from None
    return MeasurementDataset(tuple(points), ris_id=ris_id, polarization=polarization,
                              voltage=voltage, unit=unit)


def format_dataset(dataset: MeasurementDataset) -> str:
    lines = ["n_on,power_watts,label"]
    for p in dataset.points:
        label = p.label
        if any(ch in label for ch in ',"\n'):
            label = '"' + label.replace('"', '""') + '"'
        lines.append(f"{p.n_on},{p.power!r},{label}")
    return "\n".join(lines) + "\n"


def read_text(path: str | Path) -> str:
    return Path(path).read_text(encoding="utf-8")
