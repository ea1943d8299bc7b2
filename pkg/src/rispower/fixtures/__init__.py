"""Bundled hardware specs and measurement tables for six fabricated surfaces."""

from __future__ import annotations

from importlib import resources

from ..calibration import MeasurementDataset
from ..formats import parse_dataset, parse_spec
from ..model import RisHardwareSpec

FIXTURE_IDS = ("ris1", "ris2", "ris3", "ris4", "ris5", "ris6")
SPEC_NAMES = FIXTURE_IDS + ("ris1_alt",)


def _text(filename: str) -> str:
    return resources.files(__name__).joinpath(filename).read_text(encoding="utf-8")


def spec_text(name: str) -> str:
    if name not in SPEC_NAMES:
        raise KeyError(f"no bundled spec {name!r} (available: {', '.join(SPEC_NAMES)})")
    return _text(f"{name}.spec")


def load_spec(name: str) -> RisHardwareSpec:
    return parse_spec(spec_text(name), source=f"fixtures/{name}.spec")


def load_dataset(filename: str, **meta) -> MeasurementDataset:
    return parse_dataset(_text(filename), source=f"fixtures/{filename}", **meta)


def ris2_measured() -> MeasurementDataset:
    return load_dataset("ris2_measured.csv", unit="dual_cells", polarization="dual", ris_id="ris2")


def ris3_measured() -> MeasurementDataset:
    return load_dataset("ris3_measured.csv", unit="cells", polarization="v", ris_id="ris3")


def ris4_columns() -> dict[int, dict[str, float]]:
    """Per-column power (W) keyed by column number, then coding word."""
    ds = load_dataset("ris4_columns.csv", unit="bits", ris_id="ris4", voltage=1.2)
    table: dict[int, dict[str, float]] = {}
    for p in ds.points:
        col, code = p.label.split(":")
        table.setdefault(int(col.removeprefix("col")), {})[code] = p.power
    return table


def _combos(filename: str) -> list[tuple[tuple[str, ...], float]]:
    ds = load_dataset(filename, unit="bits", ris_id="ris4", voltage=1.2)
    return [(tuple(p.label.split("+")), p.power) for p in ds.points]


def ris4_combinations() -> list[tuple[tuple[str, ...], float]]:
    """Measured power of column combinations, all coded "11"."""
    return _combos("ris4_combinations.csv")


def ris4_combinations_reference() -> list[tuple[tuple[str, ...], float]]:
    """Reported theoretical sums for the same combinations."""
    return _combos("ris4_combinations_reference.csv")
