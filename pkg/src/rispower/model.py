"""RIS power model: control board, drive circuits and unit cells.

Total power is split into a static part (control board plus drive circuits)
and a coding-dependent unit-cell part. Cell data are kept as ``(N, 2)``
integer arrays whose columns are the vertical and horizontal polarization.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DeviceClass",
    "PolarizationMode",
    "DriveCircuitSpec",
    "UnitCellSpec",
    "RisHardwareSpec",
    "CodingState",
    "PowerBreakdown",
    "POLARIZATIONS",
    "control_signal_count",
    "drive_circuit_count",
    "static_power",
    "unit_cell_power",
    "units_power",
    "total_power",
    "make_uniform_spec",
    "static_power_concise",
    "units_power_concise",
    "on_bit_count",
    "popcount",
]

POLARIZATIONS = ("v", "h")
_POL_INDEX = {"v": 0, "h": 1}


class DeviceClass(enum.Enum):
    PIN_DIODE = "pin_diode"
    VARACTOR_CONTINUOUS = "varactor_continuous"
    VARACTOR_DISCRETE = "varactor_discrete"
    RF_SWITCH = "rf_switch"

    @property
    def is_varactor(self) -> bool:
        return self in (DeviceClass.VARACTOR_CONTINUOUS, DeviceClass.VARACTOR_DISCRETE)

    @classmethod
    def parse(cls, text: str) -> "DeviceClass":
        key = text.strip().lower().replace("-", "_")
        aliases = {
            "pin": cls.PIN_DIODE,
            "varactor": cls.VARACTOR_CONTINUOUS,
            "vcontinuous": cls.VARACTOR_CONTINUOUS,
            "vdiscrete": cls.VARACTOR_DISCRETE,
            "rf": cls.RF_SWITCH,
            "switch": cls.RF_SWITCH,
        }
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            names = ", ".join(c.value for c in cls)
            raise ValueError(f"unknown device class {text!r} (expected one of {names})") from None


@dataclass(frozen=True)
class PolarizationMode:
    """Which polarization directions the surface can configure."""

    i_v: int
    i_h: int

    def __post_init__(self):
        if self.i_v not in (0, 1) or self.i_h not in (0, 1):
            raise ValueError("polarization indicators must be 0 or 1")
        if self.i_v + self.i_h == 0:
            raise ValueError("at least one polarization must be configurable")

    def indicator(self, pol: str) -> int:
        return self.i_v if pol == "v" else self.i_h

    @property
    def count(self) -> int:
        return self.i_v + self.i_h

    @property
    def label(self) -> str:
        if self.count == 2:
            return "dual"
        return "v" if self.i_v else "h"

    @classmethod
    def parse(cls, text: str) -> "PolarizationMode":
        key = text.strip().lower()
        table = {
            "v": (1, 0), "vertical": (1, 0),
            "h": (0, 1), "horizontal": (0, 1),
            "dual": (1, 1), "vh": (1, 1),
        }
        if key not in table:
            raise ValueError(f"unknown polarization {text!r} (expected v, h or dual)")
        return cls(*table[key])


VERTICAL = PolarizationMode(1, 0)
HORIZONTAL = PolarizationMode(0, 1)
DUAL = PolarizationMode(1, 1)


@dataclass(frozen=True)
class DriveCircuitSpec:
    """One drive circuit: how many control signals it emits and its rated power (W)."""

    signals_per_circuit: int
    rated_power: float

    def __post_init__(self):
        if int(self.signals_per_circuit) != self.signals_per_circuit or self.signals_per_circuit < 1:
            raise ValueError("signals_per_circuit must be a positive integer")
        if not self.rated_power >= 0:
            raise ValueError("drive rated_power must be non-negative")


@dataclass(frozen=True)
class UnitCellSpec:
    bits_v: int = 0
    bits_h: int = 0
    configurable_v: int = 0
    configurable_h: int = 0

    def __post_init__(self):
        for b in (self.bits_v, self.bits_h):
            if b < 0:
                raise ValueError("bit resolution must be non-negative")
        for c in (self.configurable_v, self.configurable_h):
            if c not in (0, 1):
                raise ValueError("configurable flag must be 0 or 1")
        if (self.bits_v and not self.configurable_v) or (self.bits_h and not self.configurable_h):
            raise ValueError("an unconfigurable polarization must have bit resolution 0")


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.int64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RisHardwareSpec:
    """Full hardware description of one surface.

    ``bits`` and ``configurable`` have shape ``(N, 2)``; column 0 is the
    vertical polarization, column 1 the horizontal one. ``group_size`` is
    ``(N_g_v, N_g_h)``.
    """

    device_class: DeviceClass
    polarization: PolarizationMode
    bits: np.ndarray
    configurable: np.ndarray
    group_size: tuple[int, int]
    drive: DriveCircuitSpec
    controller_power: float
    pin_on_bit_power: float = 0.0
    switch_cell_power: float = 0.0
    name: str = ""

    def __post_init__(self):
        bits = _frozen(self.bits)
        conf = _frozen(self.configurable)
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "configurable", conf)
        gs = self.group_size
        if isinstance(gs, (int, np.integer)):
            gs = (int(gs), int(gs))
        gs = tuple(int(g) for g in gs)
        object.__setattr__(self, "group_size", gs)

        if bits.ndim != 2 or bits.shape[1] != 2 or bits.shape != conf.shape:
            raise ValueError("bits and configurable must both have shape (N, 2)")
        if bits.shape[0] < 1:
            raise ValueError("a surface needs at least one unit cell")
        if len(gs) != 2 or min(gs) < 1:
            raise ValueError("group_size must be a positive integer per polarization")
        if np.any(bits < 0):
            raise ValueError("bit resolution must be non-negative")
        if np.any((conf != 0) & (conf != 1)):
            raise ValueError("configurable flags must be 0 or 1")
        if np.any((bits > 0) & (conf == 0)):
            raise ValueError("an unconfigurable polarization must have bit resolution 0")
        for k, pol in enumerate(POLARIZATIONS):
            if not self.polarization.indicator(pol) and np.any(conf[:, k]):
                raise ValueError(f"cells configurable in {pol!r} but the surface polarization excludes it")
        if not self.device_class.is_varactor and np.any((conf == 1) & (bits == 0)):
            raise ValueError(
                f"{self.device_class.value} cells need at least one bit in each configurable polarization"
            )
        if bits.max() > 62:
            raise ValueError("bit resolution above 62 is not supported")
        for attr in ("controller_power", "pin_on_bit_power", "switch_cell_power"):
            if not getattr(self, attr) >= 0:
                raise ValueError(f"{attr} must be non-negative")

    @classmethod
    def from_cells(cls, cells: Sequence[UnitCellSpec], **kwargs) -> "RisHardwareSpec":
        bits = [(c.bits_v, c.bits_h) for c in cells]
        conf = [(c.configurable_v, c.configurable_h) for c in cells]
        return cls(bits=np.reshape(bits, (-1, 2)), configurable=np.reshape(conf, (-1, 2)), **kwargs)

    @property
    def n_cells(self) -> int:
        return self.bits.shape[0]

    @property
    def cells(self) -> tuple[UnitCellSpec, ...]:
        return tuple(UnitCellSpec(int(b[0]), int(b[1]), int(c[0]), int(c[1]))
                     for b, c in zip(self.bits, self.configurable))

    @cached_property
    def uniform_bits(self) -> int | None:
        """Common bit resolution of all configurable entries, or None if mixed."""
        active = self.bits[self.configurable == 1]
        if active.size == 0:
            return 0
        b = int(active[0])
        return b if np.all(active == b) else None

    @cached_property
    def max_states(self) -> np.ndarray:
        """``2**B`` per cell and polarization (1 where unconfigurable)."""
        m = np.left_shift(np.int64(1), self.bits)
        m.setflags(write=False)
        return m


@dataclass(frozen=True, eq=False)
class CodingState:
    """State index per cell and polarization, shape ``(N, 2)``."""

    states: np.ndarray

    def __post_init__(self):
        s = _frozen(self.states)
        if s.ndim != 2 or s.shape[1] != 2:
            raise ValueError("coding states must have shape (N, 2)")
        if np.any(s < 0):
            raise ValueError("state indices must be non-negative")
        object.__setattr__(self, "states", s)

    @property
    def n_cells(self) -> int:
        return self.states.shape[0]

    @classmethod
    def from_columns(cls, v: Iterable[int], h: Iterable[int] | None = None) -> "CodingState":
        v = np.asarray(list(v), dtype=np.int64)
        h = np.zeros_like(v) if h is None else np.asarray(list(h), dtype=np.int64)
        if v.shape != h.shape:
            raise ValueError("vertical and horizontal state columns differ in length")
        return cls(np.column_stack([v, h]))

    @classmethod
    def zeros(cls, n_cells: int) -> "CodingState":
        return cls(np.zeros((n_cells, 2), dtype=np.int64))

    @classmethod
    def all_ones(cls, spec: RisHardwareSpec) -> "CodingState":
        """Every configurable bit set to 1."""
        return cls(spec.max_states - 1)

    def __eq__(self, other):
        if not isinstance(other, CodingState):
            return NotImplemented
        return np.array_equal(self.states, other.states)

    __hash__ = None


@dataclass(frozen=True)
class PowerBreakdown:
    """Power split in watts. ``total`` is always the plain sum of the parts."""

    controller: float
    drive_circuits: float
    units: float
    total: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total", self.controller + self.drive_circuits + self.units)

    @property
    def static(self) -> float:
        return self.controller + self.drive_circuits


def popcount(a) -> np.ndarray:
    return np.bitwise_count(np.asarray(a, dtype=np.uint64)).astype(np.int64)


def _pol_index(pol: str) -> int:
    try:
        return _POL_INDEX[pol]
    except KeyError:
        raise ValueError(f"polarization must be 'v' or 'h', got {pol!r}") from None


def control_signal_count(spec: RisHardwareSpec, pol: str) -> int:
    """Number of control signals ``N_c`` needed in one polarization.

    PIN-diode and RF-switch cells need one signal per bit; a varactor needs
    one per configurable cell regardless of how many levels it holds.
    """
    k = _pol_index(pol)
    if not spec.polarization.indicator(pol):
        return 0
    if spec.device_class.is_varactor:
        return int(spec.configurable[:, k].sum())
    return int(spec.bits[:, k].sum())


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def drive_circuit_count(spec: RisHardwareSpec) -> int:
    n_s = spec.drive.signals_per_circuit
    total = 0
    for k, pol in enumerate(POLARIZATIONS):
        if not spec.polarization.indicator(pol):
            continue
        n_g = spec.group_size[k]
        if n_g < 1 or n_s < 1:
            raise ValueError("group size and signals per circuit must be positive")
        # ceiling per polarization, never on the sum
        total += _ceil_div(control_signal_count(spec, pol), n_g * n_s)
    return total


def drive_power(spec: RisHardwareSpec) -> float:
    return drive_circuit_count(spec) * spec.drive.rated_power


def static_power(spec: RisHardwareSpec) -> float:
    return spec.controller_power + drive_power(spec)


def unit_cell_power(bit_resolution: int, on_bits: int, pin_on_bit_power: float) -> float:
    """Power of one PIN-diode cell in one polarization with ``on_bits`` bits set."""
    if on_bits < 0 or on_bits > bit_resolution:
        raise ValueError(f"on_bits={on_bits} outside [0, {bit_resolution}]")
    return on_bits * pin_on_bit_power


def check_coding(spec: RisHardwareSpec, coding: CodingState) -> None:
    if coding.n_cells != spec.n_cells:
        raise ValueError(f"coding has {coding.n_cells} cells, spec has {spec.n_cells}")
    bad = coding.states >= spec.max_states
    if np.any(bad):
        i, k = np.argwhere(bad)[0]
        raise ValueError(
            f"cell {i} polarization {POLARIZATIONS[k]!r}: state {coding.states[i, k]} "
            f"exceeds {spec.bits[i, k]}-bit range"
        )


def on_bit_count(spec: RisHardwareSpec, coding: CodingState) -> int:
    """Total number of bits encoded as 1 over all cells and polarizations."""
    check_coding(spec, coding)
    return int(popcount(coding.states).sum())


def units_power(spec: RisHardwareSpec, coding: CodingState) -> float:
    check_coding(spec, coding)
    cls = spec.device_class
    if cls is DeviceClass.PIN_DIODE:
        return int(popcount(coding.states).sum()) * spec.pin_on_bit_power
    if cls is DeviceClass.RF_SWITCH:
        # charged per configurable polarization, whatever the coding
        return int(spec.configurable.sum()) * spec.switch_cell_power
    return 0.0


def total_power(spec: RisHardwareSpec, coding: CodingState) -> PowerBreakdown:
    return PowerBreakdown(
        controller=spec.controller_power,
        drive_circuits=drive_power(spec),
        units=units_power(spec, coding),
    )


def make_uniform_spec(
    device_class: DeviceClass,
    polarization: PolarizationMode,
    n_cells: int,
    bit_resolution: int,
    group_size: int,
    drive: DriveCircuitSpec,
    controller_power: float,
    *,
    pin_on_bit_power: float = 0.0,
    switch_cell_power: float = 0.0,
    name: str = "",
) -> RisHardwareSpec:
    """Build a spec with ``n_cells`` identical cells.

    Varactor cells may use ``bit_resolution=0`` (continuous bias); PIN-diode
    and RF-switch cells need at least one bit.
    """
    if n_cells < 1:
        raise ValueError("n_cells must be at least 1")
    if bit_resolution < 0:
        raise ValueError("bit_resolution must be non-negative")
    if bit_resolution == 0 and not device_class.is_varactor:
        raise ValueError(f"{device_class.value} cells need bit_resolution >= 1")
    ind = np.array([polarization.i_v, polarization.i_h], dtype=np.int64)
    conf = np.tile(ind, (n_cells, 1))
    return RisHardwareSpec(
        device_class=device_class,
        polarization=polarization,
        bits=conf * bit_resolution,
        configurable=conf,
        group_size=(group_size, group_size),
        drive=drive,
        controller_power=controller_power,
        pin_on_bit_power=pin_on_bit_power,
        switch_cell_power=switch_cell_power,
        name=name,
    )


def static_power_concise(
    device_class: DeviceClass,
    polarization: PolarizationMode,
    n_cells: int,
    bit_resolution: int,
    group_size: int,
    drive: DriveCircuitSpec,
    controller_power: float,
) -> float:
    """Closed-form static power for a surface of identical cells."""
    per_pol = n_cells if device_class.is_varactor else bit_resolution * n_cells
    n_drive = polarization.count * _ceil_div(per_pol, group_size * drive.signals_per_circuit)
    return controller_power + n_drive * drive.rated_power


def units_power_concise(
    device_class: DeviceClass,
    polarization: PolarizationMode,
    on_bits: Sequence[int] | np.ndarray,
    *,
    pin_on_bit_power: float = 0.0,
    switch_cell_power: float = 0.0,
) -> float:
    """Closed-form unit-cell power for identical cells coded alike in each polarization.

    ``on_bits`` holds the ON-bit count of every cell in one polarization.
    """
    on_bits = np.asarray(on_bits, dtype=np.int64)
    if device_class is DeviceClass.PIN_DIODE:
        return polarization.count * int(on_bits.sum()) * pin_on_bit_power
    if device_class is DeviceClass.RF_SWITCH:
        return polarization.count * on_bits.size * switch_cell_power
    return 0.0
