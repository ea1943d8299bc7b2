"""Power consumption model for reconfigurable intelligent surfaces."""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    CodingState,
    DeviceClass,
    DriveCircuitSpec,
    PolarizationMode,
    PowerBreakdown,
    RisHardwareSpec,
    UnitCellSpec,
    control_signal_count,
    drive_circuit_count,
    make_uniform_spec,
    static_power,
    total_power,
    unit_cell_power,
    units_power,
)
