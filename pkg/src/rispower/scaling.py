"""Simplified power-versus-size laws for single-polarization surfaces.

PIN diode (all cells ON, drive circuits neglected)::

    P = P_controller + N * P_pin

continuous varactor (one drive circuit per cell)::

    P = P_controller + N * P_drive

RF switch (drive and cells neglected)::

    P = P_controller
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .model import DeviceClass


@dataclass(frozen=True)
class ScalingAssumptions:
    controller_power: float = 4.8
    pin_on_bit_power: float = 0.01
    varactor_drive_power: float = 0.43

    def __post_init__(self):
        for name in ("controller_power", "pin_on_bit_power", "varactor_drive_power"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be non-negative")

    def per_cell_coefficient(self, device_class: DeviceClass) -> float:
        if device_class is DeviceClass.PIN_DIODE:
            return self.pin_on_bit_power
        if device_class is DeviceClass.VARACTOR_CONTINUOUS:
            return self.varactor_drive_power
        if device_class is DeviceClass.RF_SWITCH:
            return 0.0
        raise ValueError(
            "no simplified scaling law exists for discrete varactor surfaces; "
            "their drive power depends on the bias generator and must be modeled explicitly"
        )


DEFAULT_ASSUMPTIONS = ScalingAssumptions()


def simplified_total_power(device_class: DeviceClass, n: int,
                           assumptions: ScalingAssumptions = DEFAULT_ASSUMPTIONS) -> float:
    if n < 0:
        raise ValueError("cell count must be non-negative")
    coef = assumptions.per_cell_coefficient(device_class)
    return assumptions.controller_power + n * coef


class PowerCurve(NamedTuple):
    n: np.ndarray
    watts: np.ndarray


def power_curve(device_class: DeviceClass, n_values: Sequence[int],
                assumptions: ScalingAssumptions = DEFAULT_ASSUMPTIONS) -> PowerCurve:
    n = np.asarray(n_values, dtype=np.int64)
    if n.size == 0:
        raise ValueError("n_values must not be empty")
    if np.any(n < 0):
        raise ValueError("cell counts must be non-negative")
    # evaluated point by point so every entry matches simplified_total_power exactly
    watts = np.array([simplified_total_power(device_class, int(k), assumptions) for k in n])
    return PowerCurve(n, watts)


def crossover(class_a: DeviceClass, class_b: DeviceClass,
              assumptions: ScalingAssumptions = DEFAULT_ASSUMPTIONS,
              assumptions_b: ScalingAssumptions | None = None) -> int | None:
    """Smallest integer ``n >= 0`` at which the two curves stop being in their ``n = 0`` order.

    Curves that are equal at ``n = 0``, parallel, or diverging return None.
    The arithmetic runs on the decimal values of the inputs, so
    ``4.8 + 0.01 n = 6.0`` gives exactly 120.
    """
    if assumptions_b is None:
        if class_a is class_b:
            raise ValueError("crossover needs two distinct device classes or two assumption sets")
        assumptions_b = assumptions

    def exact(x: float) -> Fraction:
        return Fraction(repr(float(x)))

    a0 = exact(assumptions.controller_power)
    b0 = exact(assumptions_b.controller_power)
    ka = exact(assumptions.per_cell_coefficient(class_a))
    kb = exact(assumptions_b.per_cell_coefficient(class_b))
    d0 = a0 - b0
    dk = ka - kb
    if d0 == 0 or dk == 0:
        return None
    root = -d0 / dk
    if root <= 0:
        return None
    return math.ceil(root)
