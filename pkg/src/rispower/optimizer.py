"""Global state-offset search that minimizes PIN-diode unit-cell power.

Adding the same offset (mod 2**B) to every state index shifts every phase
by the same amount, so relative phases across the aperture are kept while
the number of ON bits can drop.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import CodingState, DeviceClass, RisHardwareSpec, check_coding, popcount, units_power


@dataclass(frozen=True)
class OffsetResult:
    offset: int
    power_before: float
    power_after: float
    coding: CodingState

    @property
    def savings(self) -> float:
        return self.power_before - self.power_after


def _uniform_bits(spec: RisHardwareSpec) -> int:
    b = spec.uniform_bits
    if b is None:
        raise ValueError("global offsets need the same bit resolution in every configurable cell")
    return b


def _require_pin(spec: RisHardwareSpec) -> int:
    if spec.device_class is not DeviceClass.PIN_DIODE:
        raise ValueError(f"offset optimization applies to PIN-diode surfaces, not {spec.device_class.value}")
    return _uniform_bits(spec)


def apply_offset(coding: CodingState, offset: int, bit_resolution: int,
                 mask: np.ndarray | None = None) -> CodingState:
    """Shift every state by ``offset`` modulo ``2**bit_resolution``.

    ``mask`` limits the shift to configurable entries; by default every entry
    is shifted.
    """
    m = 1 << bit_resolution
    if not 0 <= offset < m:
        raise ValueError(f"offset {offset} outside [0, {m})")
    s = coding.states
    if np.any(s >= m):
        raise ValueError(f"coding has states outside the {bit_resolution}-bit range")
    shifted = (s + offset) % m
    if mask is not None:
        shifted = np.where(mask, shifted, s)
    return CodingState(shifted)


def apply_spec_offset(coding: CodingState, offset: int, spec: RisHardwareSpec) -> CodingState:
    return apply_offset(coding, offset, _uniform_bits(spec), mask=spec.configurable == 1)


def optimize_global_offset(coding: CodingState, spec: RisHardwareSpec) -> OffsetResult:
    """Offset with the lowest unit-cell power after shifting; ties go to the smallest offset.

    Works on the histogram of state indices, so the cost is ``O(4**B)``
    after one pass over the cells.
    """
    b = _require_pin(spec)
    check_coding(spec, coding)
    m = 1 << b
    active = coding.states[spec.configurable == 1]
    hist = np.bincount(active, minlength=m)
    states = np.arange(m)
    # on_bits[k] = sum_s hist[s] * popcount((s + k) mod m)
    shifted = (states[None, :] + states[:, None]) % m
    on_bits = (popcount(shifted) * hist[None, :]).sum(axis=1)
    p = spec.pin_on_bit_power
    # compare powers, not bit counts, so a zero P_PIN leaves the coding alone
    power = [int(n) * p for n in on_bits]
    best = min(range(m), key=power.__getitem__)
    return OffsetResult(
        offset=best,
        power_before=power[0],
        power_after=power[best],
        coding=apply_spec_offset(coding, best, spec),
    )


def brute_force_min_power(coding: CodingState, spec: RisHardwareSpec) -> OffsetResult:
    """Try every offset and evaluate the full unit-cell power model for each."""
    b = _require_pin(spec)
    before = units_power(spec, coding)
    best_k, best_p, best_c = 0, before, coding
    for k in range(1, 1 << b):
        c = apply_spec_offset(coding, k, spec)
        p = units_power(spec, c)
        if p < best_p:
            best_k, best_p, best_c = k, p, c
    return OffsetResult(offset=best_k, power_before=before, power_after=best_p, coding=best_c)
