import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rispower import fixtures
from rispower.model import (
    DUAL,
    HORIZONTAL,
    VERTICAL,
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
    on_bit_count,
    static_power,
    static_power_concise,
    total_power,
    unit_cell_power,
    units_power,
    units_power_concise,
)


# --- independent oracles -------------------------------------------------

def oracle_on_bits(states):
    return sum(bin(int(s)).count("1") for s in np.ravel(states))


def oracle_drive_circuits(spec):
    """Fill circuits signal by signal, one polarization at a time."""
    total = 0
    for k, pol in enumerate("vh"):
        if not spec.polarization.indicator(pol):
            continue
        if spec.device_class.is_varactor:
            wires = int(sum(spec.configurable[:, k]))
        else:
            wires = int(sum(spec.bits[:, k]))
        signals = 0
        shared = 0
        for _ in range(wires):
            if shared == 0:
                signals += 1
            shared = (shared + 1) % spec.group_size[k]
        circuits = 0
        used = 0
        for _ in range(signals):
            if used == 0:
                circuits += 1
            used = (used + 1) % spec.drive.signals_per_circuit
        total += circuits
    return total


# --- types ---------------------------------------------------------------

def test_polarization_modes():
    assert DUAL.count == 2 and VERTICAL.count == 1 and HORIZONTAL.count == 1
    assert PolarizationMode.parse("dual") == DUAL
    assert PolarizationMode.parse("H") == HORIZONTAL
    with pytest.raises(ValueError):
        PolarizationMode(0, 0)
    with pytest.raises(ValueError):
        PolarizationMode(2, 0)


def test_device_class_parse():
    assert DeviceClass.parse("pin") is DeviceClass.PIN_DIODE
    assert DeviceClass.parse("rf_switch") is DeviceClass.RF_SWITCH
    assert DeviceClass.parse("vdiscrete") is DeviceClass.VARACTOR_DISCRETE
    with pytest.raises(ValueError, match="unknown device class"):
        DeviceClass.parse("mems")


def test_drive_spec_invariants():
    with pytest.raises(ValueError):
        DriveCircuitSpec(0, 1.0)
    with pytest.raises(ValueError):
        DriveCircuitSpec(8, -1.0)


def test_unit_cell_invariant():
    with pytest.raises(ValueError):
        UnitCellSpec(bits_v=1, configurable_v=0)
    UnitCellSpec(bits_v=0, configurable_v=1)  # continuous varactor cell


def test_spec_rejects_cells_in_excluded_polarization():
    with pytest.raises(ValueError, match="excludes"):
        RisHardwareSpec(DeviceClass.PIN_DIODE, VERTICAL, [[1, 1]], [[1, 1]], 1,
                        DriveCircuitSpec(8, 0.0), 1.0)


def test_spec_arrays_are_read_only(pin_spec):
    with pytest.raises(ValueError):
        pin_spec.bits[0, 0] = 5


def test_from_cells_round_trip(pin_spec):
    rebuilt = RisHardwareSpec.from_cells(
        pin_spec.cells, device_class=pin_spec.device_class, polarization=pin_spec.polarization,
        group_size=pin_spec.group_size, drive=pin_spec.drive, controller_power=pin_spec.controller_power,
        pin_on_bit_power=pin_spec.pin_on_bit_power)
    assert np.array_equal(rebuilt.bits, pin_spec.bits)
    assert static_power(rebuilt) == static_power(pin_spec)


def test_power_breakdown_total_is_sum():
    b = PowerBreakdown(4.8, 2.24e-3, 0.1)
    assert b.total == 4.8 + 2.24e-3 + 0.1
    assert b.static == 4.8 + 2.24e-3


# --- control_signal_count ------------------------------------------------

def test_control_signals_ris1():
    assert control_signal_count(fixtures.load_spec("ris1"), "v") == 256


def test_control_signals_unconfigurable_polarization():
    assert control_signal_count(fixtures.load_spec("ris1"), "h") == 0


def test_control_signals_ris4():
    spec = fixtures.load_spec("ris4")
    assert control_signal_count(spec, "v") == sum(2 for _ in range(64)) == 128


def test_control_signals_varactor_counts_cells():
    spec = make_uniform_spec(DeviceClass.VARACTOR_DISCRETE, DUAL, 20, 3, 1, DriveCircuitSpec(1, 0.1), 1.0)
    assert control_signal_count(spec, "v") == 20
    assert control_signal_count(spec, "h") == 20


def test_control_signals_bad_pol(pin_spec):
    with pytest.raises(ValueError):
        control_signal_count(pin_spec, "x")


# --- drive_circuit_count -------------------------------------------------

@pytest.mark.parametrize("name, expected", [("ris1", 32), ("ris5", 4), ("ris6", 1)])
def test_drive_circuits_fixtures(name, expected):
    spec = fixtures.load_spec(name)
    assert drive_circuit_count(spec) == expected == oracle_drive_circuits(spec)


def test_drive_circuits_remainder():
    spec = make_uniform_spec(DeviceClass.PIN_DIODE, VERTICAL, 9, 1, 1, DriveCircuitSpec(8, 0.0), 0.0)
    assert drive_circuit_count(spec) == 2


def test_ceiling_per_polarization_not_on_sum():
    # 9 signals per polarization, 8 per circuit: 2 + 2, not ceil(18 / 8) = 3
    spec = make_uniform_spec(DeviceClass.PIN_DIODE, DUAL, 9, 1, 1, DriveCircuitSpec(8, 0.0), 0.0)
    assert drive_circuit_count(spec) == 4


def test_group_size_per_polarization():
    spec = RisHardwareSpec(DeviceClass.PIN_DIODE, DUAL, np.ones((16, 2)), np.ones((16, 2)), (1, 4),
                           DriveCircuitSpec(2, 1.0), 0.0)
    assert drive_circuit_count(spec) == 8 + 2 == oracle_drive_circuits(spec)


def test_group_size_zero_rejected():
    with pytest.raises(ValueError):
        make_uniform_spec(DeviceClass.PIN_DIODE, VERTICAL, 4, 1, 0, DriveCircuitSpec(8, 0.0), 0.0)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 300), b=st.integers(1, 4), g=st.integers(1, 40), s=st.integers(1, 80),
       pol=st.sampled_from([VERTICAL, HORIZONTAL, DUAL]),
       cls=st.sampled_from(list(DeviceClass)))
def test_drive_circuits_against_oracle(n, b, g, s, pol, cls):
    spec = make_uniform_spec(cls, pol, n, b, g, DriveCircuitSpec(s, 0.0), 0.0)
    count = drive_circuit_count(spec)
    assert count == oracle_drive_circuits(spec)
    for p in "vh":
        if pol.indicator(p):
            per_pol = math.ceil(control_signal_count(spec, p) / (g * s))
            assert per_pol * g * s >= control_signal_count(spec, p)


@given(g=st.integers(1, 16), s=st.integers(1, 16), n=st.integers(1, 200))
def test_drive_circuits_non_decreasing_in_cells(g, s, n):
    drive = DriveCircuitSpec(s, 0.0)
    a = make_uniform_spec(DeviceClass.PIN_DIODE, VERTICAL, n, 1, g, drive, 0.0)
    b = make_uniform_spec(DeviceClass.PIN_DIODE, VERTICAL, n + 1, 1, g, drive, 0.0)
    assert drive_circuit_count(b) >= drive_circuit_count(a)


# --- static_power --------------------------------------------------------

def test_static_power_ris1():
    assert static_power(fixtures.load_spec("ris1")) == pytest.approx(4.80224, abs=1e-9)


def test_static_power_ris5():
    spec = fixtures.load_spec("ris5")
    assert static_power(spec) - spec.controller_power == pytest.approx(1.72, abs=1e-12)


def test_static_power_no_configurable_cells():
    spec = RisHardwareSpec(DeviceClass.PIN_DIODE, VERTICAL, np.zeros((5, 2)), np.zeros((5, 2)), 1,
                           DriveCircuitSpec(8, 1.0), 3.3)
    assert drive_circuit_count(spec) == 0
    assert static_power(spec) == 3.3


# --- unit_cell_power -----------------------------------------------------

def test_unit_cell_power_values():
    # 1.25 mW is itself rounded to 0.01 mW, so twice it carries +-0.01 mW
    assert unit_cell_power(2, 2, 1.25e-3) == pytest.approx(2.49e-3, abs=0.015e-3)
    assert unit_cell_power(1, 0, 5.0) == 0
    assert unit_cell_power(2, 1, 1.25e-3) == 1.25e-3


@pytest.mark.parametrize("b", [-1, 3])
def test_unit_cell_power_range(b):
    with pytest.raises(ValueError):
        unit_cell_power(2, b, 1e-3)


# --- units_power / total_power -------------------------------------------

def test_units_power_ris2_all_on():
    spec = fixtures.load_spec("ris2")
    p = units_power(spec, CodingState.all_ones(spec))
    assert p == pytest.approx(7200 * 12.56e-3, rel=1e-12)
    assert p == pytest.approx(90.4, abs=0.05)


def test_units_power_varactor_zero(rng):
    spec = make_uniform_spec(DeviceClass.VARACTOR_DISCRETE, VERTICAL, 30, 3, 1, DriveCircuitSpec(1, 0.2), 1.5)
    for _ in range(5):
        assert units_power(spec, CodingState.from_columns(rng.integers(0, 8, 30))) == 0.0
    ris5 = fixtures.load_spec("ris5")
    assert units_power(ris5, CodingState.zeros(ris5.n_cells)) == 0.0


def test_units_power_rf_switch(rng):
    spec = fixtures.load_spec("ris6")
    for coding in (CodingState.zeros(64), CodingState.all_ones(spec),
                   CodingState.from_columns(rng.integers(0, 2, 64))):
        assert units_power(spec, coding) == pytest.approx(31.68e-3, rel=1e-12)


def test_units_power_rf_switch_dual_counts_both():
    spec = make_uniform_spec(DeviceClass.RF_SWITCH, DUAL, 64, 1, 1, DriveCircuitSpec(75, 0.24), 4.8,
                             switch_cell_power=495e-6)
    assert units_power(spec, CodingState.zeros(64)) == pytest.approx(2 * 31.68e-3, rel=1e-12)


def test_total_ris3():
    spec = fixtures.load_spec("ris3")
    assert total_power(spec, CodingState.all_ones(spec)).total == pytest.approx(12.66, abs=10e-3)
    assert total_power(spec, CodingState.zeros(512)).total == pytest.approx(6.52, abs=10e-3)


def test_total_column_vs_random(rng):
    spec = fixtures.load_spec("ris3")
    col = np.zeros(512, dtype=int)
    col[:32] = 1
    rnd = np.zeros(512, dtype=int)
    rnd[rng.choice(512, 32, replace=False)] = 1
    a = total_power(spec, CodingState.from_columns(col)).total
    b = total_power(spec, CodingState.from_columns(rnd)).total
    assert a == b


def test_units_power_dimension_mismatch(pin_spec):
    with pytest.raises(ValueError, match="cells"):
        units_power(pin_spec, CodingState.zeros(3))


def test_units_power_state_out_of_range(pin_spec):
    states = np.zeros(10, dtype=int)
    states[4] = 4  # 2-bit cell holds 0..3
    with pytest.raises(ValueError, match="cell 4"):
        units_power(pin_spec, CodingState.from_columns(states))


def test_units_power_state_in_unconfigured_polarization(pin_spec):
    with pytest.raises(ValueError):
        units_power(pin_spec, CodingState.from_columns(np.zeros(10), np.ones(10)))


@settings(max_examples=50, deadline=None)
@given(data=st.data())
def test_pin_units_power_matches_popcount_oracle(data):
    n = data.draw(st.integers(1, 40))
    bits = data.draw(st.lists(st.integers(0, 5), min_size=n, max_size=n))
    states = [data.draw(st.integers(0, (1 << b) - 1)) for b in bits]
    bits_arr = np.column_stack([bits, np.zeros(n, dtype=int)])
    spec = RisHardwareSpec(DeviceClass.PIN_DIODE, VERTICAL, bits_arr, (bits_arr > 0).astype(int), 1,
                           DriveCircuitSpec(8, 0.0), 0.0, pin_on_bit_power=3e-3)
    coding = CodingState.from_columns(states)
    assert on_bit_count(spec, coding) == oracle_on_bits(states)
    assert units_power(spec, coding) == oracle_on_bits(states) * 3e-3


# --- invariants ----------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_additivity(data):
    cls = data.draw(st.sampled_from(list(DeviceClass)))
    pol = data.draw(st.sampled_from([VERTICAL, HORIZONTAL, DUAL]))
    n = data.draw(st.integers(1, 50))
    b = data.draw(st.integers(1, 3))
    spec = make_uniform_spec(cls, pol, n, b, data.draw(st.integers(1, 4)),
                             DriveCircuitSpec(data.draw(st.integers(1, 16)), 0.07e-3), 4.8,
                             pin_on_bit_power=0.01, switch_cell_power=495e-6)
    states = data.draw(st.lists(st.integers(0, (1 << b) - 1), min_size=n, max_size=n))
    col = np.array(states)
    coding = CodingState(np.column_stack([col * pol.i_v, col * pol.i_h]))
    bd = total_power(spec, coding)
    assert bd.total == bd.controller + bd.drive_circuits + bd.units
    assert bd.controller + bd.drive_circuits == static_power(spec)


def test_monotonic_single_bit_flip(pin_spec, rng):
    states = rng.integers(0, 4, 10)
    base = CodingState.from_columns(states)
    for i in range(10):
        for bit in (1, 2):
            if states[i] & bit:
                continue
            flipped = states.copy()
            flipped[i] |= bit
            new = CodingState.from_columns(flipped)
            assert on_bit_count(pin_spec, new) == on_bit_count(pin_spec, base) + 1
            delta = units_power(pin_spec, new) - units_power(pin_spec, base)
            assert delta == pytest.approx(pin_spec.pin_on_bit_power, rel=1e-9)


def test_polarization_linearity(rng):
    drive = DriveCircuitSpec(8, 0.0)
    single = make_uniform_spec(DeviceClass.PIN_DIODE, VERTICAL, 50, 2, 1, drive, 0.0, pin_on_bit_power=1.25e-3)
    dual = make_uniform_spec(DeviceClass.PIN_DIODE, DUAL, 50, 2, 1, drive, 0.0, pin_on_bit_power=1.25e-3)
    s = rng.integers(0, 4, 50)
    assert units_power(dual, CodingState.from_columns(s, s)) == 2 * units_power(single, CodingState.from_columns(s))


@settings(max_examples=80, deadline=None)
@given(data=st.data())
def test_concise_equals_general(data):
    cls = data.draw(st.sampled_from(list(DeviceClass)))
    pol = data.draw(st.sampled_from([VERTICAL, HORIZONTAL, DUAL]))
    n = data.draw(st.integers(1, 200))
    b = data.draw(st.integers(0 if cls.is_varactor else 1, 4))
    g = data.draw(st.integers(1, 40))
    drive = DriveCircuitSpec(data.draw(st.integers(1, 80)), data.draw(st.floats(0, 1)))
    ctrl = data.draw(st.floats(0, 20))
    spec = make_uniform_spec(cls, pol, n, b, g, drive, ctrl, pin_on_bit_power=0.011, switch_cell_power=4e-4)
    assert static_power(spec) == static_power_concise(cls, pol, n, b, g, drive, ctrl)
    col = np.array(data.draw(st.lists(st.integers(0, (1 << b) - 1), min_size=n, max_size=n)))
    coding = CodingState(np.column_stack([col * pol.i_v, col * pol.i_h]))
    on_bits = [oracle_on_bits([c]) for c in col]
    assert units_power(spec, coding) == units_power_concise(
        cls, pol, on_bits, pin_on_bit_power=0.011, switch_cell_power=4e-4)


# --- make_uniform_spec ---------------------------------------------------

def test_make_uniform_ris1():
    spec = make_uniform_spec(DeviceClass.PIN_DIODE, VERTICAL, 256, 1, 1, DriveCircuitSpec(8, 0.07e-3), 4.8)
    assert spec.n_cells == 256 and spec.uniform_bits == 1
    assert drive_circuit_count(spec) == 32


def test_make_uniform_ris6():
    spec = make_uniform_spec(DeviceClass.RF_SWITCH, VERTICAL, 64, 1, 1, DriveCircuitSpec(75, 0.24), 4.8,
                             switch_cell_power=495e-6)
    assert drive_circuit_count(spec) == 1
    assert static_power(spec) == pytest.approx(5.04)


@pytest.mark.parametrize("kwargs", [
    dict(n_cells=1, bit_resolution=0),
    dict(n_cells=0, bit_resolution=1),
    dict(n_cells=4, bit_resolution=-1),
])
def test_make_uniform_rejects(kwargs):
    with pytest.raises(ValueError):
        make_uniform_spec(DeviceClass.PIN_DIODE, VERTICAL, group_size=1,
                          drive=DriveCircuitSpec(8, 0.0), controller_power=1.0, **kwargs)


def test_make_uniform_varactor_continuous_allows_zero_bits():
    spec = make_uniform_spec(DeviceClass.VARACTOR_CONTINUOUS, VERTICAL, 128, 0, 32, DriveCircuitSpec(1, 0.43), 0.0)
    assert control_signal_count(spec, "v") == 128


def test_device_powers_ignored_for_other_classes():
    drive = DriveCircuitSpec(1, 0.43)
    a = make_uniform_spec(DeviceClass.VARACTOR_CONTINUOUS, VERTICAL, 8, 0, 1, drive, 1.0)
    b = make_uniform_spec(DeviceClass.VARACTOR_CONTINUOUS, VERTICAL, 8, 0, 1, drive, 1.0,
                          pin_on_bit_power=5.0, switch_cell_power=7.0)
    assert total_power(a, CodingState.zeros(8)) == total_power(b, CodingState.zeros(8))
