import numpy as np
import pytest

from rispower.model import (
    DUAL,
    VERTICAL,
    DeviceClass,
    DriveCircuitSpec,
    make_uniform_spec,
)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def pin_spec():
    """Small single-polarization 2-bit PIN surface."""
    return make_uniform_spec(DeviceClass.PIN_DIODE, VERTICAL, 10, 2, 1,
                             DriveCircuitSpec(8, 0.07e-3), 4.8, pin_on_bit_power=1.25e-3)


@pytest.fixture
def dual_pin_spec():
    return make_uniform_spec(DeviceClass.PIN_DIODE, DUAL, 12, 1, 1,
                             DriveCircuitSpec(8, 0.07e-3), 4.8, pin_on_bit_power=12.56e-3)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "ACCEPTANCE_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
