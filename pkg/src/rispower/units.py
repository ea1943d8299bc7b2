"""Power quantities with engineering unit suffixes.

Everything inside the package is in watts. Strings such as ``"12.56mW"``,
``"495uW"`` or ``"4.8 W"`` are converted through :class:`decimal.Decimal` so
that ``"12660mW"`` and ``"12.66W"`` give the identical float.
"""

from __future__ import annotations

import re
from decimal import Decimal, InvalidOperation

# exponent of ten relative to watts
POWER_PREFIXES = {
    "": 0,
    "k": 3,
    "m": -3,
    "u": -6,
    "µ": -6,  # micro sign
    "μ": -6,  # greek small mu
    "n": -9,
}

_POWER_RE = re.compile(
    r"^\s*(?P<num>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*"
    r"(?P<unit>(?P<prefix>[kmunµμ]?)W)?\s*$"
)


class UnitError(ValueError):
    """Raised for a power string that cannot be parsed."""


def parse_power(text: str, *, require_unit: bool = False) -> float:
    """Parse a power string into watts.

    A bare number is taken as watts unless ``require_unit`` is set.
    """
    m = _POWER_RE.match(text)
    if m is None:
        raise UnitError(f"cannot parse power value {text!r}")
    if m.group("unit") is None and require_unit:
        raise UnitError(f"power value {text!r} needs a unit suffix (W, mW, uW, ...)")
    try:
        value = Decimal(m.group("num"))
    except InvalidOperation as exc:  # pragma: no cover - regex already filters
        raise UnitError(f"cannot parse power value {text!r}") from exc
    exp = POWER_PREFIXES[m.group("prefix") or ""]
    return float(value.scaleb(exp))


def format_power(watts: float) -> str:
    """Shortest round-trippable text for ``watts`` with a ``W`` suffix."""
    return f"{watts!r}W"


def human_power(watts: float, digits: int = 4) -> str:
    """Pick a readable prefix, e.g. ``0.03168`` -> ``'31.68 mW'``."""
    a = abs(watts)
    if a == 0 or a >= 1:
        return f"{watts:.{digits}g} W"
    if a >= 1e-3:
        return f"{watts * 1e3:.{digits}g} mW"
    if a >= 1e-6:
        return f"{watts * 1e6:.{digits}g} uW"
    return f"{watts * 1e9:.{digits}g} nW"
