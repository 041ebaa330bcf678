"""Conversion of laboratory units to the SI values used internally.

Config files quote quantities the way experiments report them (Torr, mK, cm,
nm, kHz); internally everything is SI and every frequency-like quantity is
angular (rad/s). Quantities tagged with a frequency unit from the Hz family
are therefore multiplied by 2*pi on ingestion, while rad/s passes through.
"""

from __future__ import annotations

import math

from .constants import CODATA
from .errors import ConfigError

# unit -> multiplicative factor to SI; Hz-family handled separately below
_FACTORS = {
    "m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "nm": 1e-9,
    "Pa": 1.0, "mbar": 1e2,
    "Torr": CODATA.torr_to_pascal, "mTorr": 1e-3 * CODATA.torr_to_pascal,
    "K": 1.0, "mK": 1e-3,
    "W": 1.0, "mW": 1e-3, "uW": 1e-6, "nW": 1e-9,
    "kg": 1.0, "g": 1e-3, "amu": CODATA.m0,
    "kg/m^3": 1.0, "g/cm^3": 1e3,
    "rad/s": 1.0, "1/s": 1.0,
    "s": 1.0, "ms": 1e-3, "us": 1e-6,
    "": 1.0,
}

# Hz-family units: value is a cycle frequency, converted to angular on ingestion
_CYCLE_FACTORS = {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9}

# which units are acceptable for each physical dimension
_KIND_UNITS = {
    "length": {"m", "cm", "mm", "um", "nm"},
    "pressure": {"Pa", "mbar", "Torr", "mTorr"},
    "temperature": {"K", "mK"},
    "power": {"W", "mW", "uW", "nW"},
    "mass": {"kg", "g", "amu"},
    "density": {"kg/m^3", "g/cm^3"},
    "frequency": {"rad/s", "Hz", "kHz", "MHz", "GHz"},
    "rate": {"1/s"},
    "time": {"s", "ms", "us"},
    "dimensionless": {""},
}


def to_si(value: float, unit: str, key: str = "", kind: str | None = None) -> float:
    """Convert ``value`` expressed in ``unit`` to the internal SI value.

    ``key`` names the config entry in error messages; ``kind`` restricts the
    unit to one physical dimension (a temperature quoted in cm is rejected,
    not silently scaled).
    """
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{key or 'value'}: expected a number, got {value!r}")
    if kind is not None:
        allowed = _KIND_UNITS[kind]
        if unit not in allowed and not (unit == "" and value == 0):
            raise ConfigError(
                f"{key or 'value'}: unit {unit!r} is not a {kind} unit "
                f"(expected one of {sorted(u for u in allowed if u)})"
            )
    if unit in _CYCLE_FACTORS:
        return 2.0 * math.pi * _CYCLE_FACTORS[unit] * float(value)
    if unit in _FACTORS:
        return _FACTORS[unit] * float(value)
    raise ConfigError(f"{key or 'value'}: unknown unit {unit!r}")


def ingest(raw, key: str = "", kind: str | None = None) -> float:
    """Accept a bare number (already SI) or ``{"value": x, "unit": u}``."""
    if isinstance(raw, dict):
        extra = set(raw) - {"value", "unit"}
        if extra:
            raise ConfigError(f"{key or 'value'}: unexpected field(s) {sorted(extra)}")
        if "value" not in raw:
            raise ConfigError(f"{key or 'value'}: missing 'value'")
        return to_si(raw["value"], raw.get("unit", ""), key, kind)
    if kind == "dimensionless" or kind is None:
        return to_si(raw, "", key)
    # bare numbers for dimensional quantities are taken as SI (angular for frequencies)
    if not isinstance(raw, (int, float)) or isinstance(raw, bool):
        raise ConfigError(f"{key or 'value'}: expected a number, got {raw!r}")
    return float(raw)
