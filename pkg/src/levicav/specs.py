"""Typed descriptions of the physical system.

Each spec is a frozen dataclass holding SI values (angular frequencies in
rad/s) and validating its own invariants on construction. ``system_from_dict``
builds a full :class:`SystemSpec` from the nested dict form used by config
files, converting laboratory units on the way in.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .constants import CODATA
from .errors import ConfigError, PhysicsError
from .units import ingest

_DEFAULT_GAS_MASS = 28.97 * CODATA.m0   # mean air molecule, kg
_DEFAULT_CSL_LENGTH = 100e-9            # conventional correlation length, m


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


@dataclass(frozen=True)
class NanosphereSpec:
    """Dielectric sphere: radius (m), mass density (kg/m^3), relative permittivity."""

    radius: float
    density: float
    permittivity: float

    def __post_init__(self):
        _require(self.radius > 0, f"sphere.radius must be > 0, got {self.radius}")
        _require(self.density > 0, f"sphere.density must be > 0, got {self.density}")
        _require(self.permittivity > 1,
                 f"sphere.permittivity must be > 1, got {self.permittivity}")


@dataclass(frozen=True)
class CavitySpec:
    """Fabry-Perot cavity: length, mirror curvature radius, finesse, wavelength (m)."""

    length: float
    mirror_radius: float
    finesse: float
    wavelength: float

    def __post_init__(self):
        _require(self.length > 0, f"cavity.length must be > 0, got {self.length}")
        _require(self.mirror_radius > 0,
                 f"cavity.mirror_radius must be > 0, got {self.mirror_radius}")
        _require(self.finesse > 0, f"cavity.finesse must be > 0, got {self.finesse}")
        _require(self.wavelength > 0,
                 f"cavity.wavelength must be > 0, got {self.wavelength}")
        # beyond the concentric point the Gaussian mode has no real waist
        if self.length >= 2 * self.mirror_radius:
            raise PhysicsError(
                f"cavity.length = {self.length} is at or beyond the concentric "
                f"limit 2*mirror_radius = {2 * self.mirror_radius}"
            )


@dataclass(frozen=True)
class TrapSpec:
    """Optical tweezer forming the trap.

    Exactly one of ``power`` (W) and ``frequency`` (trap angular frequency,
    rad/s) is given; the other is derived. ``wavelength`` defaults to the
    cavity wavelength when omitted.
    """

    numerical_aperture: float
    power: float | None = None
    frequency: float | None = None
    wavelength: float | None = None

    def __post_init__(self):
        _require(0 < self.numerical_aperture <= 1,
                 f"trap.numerical_aperture must be in (0, 1], got {self.numerical_aperture}")
        given = [name for name, v in (("power", self.power), ("frequency", self.frequency))
                 if v is not None]
        _require(len(given) == 1,
                 f"trap: exactly one of power and frequency must be set, got {given or 'neither'}")
        if self.power is not None:
            _require(self.power > 0, f"trap.power must be > 0, got {self.power}")
        if self.frequency is not None:
            _require(self.frequency > 0,
                     f"trap.frequency must be > 0, got {self.frequency}")
        if self.wavelength is not None:
            _require(self.wavelength > 0,
                     f"trap.wavelength must be > 0, got {self.wavelength}")


@dataclass(frozen=True)
class DriveSpec:
    """Cavity drive: detuning as Delta/kappa, coupling as G/kappa or input power (W).

    Exactly one of ``coupling_ratio`` and ``power`` is given. A zero coupling
    (undriven cavity) is allowed; it is the vacuum-limit reference.
    """

    detuning_ratio: float
    coupling_ratio: float | None = None
    power: float | None = None

    def __post_init__(self):
        _require(self.detuning_ratio > 0,
                 f"drive.detuning_ratio must be > 0, got {self.detuning_ratio}")
        given = [name for name, v in (("coupling_ratio", self.coupling_ratio),
                                      ("power", self.power)) if v is not None]
        _require(len(given) == 1,
                 f"drive: exactly one of coupling_ratio and power must be set, "
                 f"got {given or 'neither'}")
        if self.coupling_ratio is not None:
            _require(self.coupling_ratio >= 0,
                     f"drive.coupling_ratio must be >= 0, got {self.coupling_ratio}")
        if self.power is not None:
            _require(self.power >= 0, f"drive.power must be >= 0, got {self.power}")


@dataclass(frozen=True)
class EnvironmentSpec:
    """Residual gas: temperature (K), pressure (Pa), molecular mass (kg)."""

    temperature: float
    pressure: float
    gas_mass: float = _DEFAULT_GAS_MASS

    def __post_init__(self):
        _require(self.temperature > 0,
                 f"environment.temperature must be > 0, got {self.temperature}")
        _require(self.pressure >= 0,
                 f"environment.pressure must be >= 0, got {self.pressure}")
        _require(self.gas_mass > 0,
                 f"environment.gas_mass must be > 0, got {self.gas_mass}")


@dataclass(frozen=True)
class CslSpec:
    """Continuous spontaneous localization: collapse rate (1/s), correlation length (m)."""

    rate: float
    correlation_length: float = _DEFAULT_CSL_LENGTH
    enabled: bool = True

    def __post_init__(self):
        _require(self.rate >= 0, f"csl.rate must be >= 0, got {self.rate}")
        _require(self.correlation_length > 0,
                 f"csl.correlation_length must be > 0, got {self.correlation_length}")


@dataclass(frozen=True)
class SystemSpec:
    """Complete description of one experimental configuration."""

    sphere: NanosphereSpec
    cavity: CavitySpec
    trap: TrapSpec
    drive: DriveSpec
    environment: EnvironmentSpec
    csl: CslSpec

    def with_csl_enabled(self, enabled: bool) -> "SystemSpec":
        return replace(self, csl=replace(self.csl, enabled=enabled))


# ---------------------------------------------------------------------------
# dict ingestion (config files)

def _take(section: dict, name: str, fields: dict) -> dict:
    """Pull known fields out of one config section; reject unknown keys."""
    extra = set(section) - set(fields)
    if extra:
        raise ConfigError(f"{name}: unknown key(s) {sorted(extra)}")
    out = {}
    for key, (attr, kind, required) in fields.items():
        if key in section:
            if kind == "bool":
                val = section[key]
                if not isinstance(val, bool):
                    raise ConfigError(f"{name}.{key}: expected true/false, got {val!r}")
                out[attr] = val
            else:
                out[attr] = ingest(section[key], f"{name}.{key}", kind)
        elif required:
            raise ConfigError(f"{name}: missing required key {key!r}")
    return out


def system_from_dict(raw: dict) -> SystemSpec:
    """Build a SystemSpec from the nested dict used by config files."""
    if not isinstance(raw, dict):
        raise ConfigError(f"system: expected an object, got {type(raw).__name__}")
    known = {"sphere", "cavity", "trap", "drive", "environment", "csl"}
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"system: unknown section(s) {sorted(extra)}")
    missing = known - set(raw)
    if missing:
        raise ConfigError(f"system: missing section(s) {sorted(missing)}")

    sphere = NanosphereSpec(**_take(raw["sphere"], "sphere", {
        "radius": ("radius", "length", True),
        "density": ("density", "density", True),
        "permittivity": ("permittivity", "dimensionless", True),
    }))
    cavity = CavitySpec(**_take(raw["cavity"], "cavity", {
        "length": ("length", "length", True),
        "mirror_radius": ("mirror_radius", "length", True),
        "finesse": ("finesse", "dimensionless", True),
        "wavelength": ("wavelength", "length", True),
    }))
    trap = TrapSpec(**_take(raw["trap"], "trap", {
        "numerical_aperture": ("numerical_aperture", "dimensionless", True),
        "power": ("power", "power", False),
        "frequency": ("frequency", "frequency", False),
        "wavelength": ("wavelength", "length", False),
    }))
    drive = DriveSpec(**_take(raw["drive"], "drive", {
        "detuning_ratio": ("detuning_ratio", "dimensionless", True),
        "coupling_ratio": ("coupling_ratio", "dimensionless", False),
        "power": ("power", "power", False),
    }))
    environment = EnvironmentSpec(**_take(raw["environment"], "environment", {
        "temperature": ("temperature", "temperature", True),
        "pressure": ("pressure", "pressure", True),
        "gas_mass": ("gas_mass", "mass", False),
    }))
    csl = CslSpec(**_take(raw["csl"], "csl", {
        "rate": ("rate", "rate", True),
        "correlation_length": ("correlation_length", "length", False),
        "enabled": ("enabled", "bool", False),
    }))
    return SystemSpec(sphere=sphere, cavity=cavity, trap=trap, drive=drive,
                      environment=environment, csl=csl)
