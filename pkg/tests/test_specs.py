import dataclasses

import pytest

import levicav as lc
from levicav import ConfigError, PhysicsError


def make_raw():
    return {
        "sphere": {"radius": {"value": 100, "unit": "nm"},
                   "density": {"value": 3500, "unit": "kg/m^3"},
                   "permittivity": 5.76},
        "cavity": {"length": {"value": 1, "unit": "cm"},
                   "mirror_radius": {"value": 1, "unit": "cm"},
                   "finesse": 1e5,
                   "wavelength": {"value": 1064, "unit": "nm"}},
        "trap": {"numerical_aperture": 0.6, "frequency": {"value": 1, "unit": "kHz"}},
        "drive": {"detuning_ratio": 0.01, "coupling_ratio": 0.01},
        "environment": {"temperature": {"value": 1, "unit": "K"},
                        "pressure": {"value": 1e-10, "unit": "Torr"}},
        "csl": {"rate": {"value": 1e-8, "unit": "1/s"},
                "correlation_length": {"value": 100, "unit": "nm"}},
    }


def test_system_from_dict_builds_si_spec():
    system = lc.system_from_dict(make_raw())
    assert system.sphere.radius == pytest.approx(100e-9)
    assert system.cavity.length == pytest.approx(0.01)
    assert system.trap.frequency == pytest.approx(6283.185307179586)
    assert system.environment.pressure == pytest.approx(1e-10 * 133.322)
    assert system.csl.enabled is True


def test_unknown_keys_are_rejected_by_name():
    raw = make_raw()
    raw["sphere"]["color"] = "blue"
    with pytest.raises(ConfigError, match="color"):
        lc.system_from_dict(raw)
    raw = make_raw()
    raw["extra_section"] = {}
    with pytest.raises(ConfigError, match="extra_section"):
        lc.system_from_dict(raw)


def test_missing_section_and_key_are_rejected():
    raw = make_raw()
    del raw["cavity"]
    with pytest.raises(ConfigError, match="cavity"):
        lc.system_from_dict(raw)
    raw = make_raw()
    del raw["sphere"]["density"]
    with pytest.raises(ConfigError, match="density"):
        lc.system_from_dict(raw)


def test_trap_drive_exclusivity():
    with pytest.raises(ConfigError, match="exactly one"):
        lc.TrapSpec(numerical_aperture=0.6)
    with pytest.raises(ConfigError, match="exactly one"):
        lc.TrapSpec(numerical_aperture=0.6, power=1e-6, frequency=6283.0)
    with pytest.raises(ConfigError, match="exactly one"):
        lc.DriveSpec(detuning_ratio=0.01)
    with pytest.raises(ConfigError, match="exactly one"):
        lc.DriveSpec(detuning_ratio=0.01, coupling_ratio=0.01, power=1e-10)


def test_zero_coupling_is_allowed_but_zero_trap_is_not():
    drive = lc.DriveSpec(detuning_ratio=0.01, coupling_ratio=0.0)
    assert drive.coupling_ratio == 0.0
    with pytest.raises(ConfigError):
        lc.TrapSpec(numerical_aperture=0.6, frequency=0.0)
    with pytest.raises(ConfigError):
        lc.TrapSpec(numerical_aperture=0.6, power=0.0)


def test_value_range_validation():
    with pytest.raises(ConfigError):
        lc.NanosphereSpec(radius=-1e-9, density=3500, permittivity=5.76)
    with pytest.raises(ConfigError):
        lc.NanosphereSpec(radius=1e-7, density=3500, permittivity=1.0)
    with pytest.raises(ConfigError):
        lc.TrapSpec(numerical_aperture=1.5, frequency=6283.0)
    with pytest.raises(ConfigError):
        lc.EnvironmentSpec(temperature=0.0, pressure=1e-8)
    with pytest.raises(ConfigError):
        lc.CslSpec(rate=-1e-9)
    with pytest.raises(ConfigError):
        lc.DriveSpec(detuning_ratio=-0.01, coupling_ratio=0.01)


def test_concentric_limit_is_a_physics_error():
    with pytest.raises(PhysicsError, match="concentric"):
        lc.CavitySpec(length=0.021, mirror_radius=0.01, finesse=1e5, wavelength=1064e-9)
    # just inside the limit is fine
    lc.CavitySpec(length=0.0199, mirror_radius=0.01, finesse=1e5, wavelength=1064e-9)


def test_with_csl_enabled_only_touches_the_flag():
    system = lc.system_from_dict(make_raw())
    off = system.with_csl_enabled(False)
    assert off.csl.enabled is False
    assert off.csl.rate == system.csl.rate
    assert off.sphere == system.sphere
    assert dataclasses.replace(off, csl=system.csl) == system
