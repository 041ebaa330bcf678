"""Resolution of derived physical parameters from a system spec.

The chain goes cavity geometry -> trap optics -> optomechanical coupling ->
gas damping, and every step is an explicit closed-form inversion, so
``resolve`` is pure: the same spec always yields the bitwise-identical
parameter set.

All quantities are SI; frequencies are angular (rad/s). The quadratures are
normalized so the vacuum variance of each is 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import CODATA, Constants
from .specs import (CavitySpec, DriveSpec, EnvironmentSpec, NanosphereSpec,
                    SystemSpec, TrapSpec)


@dataclass(frozen=True)
class CavityParams:
    kappa: float      # amplitude decay rate, rad/s
    W0: float         # mode waist at center, m
    Vc: float         # mode volume, m^3
    omega_c: float    # resonance frequency, rad/s


@dataclass(frozen=True)
class TrapParams:
    Wt: float         # tweezer waist, m
    intensity: float  # focal intensity, W/m^2
    omega: float      # trap (mechanical) frequency, rad/s
    trap_power: float # tweezer power, W
    omega_Lt: float   # tweezer laser frequency, rad/s
    wavelength: float # tweezer wavelength actually used, m


@dataclass(frozen=True)
class CouplingParams:
    m: float            # sphere mass, kg
    Vs: float           # sphere volume, m^3
    eps_c: float        # 3(eps-1)/(eps+2)
    g: float            # single-photon coupling, rad/s
    alpha: float        # intracavity amplitude (sqrt photons)
    n_ph: float         # intracavity photon number
    G: float            # linearized coupling g*alpha, rad/s
    drive_power: float  # input power, W
    Delta: float        # detuning, rad/s
    omega_L: float      # drive laser frequency, rad/s


@dataclass(frozen=True)
class GasParams:
    gamma: float  # momentum damping rate, 1/s
    vbar: float   # mean thermal gas speed, m/s


@dataclass(frozen=True)
class DerivedParams:
    """Flat bundle of everything downstream code needs."""

    kappa: float
    W0: float
    Vc: float
    omega_c: float
    Wt: float
    intensity: float
    omega: float
    trap_power: float
    omega_Lt: float
    trap_wavelength: float
    m: float
    Vs: float
    eps_c: float
    g: float
    alpha: float
    n_ph: float
    G: float
    drive_power: float
    Delta: float
    omega_L: float
    gamma: float
    vbar: float


def coupling_strength(permittivity: float) -> float:
    """Dielectric response factor eps_c = 3(eps - 1)/(eps + 2)."""
    return 3.0 * (permittivity - 1.0) / (permittivity + 2.0)


def derive_cavity(cavity: CavitySpec, constants: Constants = CODATA) -> CavityParams:
    """Linewidth, waist, mode volume, and resonance of the cavity mode."""
    kappa = math.pi * constants.c / (2.0 * cavity.finesse * cavity.length)
    # symmetric two-mirror resonator; the argument under the sqrt is
    # positive because CavitySpec enforces L < 2 R_c
    W0 = math.sqrt(cavity.wavelength * cavity.length
                   * math.sqrt(2.0 * cavity.mirror_radius / cavity.length - 1.0)
                   / (2.0 * math.pi))
    Vc = math.pi * cavity.length * W0 ** 2 / 4.0
    omega_c = 2.0 * math.pi * constants.c / cavity.wavelength
    return CavityParams(kappa=kappa, W0=W0, Vc=Vc, omega_c=omega_c)


def derive_trap(trap: TrapSpec, sphere: NanosphereSpec, cavity: CavitySpec,
                constants: Constants = CODATA) -> TrapParams:
    """Tweezer waist, focal intensity, trap frequency, and power.

    Whichever of power and trap frequency is given, the other follows
    from omega^2 = 4 eps_c I / (rho0 c Wt^2) with I = P_t / (pi Wt^2).
    """
    wavelength = trap.wavelength if trap.wavelength is not None else cavity.wavelength
    Wt = wavelength / (math.pi * trap.numerical_aperture)
    eps_c = coupling_strength(sphere.permittivity)
    if trap.power is not None:
        trap_power = trap.power
        intensity = trap_power / (math.pi * Wt ** 2)
        omega = math.sqrt(4.0 * eps_c * intensity
                          / (sphere.density * constants.c * Wt ** 2))
    else:
        omega = trap.frequency
        intensity = omega ** 2 * sphere.density * constants.c * Wt ** 2 / (4.0 * eps_c)
        trap_power = intensity * math.pi * Wt ** 2
    omega_Lt = 2.0 * math.pi * constants.c / wavelength
    return TrapParams(Wt=Wt, intensity=intensity, omega=omega, trap_power=trap_power,
                      omega_Lt=omega_Lt, wavelength=wavelength)


def derive_coupling(sphere: NanosphereSpec, cavity_p: CavityParams, drive: DriveSpec,
                    omega: float, constants: Constants = CODATA) -> CouplingParams:
    """Optomechanical coupling and intracavity field for the given drive.

    The linearized coupling is G = g * alpha with
    g = omega_c sqrt(hbar/(m omega)) (2 pi/lambda_c) ((eps-1)/(eps+2)) (3 Vs/(4 Vc))
    and alpha^2 = 2 kappa P / (hbar omega_L (Delta^2 + kappa^2)).
    """
    kappa = cavity_p.kappa
    Delta = drive.detuning_ratio * kappa
    omega_L = cavity_p.omega_c - Delta
    Vs = 4.0 * math.pi * sphere.radius ** 3 / 3.0
    m = sphere.density * Vs
    eps_c = coupling_strength(sphere.permittivity)
    k_c = cavity_p.omega_c / constants.c   # = 2 pi / lambda_c
    g = (cavity_p.omega_c * math.sqrt(constants.hbar / (m * omega)) * k_c
         * eps_c * Vs / (4.0 * cavity_p.Vc))
    if drive.coupling_ratio is not None:
        G = drive.coupling_ratio * kappa
        alpha = G / g
        drive_power = (alpha ** 2 * constants.hbar * omega_L
                       * (Delta ** 2 + kappa ** 2) / (2.0 * kappa))
    else:
        drive_power = drive.power
        alpha = math.sqrt(2.0 * kappa * drive_power
                          / (constants.hbar * omega_L * (Delta ** 2 + kappa ** 2)))
        G = g * alpha
    return CouplingParams(m=m, Vs=Vs, eps_c=eps_c, g=g, alpha=alpha,
                          n_ph=alpha ** 2, G=G, drive_power=drive_power,
                          Delta=Delta, omega_L=omega_L)


def gas_damping(environment: EnvironmentSpec, sphere: NanosphereSpec,
                constants: Constants = CODATA) -> GasParams:
    """Kinetic gas damping in the free-molecular regime."""
    vbar = math.sqrt(3.0 * constants.k_B * environment.temperature / environment.gas_mass)
    gamma = (16.0 / math.pi) * environment.pressure \
        / (vbar * sphere.radius * sphere.density)
    return GasParams(gamma=gamma, vbar=vbar)


def resolve(system: SystemSpec, constants: Constants = CODATA) -> DerivedParams:
    """Run the full parameter chain for one system spec."""
    cav = derive_cavity(system.cavity, constants)
    trap = derive_trap(system.trap, system.sphere, system.cavity, constants)
    coup = derive_coupling(system.sphere, cav, system.drive, trap.omega, constants)
    gas = gas_damping(system.environment, system.sphere, constants)
    return DerivedParams(
        kappa=cav.kappa, W0=cav.W0, Vc=cav.Vc, omega_c=cav.omega_c,
        Wt=trap.Wt, intensity=trap.intensity, omega=trap.omega,
        trap_power=trap.trap_power, omega_Lt=trap.omega_Lt,
        trap_wavelength=trap.wavelength,
        m=coup.m, Vs=coup.Vs, eps_c=coup.eps_c, g=coup.g, alpha=coup.alpha,
        n_ph=coup.n_ph, G=coup.G, drive_power=coup.drive_power,
        Delta=coup.Delta, omega_L=coup.omega_L,
        gamma=gas.gamma, vbar=gas.vbar,
    )
