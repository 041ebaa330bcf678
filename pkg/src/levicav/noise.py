"""Momentum diffusion rates acting on the trapped sphere.

All four rates are expressed in phonon units (1/s), i.e. as diffusion of the
dimensionless mechanical quadratures whose vacuum variance is 1/2:

* ``D_a``       residual-gas collisions,
* ``D_t``       recoil from tweezer-photon scattering,
* ``D_c``       recoil from cavity-photon scattering,
* ``lambda_sph`` the collapse-model (CSL) contribution.

The first three are environmental and depend on pressure, trap power, and
intracavity photon number; the CSL term depends only on the sphere geometry,
the collapse rate, and the trap frequency, which is what makes the
environmental knobs usable to discriminate it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import CODATA, Constants
from .params import DerivedParams
from .specs import SystemSpec

# below this the closed form loses precision to cancellation; the series keeps
# full accuracy (next omitted term is < 1e-14 relative at the switch point)
_SERIES_SWITCH = 1e-3


def csl_bracket(u: float) -> float:
    """Geometry factor e^-u - 1 + (u/2)(e^-u + 1) with u = (R/r_c)^2.

    For small u the closed form cancels to O(u^3); use the series
    u^3/12 - u^4/24 + u^5/80 - u^6/360 (general term
    (-1)^(n+1) (n-2) u^n / (2 n!)) below the switch point.
    """
    if u < 0:
        raise ValueError(f"u must be >= 0, got {u}")
    if u < _SERIES_SWITCH:
        return u ** 3 / 12.0 - u ** 4 / 24.0 + u ** 5 / 80.0 - u ** 6 / 360.0
    e = math.exp(-u)
    return e - 1.0 + 0.5 * u * (e + 1.0)


def csl_diffusion(radius: float, density: float, rate: float,
                  correlation_length: float, omega: float,
                  constants: Constants = CODATA) -> float:
    """CSL momentum diffusion rate lambda_sph in phonon units."""
    u = (radius / correlation_length) ** 2
    return (constants.hbar / omega) \
        * (8.0 * math.pi * rate * density / constants.m0 ** 2) \
        * csl_bracket(u) * correlation_length ** 4 / radius ** 3


def gas_diffusion(gamma: float, temperature: float, omega: float,
                  constants: Constants = CODATA) -> float:
    """Gas-collision diffusion D_a = 2 gamma k_B T / (hbar omega)."""
    return 2.0 * gamma * constants.k_B * temperature / (constants.hbar * omega)


def trap_scatter_diffusion(radius: float, density: float, eps_c: float,
                           k_c: float, intensity: float, omega: float,
                           omega_Lt: float) -> float:
    """Tweezer photon-recoil diffusion D_t."""
    return (8.0 * eps_c ** 2 * k_c ** 6 * radius ** 3 / (9.0 * density * omega)) \
        * intensity / omega_Lt


def cavity_scatter_diffusion(radius: float, density: float, eps_c: float,
                             k_c: float, n_ph: float, Vc: float, omega: float,
                             constants: Constants = CODATA) -> float:
    """Cavity photon-recoil diffusion D_c."""
    return (2.0 * eps_c ** 2 * k_c ** 6 * radius ** 3 / (9.0 * density * omega)) \
        * constants.hbar * n_ph * constants.c / Vc


@dataclass(frozen=True)
class DiffusionBudget:
    """The four rates at one operating point; ``lambda_sph`` is zero when the
    collapse term is disabled."""

    D_a: float
    D_t: float
    D_c: float
    lambda_sph: float

    @property
    def total_mech(self) -> float:
        return self.D_a + self.D_t + self.D_c + self.lambda_sph


def diffusion_budget(system: SystemSpec, derived: DerivedParams,
                     constants: Constants = CODATA) -> DiffusionBudget:
    """Assemble the full budget for a resolved system."""
    k_c = derived.omega_c / constants.c
    D_a = gas_diffusion(derived.gamma, system.environment.temperature,
                        derived.omega, constants)
    D_t = trap_scatter_diffusion(system.sphere.radius, system.sphere.density,
                                 derived.eps_c, k_c, derived.intensity,
                                 derived.omega, derived.omega_Lt)
    D_c = cavity_scatter_diffusion(system.sphere.radius, system.sphere.density,
                                   derived.eps_c, k_c, derived.n_ph, derived.Vc,
                                   derived.omega, constants)
    if system.csl.enabled:
        lam = csl_diffusion(system.sphere.radius, system.sphere.density,
                            system.csl.rate, system.csl.correlation_length,
                            derived.omega, constants)
    else:
        lam = 0.0
    return DiffusionBudget(D_a=D_a, D_t=D_t, D_c=D_c, lambda_sph=lam)
