"""Sweep protocols and the detectable-collapse-rate bound search.

Both sweeps hold the drive ratios Delta/kappa and G/kappa from the base
system fixed at every point:

* ``sweep_omega`` varies the trap frequency at fixed cavity geometry, so the
  tweezer power is re-derived per point (kappa is constant, hence G too);
* ``sweep_length`` varies the cavity length and holds omega/kappa fixed as
  well, so the drift matrix in units of kappa is identical at every point and
  only the diffusion budget moves.

An unstable point is recorded with NaN variances and a cleared stable flag
rather than aborting the sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .constants import CODATA, Constants
from .errors import ConfigError, PhysicsError
from .params import resolve
from .specs import CavitySpec, DriveSpec, SystemSpec, TrapSpec
from .steady_state import phase_variance

DEFAULT_SWEEP_POINTS = 60
# default trap-frequency window, cycle frequencies in Hz
DEFAULT_OMEGA_MIN_HZ = 200.0
DEFAULT_OMEGA_MAX_HZ = 20e3
# default cavity-length window as multiples of the mirror curvature radius
DEFAULT_LENGTH_MAX_FACTOR = 1.995


def omega_grid(n_points: int = DEFAULT_SWEEP_POINTS,
               f_min: float = DEFAULT_OMEGA_MIN_HZ,
               f_max: float = DEFAULT_OMEGA_MAX_HZ) -> np.ndarray:
    """Logarithmic grid of trap angular frequencies (rad/s)."""
    if not (0 < f_min < f_max):
        raise ConfigError(f"need 0 < f_min < f_max, got ({f_min}, {f_max})")
    return 2.0 * math.pi * np.logspace(math.log10(f_min), math.log10(f_max), n_points)


def length_grid(cavity: CavitySpec, n_points: int = DEFAULT_SWEEP_POINTS,
                L_min: float | None = None, L_max: float | None = None) -> np.ndarray:
    """Linear grid of cavity lengths from confocal toward concentric (m)."""
    if L_min is None:
        L_min = cavity.mirror_radius
    if L_max is None:
        L_max = DEFAULT_LENGTH_MAX_FACTOR * cavity.mirror_radius
    if not (0 < L_min < L_max):
        raise ConfigError(f"need 0 < L_min < L_max, got ({L_min}, {L_max})")
    if L_max >= 2 * cavity.mirror_radius:
        raise PhysicsError(
            f"L_max = {L_max} reaches the concentric limit {2 * cavity.mirror_radius}")
    return np.linspace(L_min, L_max, n_points)


@dataclass(frozen=True, eq=False)
class SweepResult:
    """One protocol's curves; diffusion columns are for the CSL-on branch."""

    axis_name: str           # "omega" or "length"
    axis: np.ndarray
    D_t: np.ndarray
    D_c: np.ndarray
    D_a: np.ndarray
    lambda_sph: np.ndarray
    Y2_on: np.ndarray
    Y2_off: np.ndarray
    stable: np.ndarray       # bool; False rows carry NaN variances

    @property
    def rel_diff(self) -> np.ndarray:
        return (self.Y2_on - self.Y2_off) / self.Y2_off

    @property
    def max_rel_diff(self) -> float:
        ok = self.stable & np.isfinite(self.Y2_on)
        if not ok.any():
            return float("nan")
        return float(np.max(self.rel_diff[ok]))


def _drive_ratios(system: SystemSpec, constants: Constants):
    base = resolve(system, constants)
    return base.Delta / base.kappa, base.G / base.kappa, base


def _collect(axis_name: str, axis: np.ndarray, systems) -> SweepResult:
    n = len(axis)
    cols = {name: np.full(n, np.nan) for name in
            ("D_t", "D_c", "D_a", "lambda_sph", "Y2_on", "Y2_off")}
    stable = np.zeros(n, dtype=bool)
    for i, sys_i in enumerate(systems):
        try:
            pair = phase_variance(sys_i)
        except PhysicsError:
            continue
        stable[i] = True
        cols["D_t"][i] = pair.budget_on.D_t
        cols["D_c"][i] = pair.budget_on.D_c
        cols["D_a"][i] = pair.budget_on.D_a
        cols["lambda_sph"][i] = pair.budget_on.lambda_sph
        cols["Y2_on"][i] = pair.Y2_on
        cols["Y2_off"][i] = pair.Y2_off
    return SweepResult(axis_name=axis_name, axis=np.asarray(axis, dtype=float),
                       stable=stable, **cols)


def sweep_omega(system: SystemSpec, omegas: np.ndarray | None = None,
                constants: Constants = CODATA) -> SweepResult:
    """Stationary curves versus trap frequency at fixed cavity and drive ratios."""
    if omegas is None:
        omegas = omega_grid()
    ratio_Delta, ratio_G, _ = _drive_ratios(system, constants)
    drive = DriveSpec(detuning_ratio=ratio_Delta, coupling_ratio=ratio_G)

    def systems():
        for w in omegas:
            trap = TrapSpec(numerical_aperture=system.trap.numerical_aperture,
                            frequency=float(w), wavelength=system.trap.wavelength)
            yield replace(system, trap=trap, drive=drive)

    return _collect("omega", omegas, systems())


def sweep_length(system: SystemSpec, lengths: np.ndarray | None = None,
                 constants: Constants = CODATA) -> SweepResult:
    """Stationary curves versus cavity length.

    omega/kappa, Delta/kappa, and G/kappa are all pinned to the base system's
    values, so the drift matrix scaled by kappa is the same at every point
    (up to the negligible gas-damping entry) and the curves isolate how the
    diffusion sources redistribute with geometry.
    """
    if lengths is None:
        lengths = length_grid(system.cavity)
    ratio_Delta, ratio_G, base = _drive_ratios(system, constants)
    ratio_omega = base.omega / base.kappa
    drive = DriveSpec(detuning_ratio=ratio_Delta, coupling_ratio=ratio_G)

    def systems():
        for L in lengths:
            cavity = replace(system.cavity, length=float(L))
            kappa_L = math.pi * constants.c / (2.0 * cavity.finesse * cavity.length)
            trap = TrapSpec(numerical_aperture=system.trap.numerical_aperture,
                            frequency=ratio_omega * kappa_L,
                            wavelength=system.trap.wavelength)
            yield replace(system, cavity=cavity, trap=trap, drive=drive)

    return _collect("length", lengths, systems())


def discriminability(result: SweepResult) -> float:
    """Largest relative CSL signature over the sweep's stable points."""
    return result.max_rel_diff


@dataclass(frozen=True)
class BoundResult:
    """Outcome of the detectable-rate search."""

    lambda_star: float       # NaN when not converged
    rel_diff_at_star: float
    iterations: int
    lambda_lo: float
    lambda_hi: float
    converged: bool
    reason: str
    precision: float
    protocol: str


def _max_rel_diff_at(system: SystemSpec, lam: float, protocol: str,
                     axis: np.ndarray | None, constants: Constants) -> float:
    spec = replace(system, csl=replace(system.csl, rate=lam, enabled=True))
    if protocol == "length":
        sweep = sweep_length(spec, axis, constants)
    elif protocol == "omega":
        sweep = sweep_omega(spec, axis, constants)
    else:
        raise ConfigError(f"unknown protocol {protocol!r}; use 'length' or 'omega'")
    return discriminability(sweep)


def detectable_lambda_bound(system: SystemSpec, precision: float,
                            protocol: str = "length",
                            axis: np.ndarray | None = None,
                            lambda_lo: float = 1e-16, lambda_hi: float = 1e-6,
                            max_iter: int = 60, rel_tol: float = 0.01,
                            constants: Constants = CODATA) -> BoundResult:
    """Smallest collapse rate whose maximum signature reaches ``precision``.

    Bisects on log(lambda) until the achievable relative difference matches
    the measurement precision within ``rel_tol``, or the iteration budget is
    spent. If the initial bracket does not straddle the target, that is
    reported explicitly instead of guessing.
    """
    if precision <= 0:
        raise ConfigError(f"precision must be > 0, got {precision}")
    if not (0 < lambda_lo < lambda_hi):
        raise ConfigError(f"need 0 < lambda_lo < lambda_hi, got ({lambda_lo}, {lambda_hi})")

    f_lo = _max_rel_diff_at(system, lambda_lo, protocol, axis, constants)
    f_hi = _max_rel_diff_at(system, lambda_hi, protocol, axis, constants)
    if not (math.isfinite(f_lo) and math.isfinite(f_hi)):
        return BoundResult(float("nan"), float("nan"), 0, lambda_lo, lambda_hi,
                           False, "sweep has no stable points", precision, protocol)
    if f_lo >= precision:
        return BoundResult(float("nan"), f_lo, 0, lambda_lo, lambda_hi, False,
                           f"already detectable at lambda_lo (rel_diff {f_lo:.3e})",
                           precision, protocol)
    if f_hi < precision:
        return BoundResult(float("nan"), f_hi, 0, lambda_lo, lambda_hi, False,
                           f"not detectable even at lambda_hi (rel_diff {f_hi:.3e})",
                           precision, protocol)

    lo, hi = math.log(lambda_lo), math.log(lambda_hi)
    lam = float("nan")
    f_mid = float("nan")
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        lam = math.exp(mid)
        f_mid = _max_rel_diff_at(system, lam, protocol, axis, constants)
        if abs(f_mid - precision) <= rel_tol * precision:
            return BoundResult(lam, f_mid, it, lambda_lo, lambda_hi, True,
                               "converged", precision, protocol)
        if f_mid < precision:
            lo = mid
        else:
            hi = mid
    return BoundResult(lam, f_mid, max_iter, lambda_lo, lambda_hi, False,
                       f"iteration budget ({max_iter}) spent", precision, protocol)
