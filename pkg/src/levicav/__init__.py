"""Stationary optics of a cavity-levitated nanosphere under competing
momentum-diffusion sources, including a collapse-model (CSL) contribution.

The observable everything revolves around is the stationary variance of the
cavity phase quadrature, Y2 = <Y^2>, computed from the Lyapunov equation of
the linearized dynamics and cross-checked by an independent stochastic
trajectory oracle. Sweep protocols versus trap frequency and cavity length
expose how the environmental diffusion sources scale away from the collapse
contribution, which yields a smallest detectable collapse rate for a given
measurement precision.
"""

from .constants import CODATA, Constants
from .errors import ConfigError, PhysicsError
from .experiments import (BoundResult, SweepResult, detectable_lambda_bound,
                          discriminability, length_grid, omega_grid,
                          sweep_length, sweep_omega)
from .noise import (DiffusionBudget, cavity_scatter_diffusion, csl_bracket,
                    csl_diffusion, diffusion_budget, gas_diffusion,
                    trap_scatter_diffusion)
from .oracle import (ConvergenceReport, EmpiricalCovariance, SimConfig,
                     convergence_report, plan_simulation, resolution_bound,
                     simulate)
from .params import (CavityParams, CouplingParams, DerivedParams, GasParams,
                     TrapParams, coupling_strength, derive_cavity,
                     derive_coupling, derive_trap, gas_damping, resolve)
from .specs import (CavitySpec, CslSpec, DriveSpec, EnvironmentSpec,
                    NanosphereSpec, SystemSpec, TrapSpec, system_from_dict)
from .steady_state import (LinearModel, PhaseVariancePair, StabilityReport,
                           SteadyState, build_model, check_stability,
                           phase_variance, solve_lyapunov)

__version__ = "0.1.0"

__all__ = [
    "CODATA", "Constants", "ConfigError", "PhysicsError",
    "NanosphereSpec", "CavitySpec", "TrapSpec", "DriveSpec", "EnvironmentSpec",
    "CslSpec", "SystemSpec", "system_from_dict",
    "CavityParams", "TrapParams", "CouplingParams", "GasParams", "DerivedParams",
    "coupling_strength", "derive_cavity", "derive_trap", "derive_coupling",
    "gas_damping", "resolve",
    "csl_bracket", "csl_diffusion", "gas_diffusion", "trap_scatter_diffusion",
    "cavity_scatter_diffusion", "DiffusionBudget", "diffusion_budget",
    "LinearModel", "StabilityReport", "SteadyState", "PhaseVariancePair",
    "build_model", "check_stability", "solve_lyapunov", "phase_variance",
    "SimConfig", "EmpiricalCovariance", "ConvergenceReport", "simulate",
    "convergence_report", "plan_simulation", "resolution_bound",
    "SweepResult", "BoundResult", "sweep_omega", "sweep_length", "omega_grid",
    "length_grid", "discriminability", "detectable_lambda_bound",
]
