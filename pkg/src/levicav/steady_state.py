"""Linearized dynamics and the stationary covariance of the coupled system.

State ordering is u = (x, p, X, Y): mechanical position/momentum quadratures
of the trapped sphere, then amplitude/phase quadratures of the cavity field,
all normalized to vacuum variance 1/2. The stationary covariance V solves the
Lyapunov equation A V + V A^T + D = 0; the observable of interest is the
stationary phase variance Y2 = V[3, 3].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import CODATA, Constants
from .errors import PhysicsError
from .noise import DiffusionBudget, diffusion_budget
from .params import DerivedParams, resolve
from .specs import SystemSpec

# upper-triangle pair order used by the symmetric-vectorized Lyapunov solve
_PAIRS = [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1),
          (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)]
_PAIR_INDEX = {p: r for r, p in enumerate(_PAIRS)}


@dataclass(frozen=True, eq=False)
class LinearModel:
    """Drift matrix A, diffusion matrix D, and the scalars they came from."""

    A: np.ndarray
    D: np.ndarray
    omega: float
    gamma: float
    kappa: float
    Delta: float
    G: float

    @property
    def total_mech(self) -> float:
        return float(self.D[1, 1])


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    abscissa: float            # max real part of the drift eigenvalues
    eigenvalues: np.ndarray


@dataclass(frozen=True, eq=False)
class SteadyState:
    V: np.ndarray              # stationary covariance, unclamped
    Y2: float                  # phase-quadrature variance V[3, 3]
    residual: float            # ||A V + V A^T + D||_F / ||D||_F
    min_eigenvalue: float
    psd: bool                  # min eigenvalue >= -1e-10 * max eigenvalue

    @property
    def V_psd(self) -> np.ndarray:
        """Covariance with any tiny negative eigenvalues clamped to zero."""
        w, Q = np.linalg.eigh(self.V)
        return (Q * np.clip(w, 0.0, None)) @ Q.T


def build_model(derived: DerivedParams, budget: DiffusionBudget) -> LinearModel:
    """Drift and diffusion matrices for one operating point."""
    omega, gamma = derived.omega, derived.gamma
    kappa, Delta, G = derived.kappa, derived.Delta, derived.G
    s2G = math.sqrt(2.0) * G
    A = np.array([
        [0.0,   omega,  0.0,    0.0],
        [-omega, -gamma, -s2G,  0.0],
        [0.0,   0.0,    -kappa, Delta],
        [-s2G,  0.0,    -Delta, -kappa],
    ])
    D = np.diag([0.0, budget.total_mech, kappa, kappa])
    return LinearModel(A=A, D=D, omega=omega, gamma=gamma, kappa=kappa,
                       Delta=Delta, G=G)


def check_stability(model: LinearModel) -> StabilityReport:
    """Hurwitz check on the drift matrix."""
    eig = np.linalg.eigvals(model.A)
    abscissa = float(np.max(eig.real))
    return StabilityReport(stable=abscissa < 0.0, abscissa=abscissa, eigenvalues=eig)


def _lyapunov_system(A: np.ndarray):
    """Dense 10x10 system M s = rhs over the upper triangle of symmetric V."""
    M = np.zeros((10, 10))
    for r, (i, j) in enumerate(_PAIRS):
        for k in range(4):
            # (A V)_ij contributes A[i,k] V[k,j]; (V A^T)_ij contributes A[j,k] V[i,k]
            M[r, _PAIR_INDEX[(min(k, j), max(k, j))]] += A[i, k]
            M[r, _PAIR_INDEX[(min(i, k), max(i, k))]] += A[j, k]
    return M


def _unpack(s: np.ndarray) -> np.ndarray:
    V = np.empty((4, 4))
    for r, (i, j) in enumerate(_PAIRS):
        V[i, j] = s[r]
        V[j, i] = s[r]
    return V


def solve_lyapunov(model: LinearModel) -> SteadyState:
    """Stationary covariance from A V + V A^T + D = 0.

    The symmetric unknown is vectorized into 10 components and solved densely
    after scaling the equation by kappa (V is unchanged), with iterative
    refinement while it improves. When the coupling is exactly zero the two
    2x2 blocks are instead filled with their hand-solved stationary values.

    The reported residual is bounded below by float64 representation: once
    the mechanical variance sits many orders of magnitude above vacuum,
    rounding the exact solution already costs about eps*omega*V_pp/||D||,
    which can reach 1e-9 in strongly gas-dominated corners even though every
    entry of V remains relatively accurate to machine precision.

    Raises PhysicsError when the drift matrix is not Hurwitz.
    """
    report = check_stability(model)
    if not report.stable:
        raise PhysicsError(
            f"drift matrix is not Hurwitz (spectral abscissa {report.abscissa:.3e}); "
            "no stationary state exists"
        )
    A = model.A / model.kappa
    D = model.D / model.kappa
    if (model.G == 0.0 and not np.any(D[np.triu_indices(4, 1)])
            and D[0, 0] == 0.0 and D[2, 2] == D[3, 3]):
        # with no coupling the drift is exactly block diagonal and each 2x2
        # block has a hand-solvable stationary covariance: the heated
        # mechanical pair sits at D/(2 gamma) in both quadratures, the
        # optical pair at D/(2 kappa); assigning the shared values from the
        # same float keeps the residual evaluation cancelling exactly even
        # when the mechanical variance is many orders above vacuum
        V = np.zeros((4, 4))
        V[0, 0] = V[1, 1] = D[1, 1] / (-2.0 * A[1, 1])
        V[2, 2] = V[3, 3] = D[2, 2] / (-2.0 * A[2, 2])
    else:
        M = _lyapunov_system(A)
        rhs = -np.array([D[i, j] for (i, j) in _PAIRS])
        s = np.linalg.solve(M, rhs)
        best_s, best_r = s, float(np.linalg.norm(rhs - M @ s))
        rhs_norm = float(np.linalg.norm(rhs))
        for _ in range(5):
            if best_r <= 1e-15 * rhs_norm:
                break
            s = best_s + np.linalg.solve(M, rhs - M @ best_s)
            r = float(np.linalg.norm(rhs - M @ s))
            if r >= best_r:
                break
            best_s, best_r = s, r
        V = _unpack(best_s)

    R = model.A @ V + V @ model.A.T + model.D
    residual = float(np.linalg.norm(R) / np.linalg.norm(model.D))
    w = np.linalg.eigvalsh(V)
    min_eig = float(w[0])
    psd = min_eig >= -1e-10 * max(float(w[-1]), 0.0)
    return SteadyState(V=V, Y2=float(V[3, 3]), residual=residual,
                       min_eigenvalue=min_eig, psd=psd)


@dataclass(frozen=True)
class PhaseVariancePair:
    """Stationary phase variance with and without the collapse term."""

    derived: DerivedParams
    budget_on: DiffusionBudget
    budget_off: DiffusionBudget
    state_on: SteadyState
    state_off: SteadyState

    @property
    def Y2_on(self) -> float:
        return self.state_on.Y2

    @property
    def Y2_off(self) -> float:
        return self.state_off.Y2

    @property
    def rel_diff(self) -> float:
        return (self.Y2_on - self.Y2_off) / self.Y2_off


def phase_variance(system: SystemSpec, constants: Constants = CODATA) -> PhaseVariancePair:
    """Run the full chain twice, with the collapse term enabled and disabled."""
    states = {}
    budgets = {}
    derived = None
    for enabled in (True, False):
        spec = system.with_csl_enabled(enabled)
        derived = resolve(spec, constants)
        budget = diffusion_budget(spec, derived, constants)
        model = build_model(derived, budget)
        budgets[enabled] = budget
        states[enabled] = solve_lyapunov(model)
    return PhaseVariancePair(derived=derived, budget_on=budgets[True],
                             budget_off=budgets[False],
                             state_on=states[True], state_off=states[False])
