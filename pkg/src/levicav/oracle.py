"""Stochastic-trajectory oracle for the stationary covariance.

This is the independent second route to the same observable the Lyapunov
solver computes: Euler-Maruyama integration of

    du = A u dt + B dW,   B = diag(0, sqrt(D_p), sqrt(D_X), sqrt(D_Y)),

with time-averaged second moments accumulated after a burn-in. It shares no
linear algebra with the direct solver, so agreement between the two is a real
cross-check.

Reproducibility: each trajectory draws from its own counter-based (Philox)
substream spawned from the master seed, and reduction over trajectories is
done in trajectory-index order, so results are bitwise identical for a fixed
seed regardless of how many worker threads run the trajectories.

Accuracy bookkeeping: the standard error is estimated by batch means across
trajectories, and ``convergence_report`` repeats the run at half the step
with common random numbers (the coarse path consumes pairwise sums of the
fine path's increments) to expose discretization bias. The relative standard
error of a variance estimate scales like 1/sqrt(Gamma_eff * T_total), with
Gamma_eff the slow relaxation rate and T_total the summed sampling time, so
stiff operating points (kappa/Gamma_eff >> 1) are intrinsically expensive:
the step must resolve 1/kappa while the averaging must span many 1/Gamma_eff.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .steady_state import LinearModel, check_stability

try:
    import numba
    _HAVE_NUMBA = True
except ImportError:
    numba = None
    _HAVE_NUMBA = False


def _em_chunk_py(u, a, b, noise, sums, skip):
    # reference implementation; compiled below when numba is present
    n = noise.shape[0]
    for t in range(n):
        x0, x1, x2, x3 = u[0], u[1], u[2], u[3]
        u[0] = x0 + a[0, 0] * x0 + a[0, 1] * x1 + a[0, 2] * x2 + a[0, 3] * x3
        u[1] = x1 + a[1, 0] * x0 + a[1, 1] * x1 + a[1, 2] * x2 + a[1, 3] * x3 \
            + b[0] * noise[t, 0]
        u[2] = x2 + a[2, 0] * x0 + a[2, 1] * x1 + a[2, 2] * x2 + a[2, 3] * x3 \
            + b[1] * noise[t, 1]
        u[3] = x3 + a[3, 0] * x0 + a[3, 1] * x1 + a[3, 2] * x2 + a[3, 3] * x3 \
            + b[2] * noise[t, 2]
        if t >= skip:
            sums[0] += u[0] * u[0]
            sums[1] += u[0] * u[1]
            sums[2] += u[0] * u[2]
            sums[3] += u[0] * u[3]
            sums[4] += u[1] * u[1]
            sums[5] += u[1] * u[2]
            sums[6] += u[1] * u[3]
            sums[7] += u[2] * u[2]
            sums[8] += u[2] * u[3]
            sums[9] += u[3] * u[3]
            sums[10] += 1.0


if _HAVE_NUMBA:
    _em_chunk = numba.njit(cache=True, nogil=True, fastmath=False)(_em_chunk_py)
else:
    _em_chunk = _em_chunk_py


@dataclass(frozen=True)
class SimConfig:
    """Integration plan: step, burn-in time, per-trajectory sampling time."""

    dt: float
    t_burn: float
    t_sample: float
    n_traj: int = 8
    seed: int = 0
    chunk_steps: int = 1 << 18

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.t_sample <= 0:
            raise ValueError(f"t_sample must be > 0, got {self.t_sample}")
        if self.t_burn < 0:
            raise ValueError(f"t_burn must be >= 0, got {self.t_burn}")
        if self.n_traj < 2:
            raise ValueError(f"n_traj must be >= 2 for stderr estimation, got {self.n_traj}")
        if self.chunk_steps < 2:
            raise ValueError(f"chunk_steps must be >= 2, got {self.chunk_steps}")


@dataclass(frozen=True, eq=False)
class EmpiricalCovariance:
    """Time-averaged second moments with across-trajectory standard errors."""

    V_hat: np.ndarray        # (4, 4) mean over trajectories
    stderr: np.ndarray       # (4, 4) batch-means standard error of V_hat
    per_traj: np.ndarray     # (n_traj, 4, 4) per-trajectory means
    n_traj: int
    steps_sampled: int       # per trajectory
    dt: float
    seed: int

    @property
    def Y2(self) -> float:
        return float(self.V_hat[3, 3])

    @property
    def Y2_stderr(self) -> float:
        return float(self.stderr[3, 3])


def resolution_bound(model: LinearModel) -> float:
    """Largest step that still resolves the fastest rate: 0.05/max(kappa, omega, gamma)."""
    return 0.05 / max(model.kappa, model.omega, model.gamma)


def _sym_from_sums(sums: np.ndarray) -> np.ndarray:
    n = sums[10]
    V = np.empty((4, 4))
    V[0, 0] = sums[0]
    V[0, 1] = V[1, 0] = sums[1]
    V[0, 2] = V[2, 0] = sums[2]
    V[0, 3] = V[3, 0] = sums[3]
    V[1, 1] = sums[4]
    V[1, 2] = V[2, 1] = sums[5]
    V[1, 3] = V[3, 1] = sums[6]
    V[2, 2] = sums[7]
    V[2, 3] = V[3, 2] = sums[8]
    V[3, 3] = sums[9]
    return V / n


def _noise_amplitudes(model: LinearModel, dt: float) -> np.ndarray:
    d = np.diag(model.D)
    if d[0] != 0.0:
        raise ValueError("position diffusion D[0,0] must be zero for this model class")
    return np.sqrt(d[1:] * dt)


def _run_trajectory(A, dt, b, n_burn, n_samp, rng, chunk_steps):
    a = np.ascontiguousarray(A * dt)
    u = np.zeros(4)
    sums = np.zeros(11)
    total = n_burn + n_samp
    done = 0
    while done < total:
        n = min(chunk_steps, total - done)
        noise = rng.standard_normal((n, 3))
        skip = min(max(n_burn - done, 0), n)
        _em_chunk(u, a, b, noise, sums, skip)
        done += n
    return _sym_from_sums(sums)


def _reduce(per_traj: np.ndarray, steps: int, dt: float, seed: int) -> EmpiricalCovariance:
    n = per_traj.shape[0]
    V_hat = per_traj.mean(axis=0)
    stderr = per_traj.std(axis=0, ddof=1) / math.sqrt(n)
    return EmpiricalCovariance(V_hat=V_hat, stderr=stderr, per_traj=per_traj,
                               n_traj=n, steps_sampled=steps, dt=dt, seed=seed)


def _check_burn(model: LinearModel, config: SimConfig) -> None:
    report = check_stability(model)
    if not report.stable:
        raise ValueError(
            f"cannot simulate an unstable model (spectral abscissa {report.abscissa:.3e})")
    t_min = 5.0 / abs(report.abscissa)
    if config.t_burn < t_min:
        raise ValueError(
            f"t_burn = {config.t_burn:.3e} is below 5/|spectral abscissa| = {t_min:.3e}; "
            "the average would still carry the transient"
        )


def simulate(model: LinearModel, config: SimConfig, workers: int = 1,
             _allow_coarse_dt: bool = False) -> EmpiricalCovariance:
    """Run the trajectory ensemble and return time-averaged moments.

    ``workers`` only parallelizes across trajectories; the result is bitwise
    identical for any worker count because every trajectory has its own
    substream and the reduction order is fixed.
    """
    bound = resolution_bound(model)
    if not _allow_coarse_dt and config.dt > bound:
        raise ValueError(
            f"dt = {config.dt:.3e} exceeds the resolution bound "
            f"0.05/max(kappa, omega, gamma) = {bound:.3e}"
        )
    _check_burn(model, config)
    n_burn = math.ceil(config.t_burn / config.dt)
    n_samp = math.ceil(config.t_sample / config.dt)
    b = _noise_amplitudes(model, config.dt)
    streams = np.random.SeedSequence(config.seed).spawn(config.n_traj)

    def one(k: int) -> np.ndarray:
        rng = np.random.Generator(np.random.Philox(streams[k]))
        return _run_trajectory(model.A, config.dt, b, n_burn, n_samp, rng,
                               config.chunk_steps)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(config.n_traj)))
    else:
        results = [one(k) for k in range(config.n_traj)]
    return _reduce(np.array(results), n_samp, config.dt, config.seed)


@dataclass(frozen=True, eq=False)
class ConvergenceReport:
    """Same Brownian paths integrated at dt and dt/2."""

    coarse: EmpiricalCovariance
    fine: EmpiricalCovariance
    dt: float

    @property
    def shift(self) -> np.ndarray:
        return np.abs(self.coarse.V_hat - self.fine.V_hat)

    @property
    def shift_Y2(self) -> float:
        return float(abs(self.coarse.Y2 - self.fine.Y2))

    @property
    def stderr_Y2(self) -> float:
        return math.hypot(self.coarse.Y2_stderr, self.fine.Y2_stderr)

    @property
    def flagged(self) -> bool:
        """True when the step-halving shift in Y2 is statistically resolved."""
        return self.shift_Y2 > 3.0 * self.stderr_Y2


def _run_pair(A, dt, b_coarse, b_fine, n_burn, n_samp, rng, chunk_steps):
    a_c = np.ascontiguousarray(A * dt)
    a_f = np.ascontiguousarray(A * (0.5 * dt))
    u_c = np.zeros(4)
    u_f = np.zeros(4)
    s_c = np.zeros(11)
    s_f = np.zeros(11)
    total = n_burn + n_samp      # coarse steps
    done = 0
    half_chunk = max(chunk_steps // 2, 1)
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    while done < total:
        m = min(half_chunk, total - done)
        xi = rng.standard_normal((2 * m, 3))
        skip = min(max(n_burn - done, 0), m)
        _em_chunk(u_f, a_f, b_fine, xi, s_f, 2 * skip)
        # the coarse path sees the same Brownian increments, summed in pairs
        xi_c = (xi[0::2] + xi[1::2]) * inv_sqrt2
        _em_chunk(u_c, a_c, b_coarse, xi_c, s_c, skip)
        done += m
    return _sym_from_sums(s_c), _sym_from_sums(s_f)


def convergence_report(model: LinearModel, config: SimConfig,
                       workers: int = 1) -> ConvergenceReport:
    """Integrate the same noise at dt and dt/2 and compare the moments.

    Unlike ``simulate`` this runs at whatever dt it is given, including
    deliberately coarse steps, since exposing discretization bias is its job.
    """
    _check_burn(model, config)
    n_burn = math.ceil(config.t_burn / config.dt)
    n_samp = math.ceil(config.t_sample / config.dt)
    b_c = _noise_amplitudes(model, config.dt)
    b_f = _noise_amplitudes(model, 0.5 * config.dt)
    streams = np.random.SeedSequence(config.seed).spawn(config.n_traj)

    def one(k: int):
        rng = np.random.Generator(np.random.Philox(streams[k]))
        return _run_pair(model.A, config.dt, b_c, b_f, n_burn, n_samp, rng,
                         config.chunk_steps)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(config.n_traj)))
    else:
        results = [one(k) for k in range(config.n_traj)]
    coarse = _reduce(np.array([r[0] for r in results]), n_samp, config.dt, config.seed)
    fine = _reduce(np.array([r[1] for r in results]), 2 * n_samp, 0.5 * config.dt,
                   config.seed)
    return ConvergenceReport(coarse=coarse, fine=fine, dt=config.dt)


def plan_simulation(model: LinearModel, rel_stderr: float, n_traj: int = 8,
                    seed: int = 0, dt: float | None = None) -> SimConfig:
    """Size a run for a target relative standard error on the variance.

    Uses rel_stderr ~ 1/sqrt(Gamma_eff * T_total) with Gamma_eff read off the
    drift spectrum (twice the spectral abscissa magnitude), plus the minimum
    admissible burn-in per trajectory.
    """
    if not 0 < rel_stderr < 1:
        raise ValueError(f"rel_stderr must be in (0, 1), got {rel_stderr}")
    report = check_stability(model)
    if not report.stable:
        raise ValueError(
            f"cannot plan for an unstable model (spectral abscissa {report.abscissa:.3e})")
    gamma_eff = 2.0 * abs(report.abscissa)
    t_total = 1.0 / (gamma_eff * rel_stderr ** 2)
    t_burn = 5.0 / abs(report.abscissa)
    if dt is None:
        dt = resolution_bound(model)
    return SimConfig(dt=dt, t_burn=t_burn, t_sample=t_total / n_traj,
                     n_traj=n_traj, seed=seed)
