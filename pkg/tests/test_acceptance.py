"""Release gates for the simulator, one test per numbered criterion.

Each test computes its verdict, then hands a single PASS/FAIL line to the
``record_criterion`` fixture, so ``pytest -v`` doubles as the acceptance
report and the terminal summary lists every criterion with its measured
margin.  Criterion 4 is written as an honest attempt: it runs the
trajectory cross-check only if an explicit-scheme step size exists that is
both numerically stable and affordable inside the wall-clock budget, and
otherwise records the quantified reason the check cannot run.
"""

import dataclasses
import math
import time

import numpy as np

import levicav as lc
from conftest import load_system, make_model

WALL_BUDGET_S = 300.0


def _growth_factor(A: np.ndarray, dt: float) -> float:
    """Spectral radius of the one-step explicit update matrix I + dt*A."""
    return float(np.abs(np.linalg.eigvals(np.eye(4) + dt * A)).max())


def _largest_stable_dt(A: np.ndarray, dt_hi: float) -> float:
    lo, hi = dt_hi * 1e-6, dt_hi
    if _growth_factor(A, lo) >= 1.0:
        return 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _growth_factor(A, mid) < 1.0:
            lo = mid
        else:
            hi = mid
    return lo


def _measured_step_rate() -> float:
    """Integrator throughput in steps/s, measured after a warm-up run."""
    mild = make_model(1.0, 0.6, 0.8, 0.25, 0.15, 3.0)
    lc.simulate(mild, lc.SimConfig(dt=0.002, t_burn=55.0, t_sample=5.0,
                                   n_traj=2, seed=0))
    timed = lc.SimConfig(dt=0.002, t_burn=55.0, t_sample=200.0, n_traj=4,
                         seed=0)
    start = time.perf_counter()
    lc.simulate(mild, timed)
    elapsed = time.perf_counter() - start
    steps = timed.n_traj * (timed.t_burn + timed.t_sample) / timed.dt
    return steps / elapsed


def _model_for(system: lc.SystemSpec) -> lc.LinearModel:
    derived = lc.resolve(system)
    return lc.build_model(derived, lc.diffusion_budget(system, derived))


def test_criterion_01_cavity_linewidth(record_criterion, benchmark_system):
    derived = lc.resolve(benchmark_system)
    dev = abs(derived.kappa / 4.712e5 - 1.0)
    record_criterion(
        1, dev <= 0.01,
        f"kappa = {derived.kappa:.4e} rad/s, {dev:.2e} relative from the "
        "4.712e5 rad/s design value (tolerance 1e-2)")


def test_criterion_02_dark_cavity_vacuum_limit(record_criterion):
    pair = lc.phase_variance(load_system("g0"))
    err = max(abs(pair.Y2_on - 0.5), abs(pair.Y2_off - 0.5))
    record_criterion(
        2, err <= 1e-10,
        f"zero-coupling phase variance off by {err:.1e} from vacuum 1/2 "
        "(tolerance 1e-10, full parameter chain)")


def test_criterion_03_covariance_solver_battery(record_criterion):
    rng = np.random.default_rng(20260822)
    checked = 0
    worst_residual = 0.0
    while checked < 1000:
        kappa = 10 ** rng.uniform(3, 6)
        model = make_model(
            kappa=kappa,
            omega=kappa * 10 ** rng.uniform(-2, 0.3),
            Delta=kappa * 10 ** rng.uniform(-2, 0.3),
            G=kappa * 10 ** rng.uniform(-3, -0.3),
            gamma=kappa * 10 ** rng.uniform(-4, -0.5),
            D_mech=kappa * 10 ** rng.uniform(-2, 2),
        )
        if not lc.check_stability(model).stable:
            continue
        worst_residual = max(worst_residual, lc.solve_lyapunov(model).residual)
        checked += 1

    # with the coupling off the mechanics is a plain damped oscillator
    rng = np.random.default_rng(822)
    worst_closed_form = 0.0
    for _ in range(200):
        kappa = 10 ** rng.uniform(3, 6)
        gamma = kappa * 10 ** rng.uniform(-4, -0.5)
        D_mech = kappa * 10 ** rng.uniform(-2, 2)
        model = make_model(kappa, kappa * 10 ** rng.uniform(-2, 0.3),
                           kappa * 10 ** rng.uniform(-2, 0.3), 0.0, gamma,
                           D_mech)
        V = lc.solve_lyapunov(model).V
        expected = D_mech / (2.0 * gamma)
        worst_closed_form = max(
            worst_closed_form,
            abs(V[0, 0] / expected - 1.0),
            abs(V[1, 1] / expected - 1.0),
            abs(V[0, 1]) / expected,
        )

    ok = worst_residual <= 1e-10 and worst_closed_form <= 1e-10
    record_criterion(
        3, ok,
        f"1000 stable models: worst residual {worst_residual:.2e}; damped "
        f"oscillator closed form off by {worst_closed_form:.2e} "
        "(tolerance 1e-10 each)")


def test_criterion_04_trajectory_agreement(record_criterion,
                                           benchmark_system):
    model = _model_for(benchmark_system)
    state = lc.solve_lyapunov(model)
    plan = lc.plan_simulation(model, rel_stderr=0.02)
    growth = _growth_factor(model.A, plan.dt)
    dt_stable = _largest_stable_dt(model.A, plan.dt)
    rate = _measured_step_rate()
    steps = plan.n_traj * (plan.t_burn + plan.t_sample) / dt_stable
    # grant perfect 8-way parallelism before comparing to the budget
    projected = steps / rate / 8.0

    if growth < 1.0 and projected <= WALL_BUDGET_S:
        config = dataclasses.replace(plan, dt=min(plan.dt, dt_stable))
        emp = lc.simulate(model, config, workers=8)
        report = lc.convergence_report(model, config, workers=8)
        resolved = emp.Y2_stderr <= 0.02 * emp.Y2
        agrees = abs(emp.Y2 - state.Y2) <= 3.0 * emp.Y2_stderr
        record_criterion(
            4, resolved and agrees and not report.flagged,
            f"Y2 {emp.Y2:.4f} +- {emp.Y2_stderr:.4f} vs {state.Y2:.4f}, "
            f"step-halving shift {report.shift_Y2:.2e}")
    else:
        record_criterion(
            4, False,
            f"planned dt {plan.dt:.2e} s has explicit-step growth factor "
            f"{growth:.7f} (diverges); largest stable dt {dt_stable:.2e} s "
            f"needs {steps:.1e} steps ~ {projected:.1e} s wall clock even "
            f"split 8 ways at {rate:.1e} steps/s, over the "
            f"{WALL_BUDGET_S:.0f} s budget")


def test_criterion_05_diffusion_scaling_laws(record_criterion,
                                             benchmark_system):
    res = lc.sweep_omega(benchmark_system)
    lg = np.log(res.axis)

    def slope(col):
        return float(np.polyfit(lg, np.log(col), 1)[0])

    errs = {
        "D_t": abs(slope(res.D_t) - 1.0),
        "D_a": abs(slope(res.D_a) + 1.0),
        "lambda_sph": abs(slope(res.lambda_sph) + 1.0),
        "D_c": abs(slope(res.D_c)),
    }

    system = load_system("lambda-1e-10")
    resL = lc.sweep_length(system)
    lgL = np.log(resL.axis)

    def slopeL(col):
        return float(np.polyfit(lgL, np.log(col), 1)[0])

    errs["lambda_sph_L"] = abs(slopeL(resL.lambda_sph) - 1.0)
    errs["D_t_L"] = abs(slopeL(resL.D_t) + 1.0)
    R_c = system.cavity.mirror_radius
    shape = resL.D_c / np.sqrt(2.0 * R_c / resL.axis - 1.0)
    shape_dev = float(np.ptp(shape) / shape.mean())

    ok = max(errs.values()) <= 1e-6 and shape_dev <= 1e-9
    record_criterion(
        5, ok,
        f"log-log slope errors <= {max(errs.values()):.1e} (tolerance 1e-6); "
        f"mode-volume shape of D_c constant to {shape_dev:.1e} "
        "(tolerance 1e-9)")


def test_criterion_06_collapse_signature_vs_trap_frequency(record_criterion,
                                                           benchmark_system):
    res = lc.sweep_omega(benchmark_system, lc.omega_grid(60, 1200.0, 12000.0))
    decreasing = bool(np.all(np.diff(res.Y2_on) < 0.0))
    ratio = float(res.Y2_on[0] / res.Y2_off[0])
    off = res.Y2_off
    variation = float((off.max() - off.min()) / off.min())
    ok = decreasing and ratio > 2.0 and variation <= 0.05
    record_criterion(
        6, ok,
        f"Y2_on strictly decreasing in omega: {decreasing}; on/off ratio "
        f"{ratio:.2f} at the softest trap (> 2); Y2_off peak-to-trough "
        f"{variation:.4f} (<= 0.05)")


def test_criterion_07_discriminability_levels(record_criterion):
    targets = [("lambda-1e-10", 0.30), ("lambda-1e-11", 0.12),
               ("lambda-1e-12", 0.015)]
    ratios = []
    values = []
    for name, target in targets:
        system = load_system(name)
        R_c = system.cavity.mirror_radius
        axis = lc.length_grid(system.cavity, 60, 1.9 * R_c, 1.995 * R_c)
        res = lc.sweep_length(system, axis)
        # fraction of the observed (with-collapse) curve, i.e. the
        # measurement precision needed to resolve the excess
        frac = (res.Y2_on - res.Y2_off) / res.Y2_on
        value = float(np.nanmax(frac[res.stable]))
        values.append(value)
        ratios.append(value / target)
    ok = all(0.5 <= r <= 1.5 for r in ratios)
    record_criterion(
        7, ok,
        "observed-curve discriminability "
        + "/".join(f"{v:.3f}" for v in values)
        + " vs targets 0.30/0.12/0.015, ratios "
        + "/".join(f"{r:.2f}" for r in ratios) + " inside [0.5, 1.5]")


def test_criterion_08_detectable_rate_bound(record_criterion, bound_system):
    result = lc.detectable_lambda_bound(bound_system, precision=0.015)
    in_window = 1e-12 / 3.0 <= result.lambda_star <= 3e-12
    ok = result.converged and in_window and result.iterations <= 60
    record_criterion(
        8, ok,
        f"lambda* = {result.lambda_star:.3e} 1/s (window [3.3e-13, 3e-12]) "
        f"in {result.iterations} bisection steps, converged = "
        f"{result.converged}")


def test_criterion_09_structural_invariants(record_criterion,
                                            benchmark_system):
    worst_negative = 0.0
    n_rows = 0
    for name, sweep in [("small-sphere", lc.sweep_omega),
                        ("benchmark", lc.sweep_omega),
                        ("lambda-1e-10", lc.sweep_length),
                        ("lambda-1e-12", lc.sweep_length)]:
        res = sweep(load_system(name))
        vals = res.rel_diff[res.stable]
        n_rows += int(res.stable.sum())
        worst_negative = min(worst_negative, float(vals.min()))

    zero = dataclasses.replace(
        benchmark_system,
        csl=dataclasses.replace(benchmark_system.csl, rate=0.0))
    zero_dev = 0.0
    for res in (lc.sweep_omega(zero), lc.sweep_length(zero)):
        zero_dev = max(zero_dev, float(
            np.max(np.abs(res.Y2_on / res.Y2_off - 1.0))))

    system = load_system("lambda-1e-10")
    base = lc.resolve(system)
    ratio_omega = base.omega / base.kappa
    mats = []
    for L in lc.length_grid(system.cavity):
        cavity = dataclasses.replace(system.cavity, length=float(L))
        kappa_L = math.pi * lc.CODATA.c / (2.0 * cavity.finesse * cavity.length)
        trap = lc.TrapSpec(numerical_aperture=system.trap.numerical_aperture,
                           frequency=ratio_omega * kappa_L,
                           wavelength=system.trap.wavelength)
        mats.append(_model_for(dataclasses.replace(
            system, cavity=cavity, trap=trap)).A)
    scaled = [A / (-A[2, 2]) for A in mats]
    M0 = scaled[0]
    drift_dev = 0.0
    gas_entry = 0.0
    zeros_exact = True
    for M in scaled:
        gas_entry = max(gas_entry, abs(float(M[1, 1])))
        for i in range(4):
            for j in range(4):
                if (i, j) == (1, 1):
                    continue  # gas damping does not scale with the linewidth
                if M0[i, j] == 0.0:
                    zeros_exact = zeros_exact and M[i, j] == 0.0
                else:
                    drift_dev = max(drift_dev,
                                    abs(float(M[i, j] / M0[i, j] - 1.0)))

    round_trip = 0.0
    for system in (benchmark_system, load_system("lambda-1e-12")):
        d = lc.resolve(system)
        by_power = dataclasses.replace(
            system,
            trap=lc.TrapSpec(
                numerical_aperture=system.trap.numerical_aperture,
                power=d.trap_power))
        dt_ = lc.resolve(by_power)
        by_drive = dataclasses.replace(
            system,
            drive=lc.DriveSpec(detuning_ratio=system.drive.detuning_ratio,
                               power=d.drive_power))
        dd_ = lc.resolve(by_drive)
        round_trip = max(round_trip,
                         abs(dt_.omega / d.omega - 1.0),
                         abs(dt_.intensity / d.intensity - 1.0),
                         abs(dd_.G / d.G - 1.0),
                         abs(dd_.alpha / d.alpha - 1.0),
                         abs(dd_.n_ph / d.n_ph - 1.0))

    ok = (worst_negative >= 0.0 and zero_dev <= 1e-12
          and drift_dev <= 1e-12 and zeros_exact and gas_entry <= 1e-9
          and round_trip <= 1e-12)
    record_criterion(
        9, ok,
        f"rel_diff >= {worst_negative:.1e} on {n_rows} stable rows; "
        f"zero-rate curves match to {zero_dev:.1e}; scaled drift varies "
        f"{drift_dev:.1e} across the length sweep (gas entry <= "
        f"{gas_entry:.1e}); parameter round-trips match to {round_trip:.1e}")
