"""Command-line interface.

Subcommands:

* ``rates``         diffusion budget and derived parameters at one point
* ``steady-state``  stationary phase variance at one point
* ``sweep-omega``   curves versus trap frequency
* ``sweep-length``  curves versus cavity length
* ``bound``         smallest detectable collapse rate for a given precision
* ``verify``        stochastic-trajectory cross-check of the direct solver

Exit codes: 0 success; 1 invalid configuration (message names the offending
key/unit); 2 physical-domain failure (unstable dynamics, cavity beyond the
concentric limit, or a failed verify comparison); 3 I/O failure.

Config files are JSON with a required ``system`` section and optional
``sweep`` and ``oracle`` sections. Dimensional values may be written as
``{"value": x, "unit": "..."}`` in laboratory units (Torr, mK, cm, nm, kHz);
bare numbers are taken as SI with angular frequencies.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, replace

import numpy as np

from .errors import ConfigError, PhysicsError
from .experiments import (SweepResult, detectable_lambda_bound, length_grid,
                          omega_grid, sweep_length, sweep_omega)
from .noise import diffusion_budget
from .oracle import SimConfig, plan_simulation, resolution_bound, simulate
from .params import resolve
from .specs import SystemSpec, system_from_dict
from .steady_state import build_model, check_stability, phase_variance, solve_lyapunov
from .units import ingest

_CSV_HEADER = "axis_value,D_t,D_c,D_a,lambda_sph,Y2_on,Y2_off,rel_diff,stable_flag"


# ---------------------------------------------------------------------------
# config loading

def _load_raw(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    extra = set(raw) - {"system", "sweep", "oracle"}
    if extra:
        raise ConfigError(f"{path}: unknown top-level section(s) {sorted(extra)}")
    if "system" not in raw:
        raise ConfigError(f"{path}: missing 'system' section")
    return raw


def _check_keys(section: dict, allowed: set, name: str) -> None:
    extra = set(section) - allowed
    if extra:
        raise ConfigError(f"{name}: unknown key(s) {sorted(extra)}")


_SWEEP_KEYS = {"n_points", "omega_min", "omega_max", "length_min", "length_max"}
_ORACLE_KEYS = {"dt", "t_burn", "t_sample", "rel_stderr", "n_traj", "seed"}


def _sweep_points(sweep_cfg: dict) -> int:
    n = sweep_cfg.get("n_points", 60)
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise ConfigError(f"sweep.n_points: expected an integer >= 2, got {n!r}")
    return n


def _omega_axis(sweep_cfg: dict) -> np.ndarray:
    _check_keys(sweep_cfg, _SWEEP_KEYS, "sweep")
    n = _sweep_points(sweep_cfg)
    kwargs = {}
    if "omega_min" in sweep_cfg:
        kwargs["f_min"] = ingest(sweep_cfg["omega_min"], "sweep.omega_min",
                                 "frequency") / (2.0 * math.pi)
    if "omega_max" in sweep_cfg:
        kwargs["f_max"] = ingest(sweep_cfg["omega_max"], "sweep.omega_max",
                                 "frequency") / (2.0 * math.pi)
    return omega_grid(n, **kwargs)


def _length_axis(sweep_cfg: dict, system: SystemSpec) -> np.ndarray:
    _check_keys(sweep_cfg, _SWEEP_KEYS, "sweep")
    n = _sweep_points(sweep_cfg)
    kwargs = {}
    if "length_min" in sweep_cfg:
        kwargs["L_min"] = ingest(sweep_cfg["length_min"], "sweep.length_min", "length")
    if "length_max" in sweep_cfg:
        kwargs["L_max"] = ingest(sweep_cfg["length_max"], "sweep.length_max", "length")
    return length_grid(system.cavity, n, **kwargs)


def _sim_config(oracle_cfg: dict, model, seed_override: int | None) -> SimConfig:
    _check_keys(oracle_cfg, _ORACLE_KEYS, "oracle")
    n_traj = oracle_cfg.get("n_traj", 8)
    if not isinstance(n_traj, int) or isinstance(n_traj, bool) or n_traj < 2:
        raise ConfigError(f"oracle.n_traj: expected an integer >= 2, got {n_traj!r}")
    seed = oracle_cfg.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError(f"oracle.seed: expected a non-negative integer, got {seed!r}")
    if seed_override is not None:
        seed = seed_override
    dt = None
    if "dt" in oracle_cfg:
        dt = ingest(oracle_cfg["dt"], "oracle.dt", "time")

    has_sample = "t_sample" in oracle_cfg
    has_rel = "rel_stderr" in oracle_cfg
    if has_sample == has_rel:
        raise ConfigError("oracle: exactly one of t_sample and rel_stderr must be set")
    if has_rel:
        rel = ingest(oracle_cfg["rel_stderr"], "oracle.rel_stderr", "dimensionless")
        plan = plan_simulation(model, rel, n_traj=n_traj, seed=seed, dt=dt)
        if "t_burn" in oracle_cfg:
            plan = replace(plan, t_burn=ingest(oracle_cfg["t_burn"], "oracle.t_burn",
                                               "time"))
        return plan
    t_sample = ingest(oracle_cfg["t_sample"], "oracle.t_sample", "time")
    if dt is None:
        dt = resolution_bound(model)
    if "t_burn" in oracle_cfg:
        t_burn = ingest(oracle_cfg["t_burn"], "oracle.t_burn", "time")
    else:
        t_burn = 5.0 / abs(check_stability(model).abscissa)
    return SimConfig(dt=dt, t_burn=t_burn, t_sample=t_sample, n_traj=n_traj, seed=seed)


def _apply_csl_flag(system: SystemSpec, csl: str) -> SystemSpec:
    # "off" zeroes the collapse rate so both output branches coincide;
    # "on"/"both" leave the configured rate in place
    if csl == "off":
        return replace(system, csl=replace(system.csl, rate=0.0))
    return system


# ---------------------------------------------------------------------------
# output helpers

def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _fmt(x: float) -> str:
    return f"{x:.15e}"


def _sweep_csv(result: SweepResult) -> str:
    lines = [_CSV_HEADER]
    for i in range(len(result.axis)):
        lines.append(",".join([
            _fmt(result.axis[i]), _fmt(result.D_t[i]), _fmt(result.D_c[i]),
            _fmt(result.D_a[i]), _fmt(result.lambda_sph[i]), _fmt(result.Y2_on[i]),
            _fmt(result.Y2_off[i]), _fmt(result.rel_diff[i]),
            str(int(result.stable[i])),
        ]))
    return "\n".join(lines) + "\n"


def _sweep_json(result: SweepResult) -> str:
    payload = {
        "axis_name": result.axis_name,
        "axis": result.axis.tolist(),
        "D_t": result.D_t.tolist(),
        "D_c": result.D_c.tolist(),
        "D_a": result.D_a.tolist(),
        "lambda_sph": result.lambda_sph.tolist(),
        "Y2_on": result.Y2_on.tolist(),
        "Y2_off": result.Y2_off.tolist(),
        "rel_diff": result.rel_diff.tolist(),
        "stable": [int(s) for s in result.stable],
        "max_rel_diff": result.max_rel_diff,
    }
    return json.dumps(payload, indent=2) + "\n"


def _flat_csv(payload: dict) -> str:
    lines = ["key,value"]

    def walk(prefix: str, obj) -> None:
        if isinstance(obj, dict):
            for k, v in obj.items():
                walk(f"{prefix}.{k}" if prefix else str(k), v)
        elif isinstance(obj, (list, tuple)):
            for i, v in enumerate(obj):
                walk(f"{prefix}[{i}]", v)
        elif isinstance(obj, float):
            lines.append(f"{prefix},{_fmt(obj)}")
        else:
            lines.append(f"{prefix},{obj}")

    walk("", payload)
    return "\n".join(lines) + "\n"


def _emit(payload: dict, fmt: str, output: str) -> None:
    if fmt == "json":
        _write_text(output, json.dumps(payload, indent=2) + "\n")
    else:
        _write_text(output, _flat_csv(payload))


def _derived_dict(derived) -> dict:
    keys = ("kappa", "omega", "Delta", "G", "g", "alpha", "n_ph", "gamma", "vbar",
            "W0", "Vc", "Wt", "intensity", "trap_power", "drive_power", "m",
            "omega_c", "omega_L")
    return {k: getattr(derived, k) for k in keys}


def _budget_dict(budget) -> dict:
    return {"D_a": budget.D_a, "D_t": budget.D_t, "D_c": budget.D_c,
            "lambda_sph": budget.lambda_sph, "total_mech": budget.total_mech}


# ---------------------------------------------------------------------------
# subcommands

def _cmd_rates(args) -> int:
    raw = _load_raw(args.config)
    system = _apply_csl_flag(system_from_dict(raw["system"]), args.csl)
    payload = {"derived": _derived_dict(resolve(system))}
    if args.csl in ("on", "both"):
        spec = system.with_csl_enabled(True)
        payload["budget_on"] = _budget_dict(diffusion_budget(spec, resolve(spec)))
    if args.csl in ("off", "both"):
        spec = system.with_csl_enabled(False)
        payload["budget_off"] = _budget_dict(diffusion_budget(spec, resolve(spec)))
    _emit(payload, args.format, args.output)
    return 0


def _cmd_steady_state(args) -> int:
    raw = _load_raw(args.config)
    system = _apply_csl_flag(system_from_dict(raw["system"]), args.csl)
    pair = phase_variance(system)
    payload = {"derived": _derived_dict(pair.derived)}
    if args.csl in ("on", "both"):
        payload["budget_on"] = _budget_dict(pair.budget_on)
        payload["Y2_on"] = pair.Y2_on
        payload["residual_on"] = pair.state_on.residual
    if args.csl in ("off", "both"):
        payload["budget_off"] = _budget_dict(pair.budget_off)
        payload["Y2_off"] = pair.Y2_off
        payload["residual_off"] = pair.state_off.residual
    if args.csl == "both":
        payload["rel_diff"] = pair.rel_diff
    _emit(payload, args.format, args.output)
    return 0


def _run_sweep(args, which: str) -> int:
    raw = _load_raw(args.config)
    system = _apply_csl_flag(system_from_dict(raw["system"]), args.csl)
    sweep_cfg = raw.get("sweep", {})
    if which == "omega":
        result = sweep_omega(system, _omega_axis(sweep_cfg))
    else:
        result = sweep_length(system, _length_axis(sweep_cfg, system))
    text = _sweep_csv(result) if args.format == "csv" else _sweep_json(result)
    _write_text(args.output, text)
    if args.plot is not None:
        from .plots import save_sweep_plot
        save_sweep_plot(result, args.plot)
    return 0


def _cmd_sweep_omega(args) -> int:
    return _run_sweep(args, "omega")


def _cmd_sweep_length(args) -> int:
    return _run_sweep(args, "length")


def _cmd_bound(args) -> int:
    raw = _load_raw(args.config)
    system = system_from_dict(raw["system"])
    sweep_cfg = raw.get("sweep", {})
    axis = None
    if args.protocol == "omega":
        axis = _omega_axis(sweep_cfg) if sweep_cfg else None
    elif sweep_cfg:
        axis = _length_axis(sweep_cfg, system)
    result = detectable_lambda_bound(system, args.precision, protocol=args.protocol,
                                     axis=axis)
    _emit(asdict(result), args.format, args.output)
    return 0


def _cmd_verify(args) -> int:
    raw = _load_raw(args.config)
    system = _apply_csl_flag(system_from_dict(raw["system"]), args.csl)
    derived = resolve(system)
    budget = diffusion_budget(system, derived)
    model = build_model(derived, budget)
    state = solve_lyapunov(model)
    config = _sim_config(raw.get("oracle", {}), model, args.seed)
    emp = simulate(model, config, workers=args.workers)
    delta = abs(emp.Y2 - state.Y2)
    within = delta <= 3.0 * emp.Y2_stderr
    payload = {
        "Y2_lyapunov": state.Y2,
        "Y2_oracle": emp.Y2,
        "stderr": emp.Y2_stderr,
        "abs_difference": delta,
        "sigma": delta / emp.Y2_stderr if emp.Y2_stderr > 0 else float("inf"),
        "within_3_stderr": bool(within),
        "dt": config.dt,
        "t_burn": config.t_burn,
        "t_sample": config.t_sample,
        "n_traj": config.n_traj,
        "seed": config.seed,
    }
    _emit(payload, args.format, args.output)
    if not within:
        raise PhysicsError(
            f"oracle disagrees with the direct solver: |dY2| = {delta:.3e} "
            f"> 3 * stderr = {3 * emp.Y2_stderr:.3e}"
        )
    return 0


# ---------------------------------------------------------------------------
# parser

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levicav",
        description="Stationary phase-quadrature variance of a cavity-levitated "
                    "nanosphere under gas, photon-recoil, and collapse-model diffusion.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, default_format: str, csl: bool = True, plot: bool = False):
        sp.add_argument("--config", required=True, help="JSON config file")
        sp.add_argument("--output", default="-", help="output path, '-' for stdout")
        sp.add_argument("--format", choices=("csv", "json"), default=default_format)
        if csl:
            sp.add_argument("--csl", choices=("on", "off", "both"), default="both",
                            help="which collapse branch(es) to report")
        if plot:
            sp.add_argument("--plot", default=None, metavar="PATH.svg",
                            help="also render the sweep as an SVG figure")

    sp = sub.add_parser("rates", help="diffusion budget at one operating point")
    common(sp, "json")
    sp.set_defaults(func=_cmd_rates)

    sp = sub.add_parser("steady-state", help="stationary phase variance at one point")
    common(sp, "json")
    sp.set_defaults(func=_cmd_steady_state)

    sp = sub.add_parser("sweep-omega", help="curves versus trap frequency")
    common(sp, "csv", plot=True)
    sp.set_defaults(func=_cmd_sweep_omega)

    sp = sub.add_parser("sweep-length", help="curves versus cavity length")
    common(sp, "csv", plot=True)
    sp.set_defaults(func=_cmd_sweep_length)

    sp = sub.add_parser("bound", help="smallest detectable collapse rate")
    common(sp, "json", csl=False)
    sp.add_argument("--precision", type=float, required=True,
                    help="measurement precision as a relative difference, e.g. 0.015")
    sp.add_argument("--protocol", choices=("length", "omega"), default="length")
    sp.set_defaults(func=_cmd_bound)

    sp = sub.add_parser("verify",
                        help="cross-check the direct solver with stochastic trajectories")
    common(sp, "json")
    sp.add_argument("--seed", type=int, default=None,
                    help="override the oracle seed from the config")
    sp.add_argument("--workers", type=int, default=1,
                    help="trajectory worker threads (result is worker-count independent)")
    sp.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; that code is reserved here
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except PhysicsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
