"""SVG rendering of sweep results (matplotlib, imported lazily)."""

from __future__ import annotations

from .experiments import SweepResult

_AXIS_LABEL = {
    "omega": r"trap frequency $\omega/2\pi$ (kHz)",
    "length": r"cavity length $L$ (cm)",
}

_RATE_SERIES = [
    ("D_t", "tweezer recoil $D_t$"),
    ("D_c", "cavity recoil $D_c$"),
    ("D_a", "gas $D_a$"),
    ("lambda_sph", r"collapse $\lambda_{sph}$"),
]


def _axis_values(result: SweepResult):
    import math
    if result.axis_name == "omega":
        return result.axis / (2.0 * math.pi * 1e3)
    return result.axis * 100.0


def save_sweep_plot(result: SweepResult, path: str) -> None:
    """Two panels: diffusion budget (log-log) and phase variance (log-x)."""
    from matplotlib.figure import Figure

    x = _axis_values(result)
    fig = Figure(figsize=(10.0, 4.2))
    ax_rates, ax_y2 = fig.subplots(1, 2)

    for attr, label in _RATE_SERIES:
        ax_rates.plot(x, getattr(result, attr), label=label)
    ax_rates.set_xscale("log")
    ax_rates.set_yscale("log")
    ax_rates.set_xlabel(_AXIS_LABEL[result.axis_name])
    ax_rates.set_ylabel(r"diffusion rate (s$^{-1}$)")
    ax_rates.legend(fontsize=8)

    ax_y2.plot(x, result.Y2_on, label=r"$\langle Y^2\rangle$ with collapse")
    ax_y2.plot(x, result.Y2_off, "--", label=r"$\langle Y^2\rangle$ without")
    ax_y2.set_xscale("log")
    ax_y2.set_xlabel(_AXIS_LABEL[result.axis_name])
    ax_y2.set_ylabel(r"stationary $\langle Y^2\rangle$")
    ax_y2.legend(fontsize=8)

    fig.tight_layout()
    fig.savefig(path, format="svg")
