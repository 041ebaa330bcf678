"""Physical constants used throughout the package (SI, CODATA 2018)."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Constants:
    """Bundle of physical constants.

    A frozen instance is threaded through the parameter chain so that every
    derived quantity is traceable to one constant set.
    """

    hbar: float = 1.054571817e-34      # reduced Planck constant, J s
    k_B: float = 1.380649e-23          # Boltzmann constant, J/K (exact)
    c: float = 299792458.0             # speed of light, m/s (exact)
    m0: float = 1.66053906660e-27      # atomic mass unit, kg
    torr_to_pascal: float = 133.322    # pressure conversion, Pa/Torr


CODATA = Constants()
