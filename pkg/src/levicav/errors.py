"""Error taxonomy.

ConfigError covers malformed or out-of-range inputs (bad key, bad unit,
negative radius); PhysicsError covers structurally valid inputs that land
outside the physical domain (unstable dynamics, cavity longer than the
confocal limit). The CLI maps them to distinct exit codes.
"""

from __future__ import annotations


class ConfigError(ValueError):
    """Invalid configuration: unknown key, bad unit, or out-of-range value."""


class PhysicsError(ValueError):
    """Valid configuration outside the physical domain of the model."""
