"""Electromagnet pair-force model: coil geometry, kernels, sweeps."""

from .coil import MU0, MU0_OVER_4PI, CoilSpec, DiscretizedCoil, discretize, single_loop
from .kernel import (
    MIN_PAIR_SEPARATION,
    CoilsOverlapError,
    active_backend,
    available_backends,
    pair_force,
)
from .sweeps import (
    DEFAULT_CURRENTS,
    DEFAULT_GAPS,
    ForceCurve,
    PermeabilityModel,
    force_current_sweep,
    force_distance_sweep,
)

__all__ = [
    "MU0",
    "MU0_OVER_4PI",
    "CoilSpec",
    "DiscretizedCoil",
    "discretize",
    "single_loop",
    "MIN_PAIR_SEPARATION",
    "CoilsOverlapError",
    "active_backend",
    "available_backends",
    "pair_force",
    "DEFAULT_CURRENTS",
    "DEFAULT_GAPS",
    "ForceCurve",
    "PermeabilityModel",
    "force_current_sweep",
    "force_distance_sweep",
]
