"""Backend selection and the physical pair-force entry point.

Force on coil p from coil q, currents folded in:

    F_p = mu_r * 1e-7 * I_p * I_q *
          sum_{i in p} sum_{j in q}
          -[2 (dl_i . dl_j) - 3 (dl_i . rhat)(dl_j . rhat)] rhat / r^2

with r pointing from the source element j to the target element i.  The
summand is odd under swapping the two elements, so swapping the coils negates
the force exactly (Newton's third law holds to the bit, not just to rounding).

A compiled OpenMP kernel is used when the build produced it; a blocked numpy
implementation is the fallback.  Setting EMPIVOT_FORCE_BACKEND=python or
=compiled forces the choice (raising if the compiled kernel is unavailable).
Per-row sums are ordered deterministically in both backends and the final
reduction over rows is a single numpy sum, so a given backend returns
identical bytes regardless of thread count.
"""

from __future__ import annotations

import os
from typing import Optional

import numpy as np

from . import _ampere_py
from .coil import MU0_OVER_4PI, DiscretizedCoil

try:  # pragma: no cover - exercised via the compiled build
    from . import _ampere as _ampere_c
except ImportError:  # pragma: no cover
    _ampere_c = None

#: Pairs closer than this (meters) indicate interpenetrating wire paths.
MIN_PAIR_SEPARATION = 1e-5

_ENV_VAR = "EMPIVOT_FORCE_BACKEND"


class CoilsOverlapError(ValueError):
    """Raised when two discretized coils come closer than the guard distance."""


def available_backends() -> tuple[str, ...]:
    return ("compiled", "python") if _ampere_c is not None else ("python",)


def active_backend(override: Optional[str] = None) -> str:
    """The backend that a pair_force call would use right now."""
    choice = override or os.environ.get(_ENV_VAR)
    if choice is not None:
        choice = choice.strip().lower()
        if choice not in ("compiled", "python"):
            raise ValueError(f"unknown force backend {choice!r}")
        if choice == "compiled" and _ampere_c is None:
            raise RuntimeError("compiled force kernel is not available")
        return choice
    return "compiled" if _ampere_c is not None else "python"


def _row_forces(xp, dp, xq, dq, backend: Optional[str], num_threads: Optional[int]):
    name = active_backend(backend)
    threads = num_threads if num_threads and num_threads > 0 else (os.cpu_count() or 1)
    if name == "compiled":
        return _ampere_c.row_forces(xp, dp, xq, dq, threads)
    return _ampere_py.row_forces(xp, dp, xq, dq, threads)


def pair_force(
    target: DiscretizedCoil,
    source: DiscretizedCoil,
    mu_r: float = 1.0,
    *,
    backend: Optional[str] = None,
    num_threads: Optional[int] = None,
) -> np.ndarray:
    """Net force (newtons, shape (3,)) on ``target`` exerted by ``source``.

    ``mu_r`` is the effective relative permeability multiplier of the shared
    core model.  Raises CoilsOverlapError when any element pair is closer
    than MIN_PAIR_SEPARATION.
    """
    xp = np.ascontiguousarray(target.midpoints, dtype=np.float64)
    dp = np.ascontiguousarray(target.tangents, dtype=np.float64)
    xq = np.ascontiguousarray(source.midpoints, dtype=np.float64)
    dq = np.ascontiguousarray(source.tangents, dtype=np.float64)
    rows, min_r2 = _row_forces(xp, dp, xq, dq, backend, num_threads)
    if min_r2 < MIN_PAIR_SEPARATION**2:
        raise CoilsOverlapError(
            f"element pair at {np.sqrt(min_r2):.3e} m, below the "
            f"{MIN_PAIR_SEPARATION:.0e} m separation guard"
        )
    prefactor = MU0_OVER_4PI * mu_r * target.current * source.current
    return prefactor * rows.sum(axis=0)
