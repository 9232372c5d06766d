"""Force-versus-separation and force-versus-current sweeps.

Geometry convention: both coil axes along z, centers offset along x by
(outer radius of coil 1) + (outer radius of coil 2) + gap, so ``gap`` is the
free surface-to-surface separation between the two windings.  Reported force
is the x-component acting on coil 2: positive pushes the coils apart,
negative pulls them together.  With opposite drive polarities the pair
attracts, so the reference sweep comes out negative.

The element-pair sum is bilinear in the two drive currents, so the current
sweep evaluates the geometric sum once and scales it by I1*I2 and by the
current-dependent core permeability.
"""

from __future__ import annotations

import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from .coil import CoilSpec, DiscretizedCoil, discretize
from .kernel import active_backend, pair_force


@dataclass(frozen=True)
class PermeabilityModel:
    """Effective relative permeability of the iron core versus drive current.

    Monotone shape-preserving interpolation through measured anchor points;
    queries outside the anchored range clamp to the end values.  The default
    anchors are the two characterized points of the saturating core: mu_r
    2000 unloaded, 874 at the 1.2 A drive limit.
    """

    currents: tuple[float, ...] = (0.0, 1.2)
    values: tuple[float, ...] = (2000.0, 874.0)

    def __post_init__(self):
        if len(self.currents) != len(self.values) or len(self.currents) < 2:
            raise ValueError("need matching current/value anchors, at least two")
        if any(b <= a for a, b in zip(self.currents, self.currents[1:])):
            raise ValueError("anchor currents must increase strictly")
        if any(b > a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("permeability must not increase with current")
        if any(not (1.0 < v <= 2000.0) for v in self.values):
            raise ValueError("permeability anchors must lie in (1, 2000]")

    def __call__(self, current) -> np.ndarray | float:
        interp = PchipInterpolator(self.currents, self.values, extrapolate=False)
        i = np.clip(np.abs(np.asarray(current, dtype=float)),
                    self.currents[0], self.currents[-1])
        out = interp(i)
        if np.isscalar(current) or np.asarray(current).ndim == 0:
            return float(out)
        return out


@dataclass
class ForceCurve:
    """Sampled force curve with smooth interpolation between samples.

    ``query`` interpolates monotonically inside the sampled range.  Below the
    first sample it clamps; beyond the last sample the magnitude tapers as
    the inverse fourth power of distance from the coil midplane gap, the
    far-field falloff of two opposed magnetic moments.
    """

    abscissa: np.ndarray  # sorted sample points (m or A)
    force: np.ndarray  # newtons
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.abscissa = np.asarray(self.abscissa, dtype=float)
        self.force = np.asarray(self.force, dtype=float)
        if self.abscissa.ndim != 1 or self.abscissa.shape != self.force.shape:
            raise ValueError("abscissa and force must be matching 1-D arrays")
        if len(self.abscissa) < 2:
            raise ValueError("a curve needs at least two samples")
        if np.any(np.diff(self.abscissa) <= 0):
            raise ValueError("sample points must increase strictly")

    def _interpolator(self) -> PchipInterpolator:
        # treat the samples as immutable after construction
        interp = self.__dict__.get("_interp")
        if interp is None:
            interp = PchipInterpolator(self.abscissa, self.force, extrapolate=False)
            self.__dict__["_interp"] = interp
        return interp

    def query(self, x) -> np.ndarray | float:
        xs = np.asarray(x, dtype=float)
        scalar = xs.ndim == 0
        xs = np.atleast_1d(xs)
        lo, hi = self.abscissa[0], self.abscissa[-1]
        interp = self._interpolator()
        out = np.empty_like(xs)
        inside = (xs >= lo) & (xs <= hi)
        out[inside] = interp(xs[inside])
        out[xs < lo] = self.force[0]
        far = xs > hi
        if np.any(far):
            # Inverse-quartic taper anchored at the last sample.  ``offset``
            # shifts the pole to the coil midplane so the taper stays finite.
            offset = float(self.meta.get("taper_offset", 0.0))
            ref = hi + offset
            out[far] = self.force[-1] * (ref / (xs[far] + offset)) ** 4
        return float(out[0]) if scalar else out

    # -- plain-text serialization --------------------------------------

    def dumps(self) -> str:
        buf = io.StringIO()
        buf.write("# empivot force curve\n")
        for key in sorted(self.meta):
            buf.write(f"# {key}: {self.meta[key]}\n")
        buf.write("# columns: abscissa force_newtons\n")
        for x, f in zip(self.abscissa, self.force):
            # repr of a float is the shortest digit string that round-trips
            buf.write(f"{float(x)!r} {float(f)!r}\n")
        return buf.getvalue()

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def loads(cls, text: str) -> "ForceCurve":
        meta: dict = {}
        xs: list[float] = []
        fs: list[float] = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if ":" in body:
                    key, _, value = body.partition(":")
                    meta[key.strip()] = value.strip()
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"bad sample line: {line!r}")
            xs.append(float(parts[0]))
            fs.append(float(parts[1]))
        if "taper_offset" in meta:
            meta["taper_offset"] = float(meta["taper_offset"])
        return cls(np.asarray(xs), np.asarray(fs), meta)

    @classmethod
    def load(cls, path) -> "ForceCurve":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.loads(fh.read())


DEFAULT_GAPS = np.round(np.arange(1, 41) * 0.5e-3, 10)
DEFAULT_CURRENTS = np.round(np.arange(0, 25) * 0.05, 10)


def _axis_offset(spec1: CoilSpec, spec2: CoilSpec, gap: float) -> float:
    return spec1.outer_radius + spec2.outer_radius + gap


def _spec_summary(spec: CoilSpec) -> str:
    return (
        f"R={spec.core_radius} len={spec.winding_length} N={spec.turns} "
        f"wire={spec.wire_diameter} layers={spec.layers} I={spec.current}"
    )


def force_distance_sweep(
    spec1: Optional[CoilSpec] = None,
    spec2: Optional[CoilSpec] = None,
    *,
    gaps: Optional[Sequence[float]] = None,
    elements: int = 8000,
    relative_polarity: int = -1,
    mu_model: Optional[PermeabilityModel] = None,
    backend: Optional[str] = None,
    workers: Optional[int] = None,
) -> ForceCurve:
    """Signed axial-parallel pair force over a sweep of surface gaps.

    ``relative_polarity`` +1 drives both coils the same way (repulsion),
    -1 opposes them (attraction, the default reference case).
    """
    if relative_polarity not in (-1, 1):
        raise ValueError("relative_polarity must be +1 or -1")
    spec1 = spec1 or CoilSpec()
    spec2 = spec2 or CoilSpec()
    mu_model = mu_model or PermeabilityModel()
    gap_arr = DEFAULT_GAPS if gaps is None else np.asarray(list(gaps), dtype=float)
    if np.any(gap_arr <= 0):
        raise ValueError("gaps must be positive")

    c1 = discretize(spec1, elements)
    c2 = discretize(spec2, elements).with_current(
        relative_polarity * spec2.current
    )
    mu_r = float(mu_model(max(abs(spec1.current), abs(spec2.current))))

    def one(gap: float) -> float:
        shifted = c2.translated((_axis_offset(spec1, spec2, gap), 0.0, 0.0))
        f = pair_force(shifted, c1, mu_r, backend=backend)
        return float(f[0])

    if workers is None:
        workers = 1 if active_backend(backend) == "compiled" else min(
            4, os.cpu_count() or 1
        )
    if workers > 1 and len(gap_arr) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            forces = list(pool.map(one, gap_arr))
    else:
        forces = [one(g) for g in gap_arr]

    meta = {
        "kind": "force_vs_gap",
        "elements": elements,
        "mu_r": mu_r,
        "current_1": spec1.current,
        "current_2": relative_polarity * spec2.current,
        "relative_polarity": relative_polarity,
        "spec_1": _spec_summary(spec1),
        "spec_2": _spec_summary(spec2),
        "taper_offset": _axis_offset(spec1, spec2, 0.0),
        "backend": active_backend(backend),
    }
    return ForceCurve(gap_arr, np.asarray(forces), meta)


def force_current_sweep(
    spec: Optional[CoilSpec] = None,
    *,
    gap: float = 0.5e-3,
    currents: Optional[Sequence[float]] = None,
    elements: int = 8000,
    relative_polarity: int = -1,
    mu_model: Optional[PermeabilityModel] = None,
    backend: Optional[str] = None,
) -> ForceCurve:
    """Pair force versus drive current (both coils driven at the same level).

    The geometric sum depends only on the wire paths, so it is computed once
    at unit current and scaled by I^2 and by mu_r(I).  Force-ratio identities
    such as F(2I) / F(I) = 4 at fixed permeability therefore hold exactly.
    """
    if relative_polarity not in (-1, 1):
        raise ValueError("relative_polarity must be +1 or -1")
    if gap <= 0:
        raise ValueError("gap must be positive")
    spec = spec or CoilSpec()
    mu_model = mu_model or PermeabilityModel()
    cur_arr = (
        DEFAULT_CURRENTS if currents is None else np.asarray(list(currents), dtype=float)
    )
    if np.any(np.abs(cur_arr) > spec.current_limit + 1e-12):
        raise ValueError("sweep current exceeds the coil current limit")

    shape = discretize(spec, elements)
    unit1 = shape.with_current(1.0)
    unit2 = shape.with_current(float(relative_polarity)).translated(
        (_axis_offset(spec, spec, gap), 0.0, 0.0)
    )
    base = float(pair_force(unit2, unit1, 1.0, backend=backend)[0])

    mu = np.asarray(mu_model(cur_arr), dtype=float)
    forces = base * mu * cur_arr**2
    meta = {
        "kind": "force_vs_current",
        "elements": elements,
        "gap": gap,
        "relative_polarity": relative_polarity,
        "spec": _spec_summary(spec),
        "backend": active_backend(backend),
    }
    return ForceCurve(cur_arr, forces, meta)
