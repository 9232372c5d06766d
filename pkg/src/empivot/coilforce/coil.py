"""Coil specification and wire discretization.

The electromagnet model is a multi-layer helix wound on a cylindrical core:
the first layer's wire centerline sits on the core radius, each further layer
adds one wire diameter, the winding keeps one chirality throughout while the
axial advance alternates direction layer to layer (wind up, wind back down).
A partial last layer starts wherever the previous layer ended.

Discretization cuts the full wire path into ``elements`` pieces of equal arc
length (apportioned across layers by layer arc length).  Element tangents are
exact helix derivatives scaled by the exact per-element arc length, so the
tangent magnitudes sum to the analytic wire length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

#: mu0 / 4 pi, exact in SI.
MU0_OVER_4PI = 1e-7
MU0 = 4e-7 * math.pi


@dataclass(frozen=True)
class CoilSpec:
    """Physical winding parameters of one edge electromagnet.

    Defaults describe the reference hardware coil: 800 turns of 0.16 mm wire
    on a 1.625 mm radius core, 55.5 mm winding length, driven at up to 1.2 A
    (10.5 ohm winding).
    """

    core_radius: float = 1.625e-3
    winding_length: float = 55.5e-3
    turns: int = 800
    wire_diameter: float = 0.16e-3
    pitch: Optional[float] = None
    layers: Optional[int] = None
    current: float = 1.2
    current_limit: float = 1.2
    resistance: float = 10.5

    def __post_init__(self):
        if self.pitch is None:
            object.__setattr__(self, "pitch", self.wire_diameter)
        if self.layers is None:
            per_layer = self.winding_length / self.pitch if self.pitch > 0 else math.inf
            object.__setattr__(
                self, "layers", max(1, math.ceil(self.turns / math.floor(per_layer + 1e-9)))
                if per_layer != math.inf
                else 1,
            )
        self._validate()

    def _validate(self):
        if min(self.core_radius, self.winding_length, self.wire_diameter) <= 0:
            raise ValueError("coil dimensions must be positive")
        if self.turns < 1 or self.layers < 1:
            raise ValueError("turns and layers must be >= 1")
        if self.pitch < 0:
            raise ValueError("pitch must be >= 0")
        if self.pitch == 0 and self.turns > 1:
            raise ValueError("zero pitch only makes sense for a single-turn loop")
        if 0 < self.pitch < self.wire_diameter:
            raise ValueError("pitch below wire diameter (wire would overlap)")
        if abs(self.current) > self.current_limit + 1e-12:
            raise ValueError(
                f"current {self.current} A exceeds limit {self.current_limit} A"
            )
        if self.pitch > 0:
            per_layer = math.floor(self.winding_length / self.pitch + 1e-9)
            if per_layer < 1:
                raise ValueError("winding length shorter than one pitch")
            if per_layer * self.layers < self.turns:
                raise ValueError(
                    f"{self.turns} turns do not fit in {self.layers} layers "
                    f"of {per_layer} turns"
                )

    # -- derived geometry ---------------------------------------------------

    def layer_turns(self) -> list[int]:
        """Turn count per layer, filled sequentially."""
        if self.pitch == 0:
            return [self.turns]
        per_layer = math.floor(self.winding_length / self.pitch + 1e-9)
        out = []
        remaining = self.turns
        for _ in range(self.layers):
            n = min(per_layer, remaining)
            out.append(n)
            remaining -= n
            if remaining == 0:
                break
        return out

    def layer_radii(self) -> list[float]:
        return [
            self.core_radius + k * self.wire_diameter
            for k in range(len(self.layer_turns()))
        ]

    @property
    def outer_radius(self) -> float:
        """Radius of the outermost wire surface."""
        radii = self.layer_radii()
        return radii[-1] + self.wire_diameter / 2.0

    @property
    def wire_length(self) -> float:
        """Analytic helix arc length over all layers."""
        total = 0.0
        for n, r in zip(self.layer_turns(), self.layer_radii()):
            total += n * math.sqrt((2 * math.pi * r) ** 2 + self.pitch**2)
        return total

    def with_current(self, current: float) -> "CoilSpec":
        return replace(self, current=current)


def single_loop(radius: float, current: float = 1.0) -> CoilSpec:
    """One circular turn of negligible pitch (oracle/test geometry)."""
    return CoilSpec(
        core_radius=radius,
        winding_length=radius,  # unused at zero pitch
        turns=1,
        wire_diameter=radius * 1e-3,
        pitch=0.0,
        layers=1,
        current=current,
        current_limit=max(1.2, abs(current)),
    )


@dataclass
class DiscretizedCoil:
    """Wire path cut into current elements: midpoints + tangent*arclength."""

    midpoints: np.ndarray  # (D, 3) float64
    tangents: np.ndarray  # (D, 3) float64, |row| = element arc length
    current: float
    spec: CoilSpec = field(repr=False, default=None)

    @property
    def elements(self) -> int:
        return self.midpoints.shape[0]

    @property
    def wire_length(self) -> float:
        return float(np.sum(np.linalg.norm(self.tangents, axis=1)))

    def translated(self, offset) -> "DiscretizedCoil":
        off = np.asarray(offset, dtype=float)
        return DiscretizedCoil(
            self.midpoints + off, self.tangents, self.current, self.spec
        )

    def with_current(self, current: float) -> "DiscretizedCoil":
        return DiscretizedCoil(self.midpoints, self.tangents, current, self.spec)


def _apportion(total: int, weights: list[float]) -> list[int]:
    """Largest-remainder apportionment of ``total`` items by weight."""
    wsum = sum(weights)
    raw = [total * w / wsum for w in weights]
    base = [int(math.floor(x)) for x in raw]
    short = total - sum(base)
    order = sorted(range(len(raw)), key=lambda i: raw[i] - base[i], reverse=True)
    for i in order[:short]:
        base[i] += 1
    return base


def discretize(spec: CoilSpec, elements: int = 8000) -> DiscretizedCoil:
    """Cut the coil wire into ``elements`` equal-arc-length current elements.

    The coil axis is z, centered near the origin.  Raises ValueError when
    ``elements`` is below one element per turn.
    """
    if elements < spec.turns:
        raise ValueError(
            f"element count {elements} below one per turn ({spec.turns})"
        )
    turns = spec.layer_turns()
    radii = spec.layer_radii()
    layer_len = [
        n * math.sqrt((2 * math.pi * r) ** 2 + spec.pitch**2)
        for n, r in zip(turns, radii)
    ]
    counts = _apportion(elements, layer_len)

    mids = np.empty((elements, 3), dtype=np.float64)
    tans = np.empty((elements, 3), dtype=np.float64)

    phi0 = 0.0
    z0 = -0.5 * turns[0] * spec.pitch  # center the first layer on z = 0
    advance = 1.0
    row = 0
    for n, r, d_k in zip(turns, radii, counts):
        span = n * 2.0 * math.pi
        dphi = span / d_k
        j = np.arange(d_k)
        phi = phi0 + (j + 0.5) * dphi
        dz_dphi = advance * spec.pitch / (2.0 * math.pi)
        z = z0 + dz_dphi * (phi - phi0)
        mids[row : row + d_k, 0] = r * np.cos(phi)
        mids[row : row + d_k, 1] = r * np.sin(phi)
        mids[row : row + d_k, 2] = z
        tans[row : row + d_k, 0] = -r * np.sin(phi) * dphi
        tans[row : row + d_k, 1] = r * np.cos(phi) * dphi
        tans[row : row + d_k, 2] = dz_dphi * dphi
        row += d_k
        phi0 += span
        z0 += advance * spec.pitch * n
        advance = -advance
    return DiscretizedCoil(mids, tans, spec.current, spec)
