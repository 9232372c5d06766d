"""Maneuver motion prediction with a two-link pendulum about the hinge.

The traveling cube and the cube it pivots against are modeled as two point
masses on massless links of length L (hinge to cube center), rotating in the
plane perpendicular to the hinge axis.  The hinge itself is fixed in the
inertial frame; free-floating rigid-body motion is out of scope for this
preliminary model.  Gravity is absent (microgravity regime).

Electromagnet forces act along the line connecting the paired coil anchors.
In hinge-plane coordinates (x toward the landing cell, y along the hinge
axis, z toward the traveler's start cell) a link at angle theta carries its
cube center at L*(cos theta, sin theta) and its near corners at
s*(cos(theta +/- 45deg), sin(theta +/- 45deg)), s being the cube edge.  Each
anchor sits at a corner, inset from the cube face by half the structural
offset, so two mating anchors on touching faces are exactly one structural
offset apart.  The launch pair faces across the trailing shared face and
repels; the catch pair meets at the landing face and attracts.

Equations of motion come from the generalized-force form m L^2 thetadd_i =
Q_i with Q_i the z-torque of the anchor forces about the hinge, integrated
with fixed-step classical fourth-order Runge-Kutta.  For a traversal the
origin-side link is part of the static structure and stays clamped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

from .coilforce import ForceCurve, force_distance_sweep
from .planner import DEFAULT_PHASE_MS

#: Cube mass in kg (magnets, electronics, shell and frame included).
DEFAULT_MASS = 0.1031
#: Cube edge length, meters.
CUBE_EDGE = 0.060
#: Hinge-to-center link length, meters.
DEFAULT_LINK = math.sqrt(2.0) / 2.0 * CUBE_EDGE

_QUARTER = math.pi / 4.0


class NanDetectedError(RuntimeError):
    """Raised when integration produces a non-finite state."""


@dataclass(frozen=True)
class DynState:
    """Instantaneous two-link configuration.

    ``theta1`` is the origin-side link, ``theta2`` the traveling link,
    measured about the hinge axis in the pivot plane.
    """

    theta1: float
    theta2: float
    omega1: float = 0.0
    omega2: float = 0.0
    t: float = 0.0

    def __post_init__(self):
        for name in ("theta1", "theta2", "omega1", "omega2", "t"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def relative_angle(self) -> float:
        return self.theta2 - self.theta1


def initial_state() -> DynState:
    """Start pose: traveler one cell above the origin cube, at rest."""
    return DynState(theta1=-3.0 * math.pi / 4.0, theta2=3.0 * math.pi / 4.0)


@dataclass(frozen=True)
class DynParams:
    """Model constants and drive curves for one maneuver simulation."""

    launch_curve: ForceCurve  # repulsive pair behind the traveler
    catch_curve: ForceCurve  # attractive pair at the landing face
    mass: float = DEFAULT_MASS
    link: float = DEFAULT_LINK
    edge: float = CUBE_EDGE
    phase_ms: Optional[tuple[int, int, int]] = None  # None: planner defaults
    step: float = 1e-3  # seconds
    timeout: float = 10.0  # seconds
    structural_offset: float = 0.5e-3  # meters, floors anchor separation
    capture_speed: float = 2.0  # m/s, approach-speed ceiling for a clean catch

    def __post_init__(self):
        if self.mass <= 0 or self.link <= 0 or self.edge <= 0:
            raise ValueError("mass, link and edge must be positive")
        if self.step <= 0 or self.timeout <= 0:
            raise ValueError("step and timeout must be positive")
        if self.structural_offset <= 0:
            raise ValueError("structural offset must be positive")

    def phase_schedule(self, kind: str) -> tuple[int, int, int]:
        if self.phase_ms is not None:
            return self.phase_ms
        return DEFAULT_PHASE_MS[kind]


def default_force_curves(
    elements: int = 2000, backend: Optional[str] = None
) -> tuple[ForceCurve, ForceCurve]:
    """Distance sweeps for the default coil pair: (repulsive, attractive)."""
    launch = force_distance_sweep(
        elements=elements, relative_polarity=+1, backend=backend
    )
    catch = force_distance_sweep(
        elements=elements, relative_polarity=-1, backend=backend
    )
    return launch, catch


def default_params(elements: int = 2000, **overrides) -> DynParams:
    launch, catch = default_force_curves(elements=elements)
    return DynParams(launch_curve=launch, catch_curve=catch, **overrides)


# -- anchor geometry -------------------------------------------------------------


def _corner(theta: float, lean: float, edge: float, inset: float):
    """Anchor at the corner ``theta + lean``, inset toward the other corner."""
    ax = edge * math.cos(theta + lean) + inset * math.cos(theta - lean)
    az = edge * math.sin(theta + lean) + inset * math.sin(theta - lean)
    return ax, az


def _launch_anchors(theta1, theta2, params):
    half = 0.5 * params.structural_offset
    a_t = _corner(theta2, +_QUARTER, params.edge, half)
    a_o = _corner(theta1, -_QUARTER, params.edge, half)
    return a_t, a_o


def _catch_anchors(theta1, theta2, params, kind):
    half = 0.5 * params.structural_offset
    b_t = _corner(theta2, -_QUARTER, params.edge, half)
    if kind == "traversal":
        # destination cube's anchor: static, at the far edge of the landing face
        b_o = (params.edge, -half)
    else:
        b_o = _corner(theta1, +_QUARTER, params.edge, half)
    return b_t, b_o


@dataclass(frozen=True)
class AnchorSet:
    """Hinge-plane anchor positions as 3-vectors (y is the hinge axis)."""

    launch_traveler: tuple[float, float, float]
    launch_origin: tuple[float, float, float]
    catch_traveler: tuple[float, float, float]
    catch_origin: tuple[float, float, float]


def em_anchor_positions(
    state: DynState, params: DynParams, kind: str = "pivot"
) -> AnchorSet:
    _check_kind(kind)
    a_t, a_o = _launch_anchors(state.theta1, state.theta2, params)
    b_t, b_o = _catch_anchors(state.theta1, state.theta2, params, kind)

    def lift(p):
        return (p[0], 0.0, p[1])

    return AnchorSet(lift(a_t), lift(a_o), lift(b_t), lift(b_o))


def _pair_torques(anchor_on, anchor_from, curve, offset):
    """z-torques about the hinge on each anchor of an interacting pair.

    The force on ``anchor_on`` points from ``anchor_from`` toward it, scaled
    by the curve value at their separation (positive repels).  Returns the
    torque on each anchor and the separation.
    """
    dx = anchor_on[0] - anchor_from[0]
    dz = anchor_on[1] - anchor_from[1]
    d = math.hypot(dx, dz)
    d_eff = max(d, offset)
    if d_eff > curve.abscissa[-1]:
        # negligible past the sampled range
        return 0.0, 0.0, d
    f = curve.query(d_eff)
    if d == 0.0:
        return 0.0, 0.0, d
    fx = f * dx / d
    fz = f * dz / d
    tq_on = anchor_on[0] * fz - anchor_on[1] * fx
    tq_from = -(anchor_from[0] * fz - anchor_from[1] * fx)
    return tq_on, tq_from, d


def _torques(theta1, theta2, t, params, kind, schedule_s):
    """Generalized forces (Q1, Q2) at time t under the phase gating."""
    t_launch, t_travel = schedule_s
    q1 = 0.0
    q2 = 0.0
    if t < t_launch:
        a_t, a_o = _launch_anchors(theta1, theta2, params)
        tq2, tq1, _ = _pair_torques(
            a_t, a_o, params.launch_curve, params.structural_offset
        )
        q2 += tq2
        q1 += tq1
    if t >= t_launch + t_travel:
        b_t, b_o = _catch_anchors(theta1, theta2, params, kind)
        tq2, tq1, _ = _pair_torques(
            b_t, b_o, params.catch_curve, params.structural_offset
        )
        q2 += tq2
        if kind == "pivot":
            q1 += tq1
    return q1, q2


def _check_kind(kind: str):
    if kind not in ("pivot", "traversal"):
        raise ValueError(f"kind must be 'pivot' or 'traversal': {kind!r}")


def generalized_forces(
    state: DynState, params: DynParams, kind: str = "pivot"
) -> tuple[float, float]:
    """Phase-gated generalized forces (Q1, Q2) at the state's time."""
    _check_kind(kind)
    schedule_ms = params.phase_schedule(kind)
    schedule_s = (schedule_ms[0] / 1000.0, schedule_ms[1] / 1000.0)
    return _torques(state.theta1, state.theta2, state.t, params, kind, schedule_s)


def _derivatives(y, t, params, kind, schedule_s, inertia):
    theta1, omega1, theta2, omega2 = y
    if not all(math.isfinite(v) for v in y):
        raise NanDetectedError(f"non-finite intermediate state at t={t:.6f} s")
    q1, q2 = _torques(theta1, theta2, t, params, kind, schedule_s)
    if kind == "traversal":
        return (0.0, 0.0, omega2, q2 / inertia)
    return (omega1, q1 / inertia, omega2, q2 / inertia)


def _rk4(y, t, dt, params, kind, schedule_s, inertia):
    def f(yy, tt):
        return _derivatives(yy, tt, params, kind, schedule_s, inertia)

    k1 = f(y, t)
    k2 = f([y[i] + 0.5 * dt * k1[i] for i in range(4)], t + 0.5 * dt)
    k3 = f([y[i] + 0.5 * dt * k2[i] for i in range(4)], t + 0.5 * dt)
    k4 = f([y[i] + dt * k3[i] for i in range(4)], t + dt)
    return [
        y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        for i in range(4)
    ]


def step(state: DynState, params: DynParams, kind: str = "pivot") -> DynState:
    """Advance one fixed integration step."""
    _check_kind(kind)
    inertia = params.mass * params.link**2
    schedule_ms = params.phase_schedule(kind)
    schedule_s = (schedule_ms[0] / 1000.0, schedule_ms[1] / 1000.0)
    y = [state.theta1, state.omega1, state.theta2, state.omega2]
    y = _rk4(y, state.t, params.step, params, kind, schedule_s, inertia)
    if not all(math.isfinite(v) for v in y):
        raise NanDetectedError(
            f"non-finite state after step from t={state.t:.6f} s"
        )
    return DynState(y[0], y[2], y[1], y[3], state.t + params.step)


def kinetic_energy(state: DynState, params: DynParams) -> float:
    inertia = params.mass * params.link**2
    return 0.5 * inertia * (state.omega1**2 + state.omega2**2)


def angular_momentum(state: DynState, params: DynParams) -> float:
    """Total angular momentum about the hinge axis."""
    inertia = params.mass * params.link**2
    return inertia * (state.omega1 + state.omega2)


@dataclass(frozen=True)
class SimResult:
    trajectory: tuple[DynState, ...]
    duration: float  # seconds; timeout value when not completed
    completed: bool
    capture_speed: float  # catch-pair approach speed at arrival, m/s
    capture_ok: bool
    kind: str

    def __post_init__(self):
        if not self.trajectory:
            raise ValueError("trajectory must not be empty")


def _catch_approach_speed(state: DynState, params: DynParams, kind: str) -> float:
    """Rate at which the catch-pair separation is closing (positive=closing)."""
    b_t, b_o = _catch_anchors(state.theta1, state.theta2, params, kind)
    # anchor velocity: omega * (position rotated a quarter turn)
    vt = (-b_t[1] * state.omega2, b_t[0] * state.omega2)
    if kind == "traversal":
        vo = (0.0, 0.0)
    else:
        vo = (-b_o[1] * state.omega1, b_o[0] * state.omega1)
    dx = b_t[0] - b_o[0]
    dz = b_t[1] - b_o[1]
    d = math.hypot(dx, dz)
    if d == 0.0:
        return 0.0
    rate = (dx * (vt[0] - vo[0]) + dz * (vt[1] - vo[1])) / d
    return -rate


def simulate_maneuver(
    kind: str,
    params: DynParams,
    start: Optional[DynState] = None,
    record_every: int = 1,
) -> SimResult:
    """Integrate a maneuver until the swept relative angle reaches its target.

    The target is pi for a pivot (two quarter turns) and pi/2 for a
    traversal.  A run that never reaches the target within ``params.timeout``
    is reported with ``completed=False``; nothing is raised.
    """
    _check_kind(kind)
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    state = initial_state() if start is None else start
    target = math.pi if kind == "pivot" else math.pi / 2.0
    rel0 = state.relative_angle

    trajectory = [state]
    sweep_prev = 0.0
    steps = 0
    while state.t < params.timeout:
        prev = state
        state = step(state, params, kind)
        steps += 1
        sweep = abs(state.relative_angle - rel0)
        if sweep >= target:
            # linear interpolation inside the crossing step
            frac = (
                (target - sweep_prev) / (sweep - sweep_prev)
                if sweep > sweep_prev
                else 1.0
            )
            duration = prev.t + frac * params.step
            omega1 = prev.omega1 + frac * (state.omega1 - prev.omega1)
            omega2 = prev.omega2 + frac * (state.omega2 - prev.omega2)
            theta1 = prev.theta1 + frac * (state.theta1 - prev.theta1)
            theta2 = prev.theta2 + frac * (state.theta2 - prev.theta2)
            arrival = DynState(theta1, theta2, omega1, omega2, duration)
            trajectory.append(arrival)
            speed = _catch_approach_speed(arrival, params, kind)
            return SimResult(
                trajectory=tuple(trajectory),
                duration=duration,
                completed=True,
                capture_speed=speed,
                capture_ok=speed <= params.capture_speed,
                kind=kind,
            )
        sweep_prev = sweep
        if steps % record_every == 0:
            trajectory.append(state)
    if trajectory[-1] is not state:
        trajectory.append(state)
    return SimResult(
        trajectory=tuple(trajectory),
        duration=params.timeout,
        completed=False,
        capture_speed=float("nan"),
        capture_ok=False,
        kind=kind,
    )
