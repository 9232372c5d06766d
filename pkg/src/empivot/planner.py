"""Maneuver resolution: pivots and traversals with electromagnet schedules.

Geometry conventions (the single source of truth for the planning math):

* A request names the traveling cube T, a rotation axis (X/Y/Z) and a
  direction; CCW means the right-hand rule about the positive axis, so the
  angular velocity direction is ``omega = direction * axis_unit``.
* T needs an occupied face neighbor whose shared face is parallel to the
  rotation axis; that neighbor is the maneuver origin O.  With ``w`` the
  unit normal from O toward T, the horizontal swing direction at launch is
  ``u = omega x w``.
* Landing cells: d1 = T + u (quarter turn) and d2 = O + u (half turn).
  d1 occupied blocks the maneuver.  d2 occupied makes it a traversal
  (quarter turn, T lands on d1, destination = the cube at d2); d2 free makes
  it a pivot (half turn, T lands on d2, destination = O).
* Candidate origins are scanned in the fixed face order +z, -z, +y, -y,
  +x, -x and the first occupied perpendicular neighbor wins.  When the
  selected maneuver is unobstructed this is provably the only neighbor whose
  maneuver is unobstructed (any other candidate's landing or swept cell is
  then occupied), so the scan order only decides which error is reported,
  never which plan is produced.
* Edge midpoints use doubled integer coordinates; all selection math is
  exact.  Edge positions, with t2 = 2*T, o2 = 2*O:
      hinge pair      t2 + u - w   (leading side of the shared face)
      launch repel    t2 - u - w   (trailing side of the shared face)
      pivot catch     o2 + u - w   (far side of the new shared face)
      traversal catch 2*d2 + u + w
      attach pairs    o2 + u +/- axis_unit (origin-destination face,
                      edges orthogonal to the hinge axis)
  The traveler's catch electromagnet is resolved in its landing pose, since
  that is where the physical magnet ends up when the catch engages.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .lattice import (
    AXIS_UNITS,
    Cube,
    GridAddress,
    IntVec,
    LatticeState,
    Orientation,
    WorldEdge,
    axis_index,
    snap_orientation,
    vec_add,
    vec_cross,
    vec_neg,
    vec_scale,
    vec_sub,
    world_edge_to_em,
)

HALF_PI = 1.5707963267948966

PHASE_NAMES = ("launch", "travel", "catch")

#: Default per-phase durations in milliseconds, totaling the measured
#: maneuver spans (1530 ms half-turn, 1030 ms quarter-turn).
DEFAULT_PHASE_MS = {
    "pivot": (400, 930, 200),
    "traversal": (400, 430, 200),
}

#: Fixed candidate scan order for the origin face.
FACE_SCAN_ORDER: tuple[IntVec, ...] = (
    (0, 0, 1),
    (0, 0, -1),
    (0, 1, 0),
    (0, -1, 0),
    (1, 0, 0),
    (-1, 0, 0),
)

CCW, CW = 1, -1
_DIRECTION_NAMES = {"ccw": CCW, "cw": CW}


def direction_value(direction: int | str) -> int:
    """Normalize a rotation direction: +1 (CCW) or -1 (CW), or their names."""
    if isinstance(direction, str):
        try:
            return _DIRECTION_NAMES[direction.lower()]
        except KeyError:
            raise ValueError(f"unknown direction {direction!r}") from None
    if direction not in (CCW, CW):
        raise ValueError(f"direction must be +1 (ccw) or -1 (cw): {direction}")
    return direction


def direction_name(direction: int) -> str:
    return "ccw" if direction_value(direction) == CCW else "cw"


class PlannerError(Exception):
    """Base class for maneuver resolution failures."""


class UnknownCubeError(PlannerError):
    pass


class NoValidHingeError(PlannerError):
    pass


class ObstructedPathError(PlannerError):
    def __init__(self, message: str, report: "ClearanceReport"):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class ManeuverRequest:
    """One requested rotation: which cube, about which axis, which way."""

    cube_id: int
    axis: int
    direction: int

    def __post_init__(self):
        object.__setattr__(self, "axis", axis_index(self.axis))
        object.__setattr__(self, "direction", direction_value(self.direction))

    def inverse(self) -> "ManeuverRequest":
        return ManeuverRequest(self.cube_id, self.axis, -self.direction)


@dataclass(frozen=True)
class EmAssignment:
    """One electromagnet drive: polarity +1/-1, or 0 for OFF."""

    cube_id: int
    em: int
    polarity: int

    def __post_init__(self):
        if not 1 <= self.em <= 12:
            raise ValueError(f"electromagnet id out of range: {self.em}")
        if self.polarity not in (-1, 0, 1):
            raise ValueError(f"polarity must be -1, 0 or +1: {self.polarity}")
        if self.cube_id < 1:
            raise ValueError(f"cube id must be >= 1: {self.cube_id}")


@dataclass(frozen=True)
class Phase:
    name: str
    duration_ms: int
    assignments: frozenset[EmAssignment]

    def __post_init__(self):
        if self.name not in PHASE_NAMES:
            raise ValueError(f"unknown phase {self.name!r}")
        if self.duration_ms <= 0:
            raise ValueError("phase duration must be positive")


@dataclass(frozen=True)
class ClearanceReport:
    """Cells the swing needs empty, and which of them are occupied."""

    required_empty: tuple[GridAddress, ...]
    blocking: tuple[GridAddress, ...]

    @property
    def clear(self) -> bool:
        return not self.blocking


@dataclass(frozen=True)
class ManeuverPlan:
    kind: str  # "pivot" | "traversal"
    traveling_id: int
    origin_id: int
    destination_id: int
    axis: int
    direction: int
    quarter_turns: int  # 2 for pivot, 1 for traversal
    hinge: WorldEdge
    landing_address: GridAddress
    landing_orientation: Orientation
    phases: tuple[Phase, ...]
    clearance: ClearanceReport
    warnings: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind == "pivot":
            if self.origin_id != self.destination_id or self.quarter_turns != 2:
                raise ValueError("pivot must return to its origin cube")
        elif self.kind == "traversal":
            if self.origin_id == self.destination_id or self.quarter_turns != 1:
                raise ValueError("traversal needs a distinct destination cube")
        else:
            raise ValueError(f"unknown maneuver kind {self.kind!r}")

    @property
    def angle(self) -> float:
        return self.quarter_turns * HALF_PI

    def phase(self, name: str) -> Phase:
        for p in self.phases:
            if p.name == name:
                return p
        raise KeyError(name)

    def all_assignments(self) -> frozenset[EmAssignment]:
        out: set[EmAssignment] = set()
        for p in self.phases:
            out |= p.assignments
        return frozenset(out)


def clearance_cells(
    traveler: GridAddress, u: IntVec, w: IntVec, quarter_turns: int
) -> tuple[GridAddress, ...]:
    """Cells the swept cube body protrudes into, in address coordinates.

    The swing carries the cube corner on a radius-sqrt(2) arc about the
    hinge, so each quarter turn claims the landing cell plus the two cells
    the arc bulges through.  A half turn continues into the mirrored triple
    on the far side.  Zero quarter turns sweep nothing.
    """
    t = tuple(traveler)
    if quarter_turns == 0:
        return ()
    if quarter_turns not in (1, 2):
        raise ValueError("quarter_turns must be 0, 1 or 2")
    cells = [
        vec_add(t, u),  # d1, the quarter-turn landing cell
        vec_add(t, w),  # arc bulge above the traveler
        vec_add(vec_add(t, u), w),  # arc bulge above d1
    ]
    if quarter_turns == 2:
        d2 = vec_sub(vec_add(t, u), w)
        cells += [
            d2,  # the half-turn landing cell
            vec_add(d2, u),  # arc bulge beyond d2
            vec_add(vec_add(t, u), u),  # arc bulge beyond d1
        ]
    return tuple(sorted(set(cells)))


def _edge_pair(
    axis: int,
    mid2: IntVec,
    cube_a: Cube,
    cube_b: Cube,
    pol_a: int,
    pol_b: int,
) -> tuple[EmAssignment, EmAssignment]:
    edge = WorldEdge.from_mid2(axis, mid2)
    return (
        EmAssignment(cube_a.cube_id, world_edge_to_em(cube_a, edge), pol_a),
        EmAssignment(cube_b.cube_id, world_edge_to_em(cube_b, edge), pol_b),
    )


def resolve_maneuver(
    state: LatticeState,
    req: ManeuverRequest,
    phase_ms: Optional[tuple[int, int, int]] = None,
) -> ManeuverPlan:
    """Resolve a rotation request against the lattice.

    Raises UnknownCubeError, NoValidHingeError, or ObstructedPathError; on
    success returns the fully assigned plan (the state is not modified).
    ``phase_ms`` overrides the default per-phase durations.
    """
    if not state.has_cube(req.cube_id):
        raise UnknownCubeError(f"no cube with id {req.cube_id}")
    traveler = state.cube(req.cube_id)
    t = traveler.address
    axis_unit = AXIS_UNITS[req.axis]
    omega = vec_scale(axis_unit, req.direction)

    origin_face: Optional[IntVec] = None
    for f in FACE_SCAN_ORDER:
        if vec_cross(f, axis_unit) == (0, 0, 0):
            continue  # face parallel to the axis has no axis-parallel edges
        if state.occupied(vec_add(t, f)):
            origin_face = f
            break
    if origin_face is None:
        raise NoValidHingeError(
            f"cube {req.cube_id} has no face neighbor sharing an edge "
            f"parallel to axis {req.axis}"
        )

    origin_id = state.occupant(vec_add(t, origin_face))
    origin = state.cube(origin_id)
    w = vec_neg(origin_face)  # unit normal, origin toward traveler
    u = vec_cross(omega, w)  # horizontal swing direction at launch

    d1 = vec_add(t, u)
    d2 = vec_add(origin.address, u)
    if state.occupied(d2):
        kind, quarter_turns, landing = "traversal", 1, d1
        destination_id = state.occupant(d2)
    else:
        kind, quarter_turns, landing = "pivot", 2, d2
        destination_id = origin_id

    required = clearance_cells(t, u, w, quarter_turns)
    blocking = tuple(c for c in required if state.occupied(c))
    report = ClearanceReport(required, blocking)
    if blocking:
        raise ObstructedPathError(
            f"maneuver path obstructed at {', '.join(map(str, blocking))}",
            report,
        )
    # the route is clear; now reject travelers that other cubes hang from
    if state.component_count(exclude=req.cube_id) > state.component_count():
        raise NoValidHingeError(
            f"cube {req.cube_id} is a structural cut point; moving it alone "
            f"would strand the cubes attached through it"
        )

    q_rot = Orientation.from_axis_angle(omega, quarter_turns * HALF_PI)
    landing_orientation = snap_orientation(q_rot * traveler.orientation)
    landed = Cube(traveler.cube_id, landing, landing_orientation)

    t2 = vec_scale(t, 2)
    o2 = vec_scale(origin.address, 2)
    hinge_mid2 = vec_add(vec_sub(t2, w), u)
    repel_mid2 = vec_sub(vec_sub(t2, w), u)

    hinge_pair = _edge_pair(req.axis, hinge_mid2, traveler, origin, +1, -1)
    repel_pair = _edge_pair(req.axis, repel_mid2, traveler, origin, +1, +1)

    attach: tuple[EmAssignment, ...] = ()
    if kind == "traversal":
        destination = state.cube(destination_id)
        low, high = sorted((origin, destination), key=lambda c: c.cube_id)
        attach_axis = next(
            i for i in range(3) if axis_unit[i] == 0 and u[i] == 0
        )
        face_mid2 = vec_add(o2, u)
        pairs = []
        for s in (1, -1):
            mid2 = vec_add(face_mid2, vec_scale(axis_unit, s))
            pairs.extend(_edge_pair(attach_axis, mid2, low, high, +1, -1))
        attach = tuple(pairs)

    if kind == "pivot":
        catch_mid2 = vec_sub(vec_add(o2, u), w)
        catch_other = origin
    else:
        catch_mid2 = vec_add(vec_add(vec_scale(d2, 2), u), w)
        catch_other = state.cube(destination_id)
    catch_pair = _edge_pair(req.axis, catch_mid2, landed, catch_other, +1, -1)

    launch = frozenset(repel_pair + hinge_pair + attach)
    travel = frozenset(hinge_pair + attach)
    catch = frozenset(catch_pair + attach)
    durations = DEFAULT_PHASE_MS[kind] if phase_ms is None else tuple(phase_ms)
    if len(durations) != 3 or any(int(d) <= 0 for d in durations):
        raise ValueError("phase_ms must be three positive durations")
    phases = tuple(
        Phase(name, ms, assigns)
        for name, ms, assigns in zip(
            PHASE_NAMES, durations, (launch, travel, catch)
        )
    )

    warnings = []
    post = state.copy()
    post.move(traveler.cube_id, landing, landing_orientation)
    if not post.is_connected():
        warnings.append("lattice is not fully face-connected after this maneuver")

    return ManeuverPlan(
        kind=kind,
        traveling_id=traveler.cube_id,
        origin_id=origin_id,
        destination_id=destination_id,
        axis=req.axis,
        direction=req.direction,
        quarter_turns=quarter_turns,
        hinge=WorldEdge.from_mid2(req.axis, hinge_mid2),
        landing_address=landing,
        landing_orientation=landing_orientation,
        phases=phases,
        clearance=report,
        warnings=tuple(warnings),
    )


def apply_plan(state: LatticeState, plan: ManeuverPlan) -> LatticeState:
    """Return a new lattice with the plan's move applied."""
    out = state.copy()
    out.move(plan.traveling_id, plan.landing_address, plan.landing_orientation)
    return out
