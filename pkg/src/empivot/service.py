"""Authoritative simulation sessions for interactive clients.

A :class:`Session` owns a lattice state and accepts maneuver requests one
at a time.  Each accepted maneuver produces an ordered batch of events
(``accepted``, ``launch``, ``travel``, ``catch``, ``settled``) whose
timestamps are in *simulation time* — a deterministic millisecond clock
that advances by the maneuver's phase durations plus a fixed settling gap.
Wall-clock pacing is separate: the session stays *busy* for the maneuver's
real-time duration divided by the animation speed, and requests arriving
while busy are rejected (never queued) with a ``busy`` error event.

Because event times and history never depend on the wall clock, replaying
the recorded history against the starting scenario reproduces the exact
same states and exported timelines byte for byte.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Iterable, Optional

from .codec import MESSAGE_SLOT_MS, CommandTimeline, TimelineEntry, compile_timeline
from .lattice import LatticeState, axis_index, orientation_index
from .planner import (
    ManeuverPlan,
    ManeuverRequest,
    NoValidHingeError,
    ObstructedPathError,
    PlannerError,
    UnknownCubeError,
    apply_plan,
    direction_name,
    resolve_maneuver,
)
from .scenario import Scenario, retime_plan

__all__ = [
    "DEFAULT_GAP_MS",
    "RENDER_FIDELITIES",
    "HistoryRangeError",
    "SessionSettings",
    "SessionEvent",
    "ManeuverRecord",
    "Session",
    "compile_script",
    "create_session",
]

#: Quiet period inserted between consecutive maneuvers, both on the
#: simulation clock and between segments of an exported command timeline.
DEFAULT_GAP_MS = 500

RENDER_FIDELITIES = ("full", "proxy")

_AXIS_NAMES = "xyz"


class HistoryRangeError(ValueError):
    """An export range does not lie within the session history."""


@dataclass(frozen=True)
class SessionSettings:
    """Client presentation preferences held server-side per session.

    ``animation_speed`` scales wall-clock pacing only (2.0 plays twice as
    fast); simulation-time event stamps are unaffected.  The remaining
    fields are hints the renderer reads back: ``render_fidelity`` selects
    full meshes versus cheap proxy boxes, and the two flags toggle cube id
    labels and the occupancy-grid overlay.
    """

    animation_speed: float = 1.0
    render_fidelity: str = "full"
    show_ids: bool = False
    show_occupancy: bool = False

    def __post_init__(self):
        if not (self.animation_speed > 0.0):
            raise ValueError("animation_speed must be positive")
        if self.render_fidelity not in RENDER_FIDELITIES:
            raise ValueError(
                f"render_fidelity must be one of {RENDER_FIDELITIES}"
            )
        for flag in ("show_ids", "show_occupancy"):
            if not isinstance(getattr(self, flag), bool):
                raise ValueError(f"{flag} must be a bool")

    def to_dict(self) -> dict[str, Any]:
        return {
            "animation_speed": self.animation_speed,
            "render_fidelity": self.render_fidelity,
            "show_ids": self.show_ids,
            "show_occupancy": self.show_occupancy,
        }


@dataclass(frozen=True)
class SessionEvent:
    """One entry of a session's event stream.

    ``t_ms`` is simulation time (milliseconds since the session started);
    ``seq`` is a session-wide ordinal so clients can detect gaps.
    """

    kind: str
    t_ms: int
    seq: int
    payload: dict[str, Any] = field(default_factory=dict)

    _KINDS = ("accepted", "launch", "travel", "catch", "settled", "error")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")
        if self.t_ms < 0 or self.seq < 0:
            raise ValueError("event time and sequence must be non-negative")

    def to_dict(self) -> dict[str, Any]:
        out = dict(self.payload)
        out.update({"kind": self.kind, "t_ms": self.t_ms, "seq": self.seq})
        return out


@dataclass(frozen=True)
class ManeuverRecord:
    """A committed maneuver: what was asked, what was planned, and when
    (simulation time) it started."""

    index: int
    request: ManeuverRequest
    plan: ManeuverPlan
    start_ms: int

    @property
    def total_ms(self) -> int:
        return sum(p.duration_ms for p in self.plan.phases)


def _request_payload(request: ManeuverRequest) -> dict[str, Any]:
    return {
        "cube": request.cube_id,
        "axis": _AXIS_NAMES[request.axis],
        "direction": direction_name(request.direction),
    }


class Session:
    """Single-writer simulation session.

    All mutating operations are serialized through one internal lock, so a
    session may be shared between a socket handler and local callers; reads
    hand out snapshots.  The ``clock`` callable (seconds, monotonic) exists
    so tests can drive the busy window deterministically.
    """

    def __init__(
        self,
        scenario: Scenario,
        *,
        clock: Callable[[], float] = time.monotonic,
        gap_ms: int = DEFAULT_GAP_MS,
        session_id: Optional[str] = None,
    ):
        if gap_ms < MESSAGE_SLOT_MS:
            raise ValueError(
                f"gap_ms must be at least one {MESSAGE_SLOT_MS} ms message slot"
            )
        self.session_id = session_id if session_id else uuid.uuid4().hex
        self._scenario = scenario
        self._state = scenario.initial_state()
        self._clock = clock
        self._gap_ms = int(gap_ms)
        self._lock = threading.RLock()
        self._history: list[ManeuverRecord] = []
        self._events: list[SessionEvent] = []
        self._settings = SessionSettings()
        self._sim_ms = 0  # simulation clock, advanced per committed maneuver
        self._busy_until = float("-inf")  # wall clock, from self._clock
        self._subscribers: list[Callable[[SessionEvent], None]] = []

    # -- introspection -------------------------------------------------------

    @property
    def scenario(self) -> Scenario:
        return self._scenario

    @property
    def settings(self) -> SessionSettings:
        return self._settings

    @property
    def gap_ms(self) -> int:
        return self._gap_ms

    @property
    def sim_time_ms(self) -> int:
        """Simulation clock: end of the last settling gap."""
        return self._sim_ms

    @property
    def history(self) -> tuple[ManeuverRecord, ...]:
        with self._lock:
            return tuple(self._history)

    @property
    def events(self) -> tuple[SessionEvent, ...]:
        with self._lock:
            return tuple(self._events)

    @property
    def busy(self) -> bool:
        """True while a maneuver is still playing out on the wall clock."""
        return self._clock() < self._busy_until

    def state_snapshot(self) -> LatticeState:
        """Copy of the current lattice; mutating it cannot touch the session."""
        with self._lock:
            return self._state.copy()

    def state_hash(self) -> str:
        with self._lock:
            return self._state.state_hash()

    def canonical_lines(self) -> list[str]:
        with self._lock:
            return self._state.canonical_lines()

    # -- settings ------------------------------------------------------------

    def update_settings(self, **changes: Any) -> SessionSettings:
        """Apply a partial settings update; unknown keys are rejected."""
        with self._lock:
            allowed = set(SessionSettings.__dataclass_fields__)
            unknown = set(changes) - allowed
            if unknown:
                raise ValueError(
                    f"unknown settings: {', '.join(sorted(unknown))}"
                )
            self._settings = replace(self._settings, **changes)
            return self._settings

    # -- event plumbing ------------------------------------------------------

    def subscribe(self, callback: Callable[[SessionEvent], None]) -> Callable[[], None]:
        """Register an event observer; returns an unsubscribe function."""
        with self._lock:
            self._subscribers.append(callback)

        def cancel() -> None:
            with self._lock:
                if callback in self._subscribers:
                    self._subscribers.remove(callback)

        return cancel

    def _emit(self, kind: str, t_ms: int, payload: dict[str, Any]) -> SessionEvent:
        event = SessionEvent(kind, t_ms, len(self._events), payload)
        self._events.append(event)
        for callback in list(self._subscribers):
            callback(event)
        return event

    # -- maneuvers -----------------------------------------------------------

    def request_maneuver(self, request: ManeuverRequest) -> list[SessionEvent]:
        """Plan, commit, and announce one maneuver.

        Returns the batch of events the request produced.  A request that
        cannot run yields exactly one ``error`` event (codes ``busy``,
        ``unknown-cube``, ``no-valid-hinge``, ``obstructed``) and leaves
        state, history, and the simulation clock untouched.  Requests made
        while a maneuver is in flight are rejected, never queued.
        """
        with self._lock:
            if self.busy:
                return [
                    self._emit(
                        "error",
                        self._sim_ms,
                        {
                            "code": "busy",
                            "message": "a maneuver is already in flight",
                            "request": _request_payload(request),
                        },
                    )
                ]
            try:
                plan = resolve_maneuver(self._state, request)
            except PlannerError as exc:
                return [self._emit("error", self._sim_ms, self._error_payload(exc, request))]

            plan = retime_plan(plan, self._scenario.phase_ms(plan.kind))
            record = ManeuverRecord(
                index=len(self._history),
                request=request,
                plan=plan,
                start_ms=self._sim_ms,
            )
            self._state = apply_plan(self._state, plan)
            self._history.append(record)

            total_ms = record.total_ms
            self._busy_until = self._clock() + (
                total_ms / 1000.0
            ) / self._settings.animation_speed
            events = self._announce(record)
            self._sim_ms = record.start_ms + total_ms + self._gap_ms
            return events

    def _announce(self, record: ManeuverRecord) -> list[SessionEvent]:
        plan = record.plan
        base = record.start_ms
        events = [
            self._emit(
                "accepted",
                base,
                {
                    "maneuver": record.index,
                    "request": _request_payload(record.request),
                    "maneuver_kind": plan.kind,
                    "traveler": plan.traveling_id,
                    "origin": plan.origin_id,
                    "destination": plan.destination_id,
                    "landing": list(plan.landing_address),
                    # Swing geometry so a display client can animate the
                    # rotation without re-deriving the plan: right-hand
                    # rotation of ``direction * quarter_turns * 90°`` about
                    # the +hinge-axis line through ``midpoint``.
                    "hinge": {
                        "axis": _AXIS_NAMES[plan.hinge.axis],
                        "midpoint": list(plan.hinge.midpoint),
                    },
                    "direction": plan.direction,
                    "quarter_turns": plan.quarter_turns,
                    "required_empty": [
                        list(c) for c in plan.clearance.required_empty
                    ],
                    "total_ms": record.total_ms,
                    "warnings": list(plan.warnings),
                },
            )
        ]
        t = base
        for phase in plan.phases:
            events.append(
                self._emit(
                    phase.name,
                    t,
                    {
                        "maneuver": record.index,
                        "duration_ms": phase.duration_ms,
                        "assignments": len(phase.assignments),
                        "drives": [
                            [a.cube_id, a.em, a.polarity]
                            for a in sorted(
                                phase.assignments,
                                key=lambda a: (a.cube_id, a.em),
                            )
                        ],
                    },
                )
            )
            t += phase.duration_ms
        events.append(
            self._emit(
                "settled",
                t,
                {
                    "maneuver": record.index,
                    "state_hash": self._state.state_hash(),
                    "cube": plan.traveling_id,
                    "landing": list(plan.landing_address),
                },
            )
        )
        return events

    def _error_payload(
        self, exc: PlannerError, request: ManeuverRequest
    ) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "message": str(exc),
            "request": _request_payload(request),
        }
        if isinstance(exc, UnknownCubeError):
            payload["code"] = "unknown-cube"
        elif isinstance(exc, ObstructedPathError):
            payload["code"] = "obstructed"
            payload["blocking"] = [list(c) for c in exc.report.blocking]
            payload["required_empty"] = [
                list(c) for c in exc.report.required_empty
            ]
        elif isinstance(exc, NoValidHingeError):
            payload["code"] = "no-valid-hinge"
        else:
            payload["code"] = "planner-error"
        return payload

    # -- export and replay ---------------------------------------------------

    def export_timeline(
        self, start: int = 0, stop: Optional[int] = None
    ) -> CommandTimeline:
        """Compile a contiguous range of committed maneuvers to command words.

        ``start``/``stop`` index the history like a slice: ``[start, stop)``.
        Segments are laid out at their recorded simulation offsets, rebased
        so the first requested maneuver starts at 0; the settling gap
        therefore separates consecutive segments.  An empty range yields an
        empty timeline; a range outside ``0..len(history)`` raises
        :class:`HistoryRangeError`.
        """
        with self._lock:
            count = len(self._history)
            if stop is None:
                stop = count
            if not (0 <= start <= stop <= count):
                raise HistoryRangeError(
                    f"range [{start}, {stop}) not within history of {count} maneuvers"
                )
            records = self._history[start:stop]
            if not records:
                return CommandTimeline([], start_ms=0)
            base = records[0].start_ms
            entries: list[TimelineEntry] = []
            for record in records:
                segment = compile_timeline(
                    record.plan, start_ms=record.start_ms - base
                )
                entries.extend(segment.entries)
            return CommandTimeline(entries, start_ms=0)

    def replay_state(self) -> LatticeState:
        """Re-derive the current state from the scenario and history alone."""
        with self._lock:
            state = self._scenario.initial_state()
            for record in self._history:
                state = apply_plan(state, record.plan)
            return state

    def verify_replay(self) -> bool:
        """Deterministic-replay invariant: history reproduces the live state."""
        with self._lock:
            return (
                self.replay_state().canonical_lines()
                == self._state.canonical_lines()
            )

    # -- serialization helpers for transport layers ---------------------------

    def describe(self) -> dict[str, Any]:
        """JSON-ready summary of the whole session."""
        with self._lock:
            return {
                "session": self.session_id,
                "name": self._scenario.name,
                "state": self.state_payload(),
                "settings": self._settings.to_dict(),
                "script": [_request_payload(r) for r in self._scenario.script],
                "maneuvers": len(self._history),
                "sim_time_ms": self._sim_ms,
                "gap_ms": self._gap_ms,
            }

    def state_payload(self) -> dict[str, Any]:
        with self._lock:
            cubes = [
                {
                    "id": cube.cube_id,
                    "x": cube.address[0],
                    "y": cube.address[1],
                    "z": cube.address[2],
                    "orientation": orientation_index(cube.orientation),
                }
                for cube in sorted(self._state.cubes(), key=lambda c: c.cube_id)
            ]
            return {"cubes": cubes, "hash": self._state.state_hash()}


def create_session(
    scenario: Scenario,
    *,
    clock: Callable[[], float] = time.monotonic,
    gap_ms: int = DEFAULT_GAP_MS,
    session_id: Optional[str] = None,
) -> Session:
    """Start a session from a validated scenario."""
    return Session(
        scenario, clock=clock, gap_ms=gap_ms, session_id=session_id
    )


def compile_script(
    plans: Iterable[ManeuverPlan], *, gap_ms: int = DEFAULT_GAP_MS
) -> CommandTimeline:
    """Compile a plan sequence into one timeline, segments gap_ms apart.

    This is the batch counterpart of :meth:`Session.export_timeline`: a
    session that committed exactly these plans exports the identical bytes.
    """
    if gap_ms < MESSAGE_SLOT_MS:
        raise ValueError(
            f"gap_ms must be at least one {MESSAGE_SLOT_MS} ms message slot"
        )
    entries: list[TimelineEntry] = []
    start = 0
    for plan in plans:
        segment = compile_timeline(plan, start_ms=start)
        entries.extend(segment.entries)
        start += sum(p.duration_ms for p in plan.phases) + gap_ms
    return CommandTimeline(entries, start_ms=0)


def parse_request(payload: dict[str, Any]) -> ManeuverRequest:
    """Build a request from a JSON-style mapping (``cube``/``axis``/``direction``)."""
    try:
        cube = int(payload["cube"])
        axis = axis_index(payload["axis"])
        direction = payload["direction"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"bad maneuver request: {exc}") from exc
    return ManeuverRequest(cube, axis, direction)
