"""Scenario files: an initial cube layout plus an ordered maneuver script.

Format (one directive per line, ``#`` starts a comment, blank lines ignored):

    version 1
    name <free text to end of line>          (optional)
    timing <pivot|traversal> <l> <t> <c>     (optional per kind, milliseconds)
    cube <id> <x> <y> <z>
    move <cube-id> <x|y|z> <cw|ccw>

``version`` must be the first directive.  ``cube`` lines define the starting
shape; ``move`` lines are resolved in order.  Syntax problems raise
ScenarioParseError naming the offending line; semantic problems (duplicate
ids or addresses, moves naming unknown cubes, bad timing values) are
collected and raised together as a ScenarioValidationError.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field, replace
from typing import Sequence

from .lattice import Cube, LatticeState
from .planner import (
    DEFAULT_PHASE_MS,
    ManeuverPlan,
    ManeuverRequest,
    PlannerError,
    apply_plan,
    direction_name,
    resolve_maneuver,
)

FORMAT_VERSION = 1

_AXIS_NAMES = "xyz"


class ScenarioError(ValueError):
    """Base class for scenario problems."""


class ScenarioParseError(ScenarioError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ScenarioValidationError(ScenarioError):
    def __init__(self, violations: Sequence[str]):
        super().__init__(
            "invalid scenario: " + "; ".join(violations)
        )
        self.violations = tuple(violations)


class ScriptError(ScenarioError):
    """A maneuver in the script failed; ``step`` is 1-based."""

    def __init__(self, step: int, request: ManeuverRequest, cause: PlannerError):
        super().__init__(f"step {step} ({_format_move(request)}): {cause}")
        self.step = step
        self.request = request
        self.cause = cause


def _format_move(req: ManeuverRequest) -> str:
    return (
        f"move {req.cube_id} {_AXIS_NAMES[req.axis]} "
        f"{direction_name(req.direction)}"
    )


@dataclass(frozen=True)
class Scenario:
    name: str
    cubes: tuple[Cube, ...]
    script: tuple[ManeuverRequest, ...] = ()
    timings: dict = field(default_factory=dict)  # kind -> (l, t, c) ms

    def __post_init__(self):
        violations = list(self._violations())
        if violations:
            raise ScenarioValidationError(violations)

    def _violations(self):
        ids = set()
        addresses = set()
        for cube in self.cubes:
            if cube.cube_id in ids:
                yield f"duplicate cube id {cube.cube_id}"
            ids.add(cube.cube_id)
            if cube.address in addresses:
                yield f"duplicate address {cube.address}"
            addresses.add(cube.address)
        for i, req in enumerate(self.script, start=1):
            if req.cube_id not in ids:
                yield f"move {i} references unknown cube {req.cube_id}"
        for kind, spans in self.timings.items():
            if kind not in DEFAULT_PHASE_MS:
                yield f"unknown timing kind {kind!r}"
            elif len(spans) != 3 or any(int(d) <= 0 for d in spans):
                yield f"timing {kind} needs three positive durations"

    def initial_state(self) -> LatticeState:
        return LatticeState(self.cubes)

    def phase_ms(self, kind: str) -> tuple[int, int, int]:
        return tuple(self.timings.get(kind, DEFAULT_PHASE_MS[kind]))


def load_scenario(text: str) -> Scenario:
    """Parse scenario text; see the module docstring for the format."""
    name = ""
    cubes: list[Cube] = []
    script: list[ManeuverRequest] = []
    timings: dict = {}
    saw_version = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        keyword = fields[0].lower()
        if not saw_version:
            if keyword != "version":
                raise ScenarioParseError(
                    lineno, "the first directive must be 'version'"
                )
            if fields[1:] != [str(FORMAT_VERSION)]:
                raise ScenarioParseError(
                    lineno,
                    f"unsupported version {' '.join(fields[1:])!r} "
                    f"(this reader understands {FORMAT_VERSION})",
                )
            saw_version = True
            continue
        if keyword == "version":
            raise ScenarioParseError(lineno, "duplicate version directive")
        if keyword == "name":
            name = line.split(None, 1)[1] if len(fields) > 1 else ""
        elif keyword == "timing":
            if len(fields) != 5:
                raise ScenarioParseError(
                    lineno, "expected: timing <kind> <launch> <travel> <catch>"
                )
            try:
                timings[fields[1].lower()] = tuple(int(v) for v in fields[2:])
            except ValueError:
                raise ScenarioParseError(
                    lineno, f"timing durations must be integers: {line!r}"
                ) from None
        elif keyword == "cube":
            if len(fields) != 5:
                raise ScenarioParseError(
                    lineno, "expected: cube <id> <x> <y> <z>"
                )
            try:
                cube_id = int(fields[1])
                address = tuple(int(v) for v in fields[2:5])
            except ValueError:
                raise ScenarioParseError(
                    lineno, f"cube fields must be integers: {line!r}"
                ) from None
            try:
                cubes.append(Cube(cube_id, address))
            except ValueError as exc:
                raise ScenarioParseError(lineno, str(exc)) from None
        elif keyword == "move":
            if len(fields) != 4:
                raise ScenarioParseError(
                    lineno, "expected: move <cube-id> <axis> <cw|ccw>"
                )
            try:
                script.append(
                    ManeuverRequest(int(fields[1]), fields[2], fields[3])
                )
            except ValueError as exc:
                raise ScenarioParseError(lineno, str(exc)) from None
        else:
            raise ScenarioParseError(lineno, f"unknown directive {keyword!r}")
    if not saw_version:
        raise ScenarioParseError(1, "empty scenario: missing version directive")
    return Scenario(
        name=name, cubes=tuple(cubes), script=tuple(script), timings=timings
    )


def save_scenario(scenario: Scenario) -> str:
    buf = io.StringIO()
    buf.write(f"version {FORMAT_VERSION}\n")
    if scenario.name:
        buf.write(f"name {scenario.name}\n")
    for kind in sorted(scenario.timings):
        spans = scenario.timings[kind]
        buf.write(f"timing {kind} {spans[0]} {spans[1]} {spans[2]}\n")
    for cube in scenario.cubes:
        x, y, z = cube.address
        buf.write(f"cube {cube.cube_id} {x} {y} {z}\n")
    for req in scenario.script:
        buf.write(_format_move(req) + "\n")
    return buf.getvalue()


@dataclass(frozen=True)
class ScriptRun:
    final_state: LatticeState
    plans: tuple[ManeuverPlan, ...]


def run_script(scenario: Scenario) -> ScriptRun:
    """Resolve and apply every scripted maneuver in order.

    The first failing step raises ScriptError carrying the 1-based step
    index, the request, and the planner error that caused it.
    """
    state = scenario.initial_state()
    plans: list[ManeuverPlan] = []
    for step_index, req in enumerate(scenario.script, start=1):
        try:
            plan = resolve_maneuver(state, req)
        except PlannerError as exc:
            raise ScriptError(step_index, req, exc) from exc
        plan = retime_plan(plan, scenario.phase_ms(plan.kind))
        plans.append(plan)
        state = apply_plan(state, plan)
    return ScriptRun(final_state=state, plans=tuple(plans))


def retime_plan(plan: ManeuverPlan, spans: tuple[int, int, int]) -> ManeuverPlan:
    """Apply a scenario's per-kind phase durations to a resolved plan."""
    if tuple(p.duration_ms for p in plan.phases) == spans:
        return plan
    phases = tuple(
        replace(p, duration_ms=ms) for p, ms in zip(plan.phases, spans)
    )
    return replace(plan, phases=phases)


# -- shipped demonstration corpus ---------------------------------------------------


def corpus_dir():
    """Directory of shipped scenario and shape-fixture files."""
    from importlib.resources import files

    return files("empivot") / "corpus"


def corpus_names() -> list[str]:
    return sorted(
        p.name for p in corpus_dir().iterdir() if p.name.endswith(".scn")
    )


def load_corpus_scenario(name: str) -> Scenario:
    path = corpus_dir() / name
    return load_scenario(path.read_text())


def load_corpus_shape(name: str) -> list[str]:
    """Canonical state lines frozen for a corpus shape (``<stem>.shape``)."""
    path = corpus_dir() / name
    return path.read_text().splitlines()
