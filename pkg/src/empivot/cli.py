"""Headless command-line entry points for every package capability.

Subcommands::

    plan           resolve a scenario's script into maneuver plans + final state
    timeline       compile a scenario's script into a command-word timeline
    force-sweep    pair force versus surface gap (curve file)
    force-current  pair force versus drive current (curve file)
    dynamics       integrate one pivot/traversal swing and report its duration
    serve          start the WebSocket simulation service
    corpus-verify  run the shipped scenarios and check the published fixtures

Successful runs exit 0.  Failures exit nonzero after printing a one-line
JSON error envelope ``{"error": {"code": ..., "message": ...}}`` to stderr
with a stable ``code`` per failure class.  Artifact output is reproducible:
the generation-time header is dropped with ``--no-timestamp``.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import __version__
from .codec import TimelineOverflowError
from .coilforce import CoilSpec, force_current_sweep, force_distance_sweep
from .dynamics import DynParams, default_force_curves, simulate_maneuver
from .lattice import DuplicateError
from .planner import direction_name
from .scenario import (
    ScenarioParseError,
    ScenarioValidationError,
    ScriptError,
    corpus_names,
    load_corpus_scenario,
    load_corpus_shape,
    load_scenario,
    run_script,
)
from .service import DEFAULT_GAP_MS, compile_script

_AXIS_NAMES = "xyz"

#: scenario file -> (starting shape fixture, final shape fixture, move count)
CORPUS_CHECKS = {
    "chair_to_table.scn": ("chair.shape", "table.shape", 22),
    "table_to_couch.scn": ("table.shape", "couch.shape", 40),
}


class CliError(Exception):
    """Failure with a stable machine-readable code."""

    def __init__(self, code: str, message: str, **details: Any):
        super().__init__(message)
        self.code = code
        self.details = details

    def envelope(self) -> dict[str, Any]:
        return {"error": {"code": self.code, "message": str(self), **self.details}}


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _write_text(text: str, output: Optional[str]) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _write_bytes(blob: bytes, output: Optional[str]) -> None:
    if output in (None, "-"):
        sys.stdout.buffer.write(blob)
    else:
        Path(output).write_bytes(blob)


def _emit_json(payload: dict[str, Any], args: argparse.Namespace) -> None:
    if not args.no_timestamp:
        payload = {"generated": _timestamp(), **payload}
    _write_text(json.dumps(payload, indent=2) + "\n", args.output)


def _load_scenario_file(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError("io-error", f"cannot read scenario: {exc}") from exc
    try:
        return load_scenario(text)
    except ScenarioParseError as exc:
        raise CliError("parse-error", str(exc), line=exc.line) from exc
    except ScenarioValidationError as exc:
        raise CliError(
            "validation-error", str(exc), violations=list(exc.violations)
        ) from exc


def _run_script_checked(scenario):
    try:
        return run_script(scenario)
    except ScriptError as exc:
        raise CliError(
            "script-error",
            str(exc),
            step=exc.step,
            request={
                "cube": exc.request.cube_id,
                "axis": _AXIS_NAMES[exc.request.axis],
                "direction": direction_name(exc.request.direction),
            },
        ) from exc
    except DuplicateError as exc:
        raise CliError("validation-error", str(exc)) from exc


# -- subcommands -----------------------------------------------------------------


def _cmd_plan(args: argparse.Namespace) -> int:
    scenario = _load_scenario_file(args.scenario)
    run = _run_script_checked(scenario)
    maneuvers = [
        {
            "step": i,
            "request": {
                "cube": plan.traveling_id,
                "axis": _AXIS_NAMES[plan.axis],
                "direction": direction_name(plan.direction),
            },
            "kind": plan.kind,
            "origin": plan.origin_id,
            "destination": plan.destination_id,
            "landing": list(plan.landing_address),
            "hinge": {"axis": _AXIS_NAMES[plan.hinge.axis], "midpoint": list(plan.hinge.midpoint)},
            "total_ms": sum(p.duration_ms for p in plan.phases),
            "warnings": list(plan.warnings),
        }
        for i, plan in enumerate(run.plans, start=1)
    ]
    _emit_json(
        {
            "scenario": scenario.name,
            "cubes": len(scenario.cubes),
            "maneuvers": maneuvers,
            "final": {
                "lines": run.final_state.canonical_lines(),
                "hash": run.final_state.state_hash(),
            },
        },
        args,
    )
    return 0


def _cmd_timeline(args: argparse.Namespace) -> int:
    scenario = _load_scenario_file(args.scenario)
    run = _run_script_checked(scenario)
    try:
        timeline = compile_script(run.plans, gap_ms=args.gap_ms)
    except (TimelineOverflowError, ValueError) as exc:
        raise CliError("overflow", str(exc)) from exc
    if args.format == "binary":
        _write_bytes(timeline.to_binary(), args.output)
    else:
        header = "" if args.no_timestamp else f"# generated: {_timestamp()}\n"
        _write_text(header + timeline.to_text(), args.output)
    return 0


def _polarity(value: str) -> int:
    mapping = {"attract": -1, "repel": +1, "-1": -1, "+1": +1, "1": +1}
    if value not in mapping:
        raise argparse.ArgumentTypeError(
            "polarity must be attract, repel, +1 or -1"
        )
    return mapping[value]


def _coil_spec(args: argparse.Namespace) -> CoilSpec:
    spec = CoilSpec()
    if args.current is not None:
        spec = dataclasses.replace(
            spec,
            current=args.current,
            current_limit=max(args.current, spec.current_limit),
        )
    return spec


def _backend(args: argparse.Namespace) -> Optional[str]:
    return None if args.backend == "auto" else args.backend


def _curve_text(curve, args: argparse.Namespace) -> str:
    header = "" if args.no_timestamp else f"# generated: {_timestamp()}\n"
    return header + curve.dumps()


def _cmd_force_sweep(args: argparse.Namespace) -> int:
    if (args.min_mm, args.max_mm, args.step_mm) == (0.5, 20.0, 0.5):
        gaps = None  # the curve's published 40-point default
    else:
        if args.step_mm <= 0 or args.min_mm <= 0 or args.max_mm < args.min_mm:
            raise CliError("bad-arguments", "gap range must be positive and increasing")
        gaps = np.round(
            np.arange(args.min_mm, args.max_mm + args.step_mm / 2, args.step_mm)
            * 1e-3,
            10,
        )
    spec = _coil_spec(args)
    try:
        curve = force_distance_sweep(
            spec,
            spec,
            gaps=gaps,
            elements=args.elements,
            relative_polarity=args.polarity,
            backend=_backend(args),
            workers=args.workers,
        )
    except ValueError as exc:
        raise CliError("bad-arguments", str(exc)) from exc
    _write_text(_curve_text(curve, args), args.output)
    return 0


def _cmd_force_current(args: argparse.Namespace) -> int:
    currents = None
    if args.max_a is not None or args.step_a is not None:
        max_a = args.max_a if args.max_a is not None else 1.2
        step_a = args.step_a if args.step_a is not None else 0.05
        if step_a <= 0 or max_a <= 0:
            raise CliError("bad-arguments", "current range must be positive")
        currents = np.round(np.arange(0.0, max_a + step_a / 2, step_a), 10)
    try:
        curve = force_current_sweep(
            _coil_spec(args),
            gap=args.gap_mm * 1e-3,
            currents=currents,
            elements=args.elements,
            relative_polarity=args.polarity,
            backend=_backend(args),
        )
    except ValueError as exc:
        raise CliError("bad-arguments", str(exc)) from exc
    _write_text(_curve_text(curve, args), args.output)
    return 0


def _cmd_dynamics(args: argparse.Namespace) -> int:
    try:
        launch, catch = default_force_curves(
            elements=args.elements, backend=_backend(args)
        )
        params = DynParams(
            launch_curve=launch,
            catch_curve=catch,
            step=args.step_s,
            timeout=args.timeout_s,
            capture_speed=args.capture_speed,
        )
    except ValueError as exc:
        raise CliError("bad-arguments", str(exc)) from exc
    result = simulate_maneuver(args.kind, params, record_every=args.record_every)
    final = result.trajectory[-1]
    if args.trajectory:
        rows = ["t_s theta1_rad theta2_rad omega1_rad_s omega2_rad_s"]
        rows += [
            f"{s.t!r} {s.theta1!r} {s.theta2!r} {s.omega1!r} {s.omega2!r}"
            for s in result.trajectory
        ]
        Path(args.trajectory).write_text("\n".join(rows) + "\n", encoding="utf-8")
    _emit_json(
        {
            "kind": result.kind,
            "completed": result.completed,
            "duration_s": result.duration,
            "capture_speed_m_s": result.capture_speed,
            "capture_ok": result.capture_ok,
            "states_recorded": len(result.trajectory),
            "final": {
                "t_s": final.t,
                "theta1_rad": final.theta1,
                "theta2_rad": final.theta2,
                "omega1_rad_s": final.omega1,
                "omega2_rad_s": final.omega2,
            },
        },
        args,
    )
    return 0 if result.completed else 3


def _cmd_serve(args: argparse.Namespace) -> int:
    from .server import serve

    scenario = None
    if args.scenario:
        scenario = _load_scenario_file(args.scenario)
    elif args.corpus:
        try:
            scenario = load_corpus_scenario(args.corpus)
        except FileNotFoundError as exc:
            raise CliError(
                "bad-arguments",
                f"no shipped scenario {args.corpus!r} (have: {', '.join(corpus_names())})",
            ) from exc
    static_dir: Optional[Path] = None
    if not args.headless:
        candidate = Path(args.ui_dir) if args.ui_dir else Path("frontend") / "public"
        if candidate.is_dir():
            static_dir = candidate
        elif args.ui_dir:
            raise CliError("io-error", f"ui directory not found: {candidate}")
    serve(
        args.host,
        args.port,
        scenario=scenario,
        static_dir=static_dir,
        export_path=args.export_path,
    )
    return 0


def _cmd_corpus_verify(args: argparse.Namespace) -> int:
    reports = []
    failures = []
    for name in corpus_names():
        scenario = load_corpus_scenario(name)
        start_shape, final_shape, expected_moves = CORPUS_CHECKS.get(
            name, (None, None, None)
        )
        entry: dict[str, Any] = {
            "scenario": name,
            "name": scenario.name,
            "cubes": len(scenario.cubes),
            "maneuvers": len(scenario.script),
        }
        try:
            run = _run_script_checked(scenario)
        except CliError as exc:
            entry["ok"] = False
            entry["error"] = exc.envelope()["error"]
            failures.append(f"{name}: {exc}")
            reports.append(entry)
            continue
        entry["warnings"] = sum(len(p.warnings) for p in run.plans)
        entry["final_hash"] = run.final_state.state_hash()
        checks = []
        if expected_moves is not None:
            checks.append(("move-count", len(scenario.script) == expected_moves))
        if start_shape is not None:
            # scenario files carry placements only, so compare addresses
            placement = lambda lines: [l.split()[:4] for l in lines]  # noqa: E731
            checks.append(
                (
                    "start-shape",
                    placement(scenario.initial_state().canonical_lines())
                    == placement(load_corpus_shape(start_shape)),
                )
            )
        if final_shape is not None:
            checks.append(
                (
                    "final-shape",
                    run.final_state.canonical_lines()
                    == load_corpus_shape(final_shape),
                )
            )
        checks.append(("no-warnings", entry["warnings"] == 0))
        entry["checks"] = {label: passed for label, passed in checks}
        entry["ok"] = all(passed for _, passed in checks)
        if not entry["ok"]:
            failed = [label for label, passed in checks if not passed]
            failures.append(f"{name}: failed {', '.join(failed)}")
        reports.append(entry)
    _emit_json({"scenarios": reports, "ok": not failures}, args)
    if failures:
        raise CliError("corpus-mismatch", "; ".join(failures))
    return 0


# -- argument parsing --------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="empivot",
        description="Planning, command compilation, and coil-force physics "
        "for edge-pivoting electromagnet cube robots.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--output", "-o", default=None, help="output file (default: stdout)"
    )
    common.add_argument(
        "--no-timestamp",
        action="store_true",
        help="omit the generation-time header for byte-reproducible output",
    )

    coil = argparse.ArgumentParser(add_help=False)
    coil.add_argument("--elements", type=int, default=8000, help="discretization elements per coil")
    coil.add_argument("--current", type=float, default=None, help="drive current in amperes")
    coil.add_argument(
        "--polarity",
        type=_polarity,
        default=-1,
        help="attract (default), repel, +1 or -1",
    )
    coil.add_argument(
        "--backend",
        choices=("auto", "compiled", "python"),
        default="auto",
        help="force-kernel implementation (default: auto-select)",
    )

    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser(
        "plan", parents=[common], help="resolve a scenario script into plans"
    )
    p.add_argument("scenario", help="scenario file")
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser(
        "timeline", parents=[common], help="compile a scenario into command words"
    )
    p.add_argument("scenario", help="scenario file")
    p.add_argument("--format", choices=("text", "binary"), default="text")
    p.add_argument(
        "--gap-ms",
        type=int,
        default=DEFAULT_GAP_MS,
        help="quiet gap between maneuvers (default %(default)s)",
    )
    p.set_defaults(func=_cmd_timeline)

    p = sub.add_parser(
        "force-sweep",
        parents=[common, coil],
        help="pair force versus surface gap",
    )
    p.add_argument("--min-mm", type=float, default=0.5)
    p.add_argument("--max-mm", type=float, default=20.0)
    p.add_argument("--step-mm", type=float, default=0.5)
    p.add_argument(
        "--workers",
        type=int,
        default=None,
        help="parallel gap evaluations (default: backend-dependent)",
    )
    p.set_defaults(func=_cmd_force_sweep)

    p = sub.add_parser(
        "force-current",
        parents=[common, coil],
        help="pair force versus drive current",
    )
    p.add_argument("--gap-mm", type=float, default=0.5)
    p.add_argument("--max-a", type=float, default=None)
    p.add_argument("--step-a", type=float, default=None)
    p.set_defaults(func=_cmd_force_current)

    p = sub.add_parser(
        "dynamics",
        parents=[common],
        help="integrate one maneuver and report its duration",
    )
    p.add_argument("--kind", choices=("pivot", "traversal"), default="pivot")
    p.add_argument("--elements", type=int, default=2000)
    p.add_argument(
        "--backend", choices=("auto", "compiled", "python"), default="auto"
    )
    p.add_argument("--step-s", type=float, default=1e-3)
    p.add_argument("--timeout-s", type=float, default=10.0)
    p.add_argument("--capture-speed", type=float, default=2.0)
    p.add_argument("--record-every", type=int, default=10)
    p.add_argument(
        "--trajectory", default=None, help="write the sampled trajectory here"
    )
    p.set_defaults(func=_cmd_dynamics)

    p = sub.add_parser("serve", help="start the WebSocket simulation service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8763)
    p.add_argument("--scenario", default=None, help="scenario file to load")
    p.add_argument(
        "--corpus", default=None, help="shipped scenario name to load instead"
    )
    p.add_argument(
        "--headless", action="store_true", help="serve the socket API only, no UI"
    )
    p.add_argument(
        "--ui-dir", default=None, help="static client directory (default: frontend/public)"
    )
    p.add_argument(
        "--export-path",
        default=None,
        help="also write each client-requested timeline export to this file",
    )
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser(
        "corpus-verify",
        parents=[common],
        help="run the shipped scenarios and check the published fixtures",
    )
    p.set_defaults(func=_cmd_corpus_verify)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(json.dumps(exc.envelope()) + "\n")
        return 1
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
