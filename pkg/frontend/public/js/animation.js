/** Pure pose math for animating one maneuver from its event stream.
 *
 * The server's `accepted` event carries the swing geometry (hinge line,
 * signed direction, quarter turns) and each phase event its duration, so
 * the client can replay the motion without any planning logic: the
 * traveler rotates direction*quarterTurns*90 degrees about the +hinge-axis
 * line through the hinge midpoint (right-hand rule), tracing the physical
 * arc during the travel phase.  All times here are maneuver-local
 * simulation milliseconds; the caller maps wall time onto them via the
 * animation speed.
 */
import { AXIS_INDEX, AXIS_UNITS } from "./protocol.js";
import { quatFromAxisAngle, quatMultiply, rotateVec, } from "./orientation.js";
/** Assemble the swing from the maneuver's accepted + phase events. */
export function swingFromEvents(events, start) {
    const accepted = events.find((e) => e.kind === "accepted");
    if (accepted === undefined) {
        throw new Error("event batch has no accepted event");
    }
    const t0 = accepted.t_ms;
    const phases = [];
    let cursor = 0;
    for (const ev of events) {
        if (ev.kind === "launch" || ev.kind === "travel" || ev.kind === "catch") {
            const phase = ev;
            phases.push({
                name: phase.kind,
                startMs: phase.t_ms - t0,
                durationMs: phase.duration_ms,
                drives: phase.drives ?? [],
            });
            cursor = phase.t_ms - t0 + phase.duration_ms;
        }
    }
    if (phases.length === 0) {
        throw new Error("event batch has no phase events");
    }
    return {
        traveler: accepted.traveler,
        start,
        axis: AXIS_UNITS[AXIS_INDEX[accepted.hinge.axis]],
        midpoint: accepted.hinge.midpoint,
        totalAngle: accepted.direction * accepted.quarter_turns * (Math.PI / 2),
        landing: accepted.landing,
        phases,
        totalMs: Math.max(accepted.total_ms, cursor),
        requiredEmpty: accepted.required_empty ?? [],
    };
}
/** Swing angle at maneuver-local time t: the rotation happens across the
 *  travel phase; launch holds the start pose, catch holds the landing. */
export function angleAt(spec, tMs) {
    const travel = spec.phases.find((p) => p.name === "travel");
    if (travel === undefined || travel.durationMs <= 0) {
        return tMs >= spec.totalMs ? spec.totalAngle : 0;
    }
    const u = (tMs - travel.startMs) / travel.durationMs;
    const clamped = Math.min(1, Math.max(0, u));
    return spec.totalAngle * clamped;
}
export function poseAt(spec, tMs) {
    const angle = angleAt(spec, tMs);
    const rotation = quatFromAxisAngle(spec.axis, angle);
    const rel = [
        spec.start[0] - spec.midpoint[0],
        spec.start[1] - spec.midpoint[1],
        spec.start[2] - spec.midpoint[2],
    ];
    const turned = rotateVec(rotation, rel);
    const done = tMs >= spec.totalMs;
    const position = done
        ? [...spec.landing]
        : [
            spec.midpoint[0] + turned[0],
            spec.midpoint[1] + turned[1],
            spec.midpoint[2] + turned[2],
        ];
    let phase = null;
    for (const p of spec.phases) {
        if (tMs >= p.startMs && tMs < p.startMs + p.durationMs) {
            phase = p;
            break;
        }
    }
    return { position, rotation, angle, done, phase };
}
/** Compose the swing rotation with a cube's resting orientation. */
export function orientationDuringSwing(baseOrientation, pose) {
    return quatMultiply(pose.rotation, baseOrientation);
}
