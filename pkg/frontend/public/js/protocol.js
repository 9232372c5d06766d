/** Frame types for the `empivot/1` websocket protocol.
 *
 * The service speaks JSON text frames over a single socket.  Client
 * requests may carry an `id`, which the service echoes on the direct
 * reply; `event` frames stream untagged between a `maneuver` request and
 * its `result`.  Protocol errors arrive as `error` frames and never close
 * the socket.
 */
export const PROTOCOL = "empivot/1";
const SERVER_FRAME_TYPES = new Set([
    "welcome",
    "state",
    "hash",
    "event",
    "result",
    "settings",
    "timeline",
    "corpus",
    "error",
]);
const EVENT_KINDS = new Set([
    "accepted",
    "launch",
    "travel",
    "catch",
    "settled",
    "error",
]);
/** Parse one JSON text frame; throws on anything outside the protocol. */
export function parseServerFrame(text) {
    let raw;
    try {
        raw = JSON.parse(text);
    }
    catch {
        throw new Error("frame is not valid JSON");
    }
    if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
        throw new Error("frame must be a JSON object");
    }
    const frame = raw;
    const type = frame["type"];
    if (typeof type !== "string" || !SERVER_FRAME_TYPES.has(type)) {
        throw new Error(`unknown frame type ${JSON.stringify(type)}`);
    }
    if (type === "event") {
        const ev = frame["event"];
        if (typeof ev !== "object" ||
            ev === null ||
            typeof ev["kind"] !== "string" ||
            !EVENT_KINDS.has(ev["kind"]) ||
            typeof ev["t_ms"] !== "number" ||
            typeof ev["seq"] !== "number") {
            throw new Error("malformed event frame");
        }
    }
    return frame;
}
// ---------------------------------------------------------------------------
// client -> server frame builders
// ---------------------------------------------------------------------------
export function helloFrame(id) {
    return withId({ type: "hello" }, id);
}
export function stateRequest(id) {
    return withId({ type: "state" }, id);
}
export function hashRequest(id) {
    return withId({ type: "hash" }, id);
}
export function maneuverFrame(request, id) {
    return withId({ type: "maneuver", ...request }, id);
}
export function settingsFrame(changes, id) {
    return withId({ type: "settings", set: changes }, id);
}
export function exportFrame(options, id) {
    return withId({ type: "export", ...options }, id);
}
export function corpusFrame(id) {
    return withId({ type: "corpus" }, id);
}
export function loadFrame(source, id) {
    return withId({ type: "load", ...source }, id);
}
function withId(frame, id) {
    if (id !== undefined) {
        frame["id"] = id;
    }
    return frame;
}
export const AXIS_INDEX = { x: 0, y: 1, z: 2 };
export const AXIS_UNITS = [
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
];
