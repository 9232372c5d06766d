/** Frame types for the `empivot/1` websocket protocol.
 *
 * The service speaks JSON text frames over a single socket.  Client
 * requests may carry an `id`, which the service echoes on the direct
 * reply; `event` frames stream untagged between a `maneuver` request and
 * its `result`.  Protocol errors arrive as `error` frames and never close
 * the socket.
 */

export const PROTOCOL = "empivot/1";

export type AxisLetter = "x" | "y" | "z";
export type DirectionName = "cw" | "ccw";
export type Vec3 = [number, number, number];

/** One cube row of a state payload (orientation is a 0..23 table index). */
export interface CubeRecord {
  id: number;
  x: number;
  y: number;
  z: number;
  orientation: number;
}

export interface StatePayload {
  cubes: CubeRecord[];
  hash: string;
}

/** Presentation settings held server-side so reloads keep them. */
export interface SessionSettings {
  animation_speed: number;
  render_fidelity: "full" | "proxy";
  show_ids: boolean;
  show_occupancy: boolean;
}

export interface RequestPayload {
  cube: number;
  axis: AxisLetter;
  direction: DirectionName;
}

// ---------------------------------------------------------------------------
// session events (inner objects of `event` frames)
// ---------------------------------------------------------------------------

export type EventKind =
  | "accepted"
  | "launch"
  | "travel"
  | "catch"
  | "settled"
  | "error";

interface EventBase {
  kind: EventKind;
  /** Simulation-time milliseconds (deterministic, speed-independent). */
  t_ms: number;
  /** Session-wide event sequence number. */
  seq: number;
}

export interface AcceptedEvent extends EventBase {
  kind: "accepted";
  maneuver: number;
  request: RequestPayload;
  maneuver_kind: "pivot" | "traversal";
  traveler: number;
  origin: number;
  destination: number;
  landing: Vec3;
  /** Swing geometry: right-hand rotation of direction*quarter_turns*90
   *  degrees about the +axis line through midpoint. */
  hinge: { axis: AxisLetter; midpoint: Vec3 };
  direction: 1 | -1;
  quarter_turns: 1 | 2;
  required_empty: Vec3[];
  total_ms: number;
  warnings: string[];
}

export interface PhaseEvent extends EventBase {
  kind: "launch" | "travel" | "catch";
  maneuver: number;
  duration_ms: number;
  assignments: number;
  /** Electromagnet drives as [cube, em, polarity] triples. */
  drives: [number, number, number][];
}

export interface SettledEvent extends EventBase {
  kind: "settled";
  maneuver: number;
  state_hash: string;
  cube: number;
  landing: Vec3;
}

export interface ErrorEvent extends EventBase {
  kind: "error";
  code: string;
  message: string;
  request?: RequestPayload;
  blocking?: Vec3[];
  required_empty?: Vec3[];
}

export type SessionEvent =
  | AcceptedEvent
  | PhaseEvent
  | SettledEvent
  | ErrorEvent;

// ---------------------------------------------------------------------------
// server -> client frames
// ---------------------------------------------------------------------------

export interface WelcomeFrame {
  type: "welcome";
  protocol: string;
  session: string;
  name: string;
  state: StatePayload;
  settings: SessionSettings;
  script: RequestPayload[];
  maneuvers: number;
  sim_time_ms: number;
  gap_ms: number;
  id?: unknown;
}

export interface StateFrame extends StatePayload {
  type: "state";
  id?: unknown;
}

export interface HashFrame {
  type: "hash";
  value: string;
  id?: unknown;
}

export interface EventFrame {
  type: "event";
  event: SessionEvent;
}

export interface ResultFrame {
  type: "result";
  ok: boolean;
  state: StatePayload;
  id?: unknown;
}

export interface SettingsFrame {
  type: "settings";
  settings: SessionSettings;
  id?: unknown;
}

export interface TimelineFrame {
  type: "timeline";
  format: "text" | "binary";
  entries: number;
  span_ms: number;
  text?: string;
  base64?: string;
  saved?: string;
  id?: unknown;
}

export interface CorpusFrame {
  type: "corpus";
  names: string[];
  id?: unknown;
}

export interface ProtocolErrorFrame {
  type: "error";
  code: string;
  message: string;
  id?: unknown;
}

export type ServerFrame =
  | WelcomeFrame
  | StateFrame
  | HashFrame
  | EventFrame
  | ResultFrame
  | SettingsFrame
  | TimelineFrame
  | CorpusFrame
  | ProtocolErrorFrame;

const SERVER_FRAME_TYPES = new Set<string>([
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

const EVENT_KINDS = new Set<string>([
  "accepted",
  "launch",
  "travel",
  "catch",
  "settled",
  "error",
]);

/** Parse one JSON text frame; throws on anything outside the protocol. */
export function parseServerFrame(text: string): ServerFrame {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    throw new Error("frame is not valid JSON");
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new Error("frame must be a JSON object");
  }
  const frame = raw as Record<string, unknown>;
  const type = frame["type"];
  if (typeof type !== "string" || !SERVER_FRAME_TYPES.has(type)) {
    throw new Error(`unknown frame type ${JSON.stringify(type)}`);
  }
  if (type === "event") {
    const ev = frame["event"] as Record<string, unknown> | undefined;
    if (
      typeof ev !== "object" ||
      ev === null ||
      typeof ev["kind"] !== "string" ||
      !EVENT_KINDS.has(ev["kind"] as string) ||
      typeof ev["t_ms"] !== "number" ||
      typeof ev["seq"] !== "number"
    ) {
      throw new Error("malformed event frame");
    }
  }
  return frame as unknown as ServerFrame;
}

// ---------------------------------------------------------------------------
// client -> server frame builders
// ---------------------------------------------------------------------------

export function helloFrame(id?: number): Record<string, unknown> {
  return withId({ type: "hello" }, id);
}

export function stateRequest(id?: number): Record<string, unknown> {
  return withId({ type: "state" }, id);
}

export function hashRequest(id?: number): Record<string, unknown> {
  return withId({ type: "hash" }, id);
}

export function maneuverFrame(
  request: RequestPayload,
  id?: number,
): Record<string, unknown> {
  return withId({ type: "maneuver", ...request }, id);
}

export function settingsFrame(
  changes: Partial<SessionSettings>,
  id?: number,
): Record<string, unknown> {
  return withId({ type: "settings", set: changes }, id);
}

export function exportFrame(
  options: { format?: "text" | "binary"; start?: number; stop?: number },
  id?: number,
): Record<string, unknown> {
  return withId({ type: "export", ...options }, id);
}

export function corpusFrame(id?: number): Record<string, unknown> {
  return withId({ type: "corpus" }, id);
}

export function loadFrame(
  source: { name?: string; text?: string },
  id?: number,
): Record<string, unknown> {
  return withId({ type: "load", ...source }, id);
}

function withId(
  frame: Record<string, unknown>,
  id: number | undefined,
): Record<string, unknown> {
  if (id !== undefined) {
    frame["id"] = id;
  }
  return frame;
}

export const AXIS_INDEX: Record<AxisLetter, 0 | 1 | 2> = { x: 0, y: 1, z: 2 };
export const AXIS_UNITS: readonly Vec3[] = [
  [1, 0, 0],
  [0, 1, 0],
  [0, 0, 1],
];
