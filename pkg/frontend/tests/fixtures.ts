/** Event batches shaped exactly like the service's maneuver streams.
 *
 * Values are the service's own two-cube pivot goldens: cube 2 on top of
 * cube 1 rotates 180 degrees counterclockwise about y around the hinge
 * (0.5, 0, 0.5) and lands at (1, 0, 0) with phase durations 400/930/200.
 */

import type {
  SessionEvent,
  SessionSettings,
  StatePayload,
  WelcomeFrame,
} from "../src/protocol.js";

export const DEFAULT_SETTINGS: SessionSettings = {
  animation_speed: 1.0,
  render_fidelity: "full",
  show_ids: false,
  show_occupancy: false,
};

export const TWO_CUBE_STATE: StatePayload = {
  cubes: [
    { id: 1, x: 0, y: 0, z: 0, orientation: 0 },
    { id: 2, x: 0, y: 0, z: 1, orientation: 0 },
  ],
  hash: "cd7b44520138e666caeb8bfef5ab45df5ab9dceb17584bbfb4fc4ea157756301",
};

export const AFTER_PIVOT_STATE: StatePayload = {
  cubes: [
    { id: 1, x: 0, y: 0, z: 0, orientation: 0 },
    { id: 2, x: 1, y: 0, z: 0, orientation: 18 },
  ],
  hash: "74b1552b911ae73a76c5da4c992ba8aafab8802e4a5b71ee3df584481985bbbf",
};

export function welcomeFrame(
  state: StatePayload = TWO_CUBE_STATE,
  overrides: Partial<WelcomeFrame> = {},
): WelcomeFrame {
  return {
    type: "welcome",
    protocol: "empivot/1",
    session: "fixture",
    name: "two-cube",
    state,
    settings: { ...DEFAULT_SETTINGS },
    script: [],
    maneuvers: 0,
    sim_time_ms: 0,
    gap_ms: 500,
    ...overrides,
  };
}

/** The full event batch of the two-cube ccw pivot, at sim start t0. */
export function pivotEvents(t0 = 0, seq0 = 0): SessionEvent[] {
  return [
    {
      kind: "accepted",
      t_ms: t0,
      seq: seq0,
      maneuver: 0,
      request: { cube: 2, axis: "y", direction: "ccw" },
      maneuver_kind: "pivot",
      traveler: 2,
      origin: 1,
      destination: 1,
      landing: [1, 0, 0],
      hinge: { axis: "y", midpoint: [0.5, 0, 0.5] },
      direction: 1,
      quarter_turns: 2,
      required_empty: [
        [0, 0, 2],
        [1, 0, 0],
        [1, 0, 1],
        [1, 0, 2],
        [2, 0, 0],
        [2, 0, 1],
      ],
      total_ms: 1530,
      warnings: [],
    },
    {
      kind: "launch",
      t_ms: t0,
      seq: seq0 + 1,
      maneuver: 0,
      duration_ms: 400,
      assignments: 4,
      drives: [
        [1, 6, 1],
        [1, 8, -1],
        [2, 5, 1],
        [2, 7, 1],
      ],
    },
    {
      kind: "travel",
      t_ms: t0 + 400,
      seq: seq0 + 2,
      maneuver: 0,
      duration_ms: 930,
      assignments: 2,
      drives: [
        [1, 8, -1],
        [2, 7, 1],
      ],
    },
    {
      kind: "catch",
      t_ms: t0 + 1330,
      seq: seq0 + 3,
      maneuver: 0,
      duration_ms: 200,
      assignments: 2,
      drives: [
        [1, 7, -1],
        [2, 8, 1],
      ],
    },
    {
      kind: "settled",
      t_ms: t0 + 1530,
      seq: seq0 + 4,
      maneuver: 0,
      state_hash: AFTER_PIVOT_STATE.hash,
      cube: 2,
      landing: [1, 0, 0],
    },
  ];
}

export function obstructedEvent(t0 = 0, seq0 = 0): SessionEvent {
  return {
    kind: "error",
    t_ms: t0,
    seq: seq0,
    code: "obstructed",
    message: "maneuver path obstructed at (1, 0, 1)",
    request: { cube: 3, axis: "y", direction: "ccw" },
    blocking: [[1, 0, 1]],
    required_empty: [
      [0, 0, 2],
      [1, 0, 0],
      [1, 0, 1],
      [1, 0, 2],
      [2, 0, 0],
      [2, 0, 1],
    ],
  };
}

export function busyEvent(seq0 = 0): SessionEvent {
  return {
    kind: "error",
    t_ms: 0,
    seq: seq0,
    code: "busy",
    message: "session is busy",
    request: { cube: 2, axis: "y", direction: "ccw" },
  };
}
