/** Display-state model: a pure function of the last authoritative server
 *  snapshot plus in-flight animation time.
 *
 * The model never mutates lattice state from user input.  A maneuver's
 * event batch starts a swing animation; the authoritative post-maneuver
 * state arrives with the `result` frame and is held pending until the
 * animation completes in wall time (maneuver duration divided by the
 * animation speed), at which point the mirror snaps to it.  Everything a
 * renderer needs for one frame comes from `renderAt(now)`.
 */

import type {
  AcceptedEvent,
  ErrorEvent,
  SessionEvent,
  SessionSettings,
  StatePayload,
  Vec3,
  WelcomeFrame,
} from "./protocol.js";
import { LatticeMirror } from "./lattice.js";
import {
  type SwingSpec,
  orientationDuringSwing,
  poseAt,
  swingFromEvents,
} from "./animation.js";
import { type Quat, orientationFromIndex } from "./orientation.js";

/** Most detailed cubes a scene renders before falling back to proxies. */
export const FULL_FIDELITY_CAP = 200;

export type Fidelity = "full" | "proxy";

export interface RenderCube {
  id: number;
  /** Center position in lattice units (floats while swinging). */
  position: Vec3;
  orientation: Quat;
  fidelity: Fidelity;
  traveling: boolean;
}

export interface DriveMarker {
  cube: number;
  em: number;
  polarity: number;
}

export interface Banner {
  code: string;
  message: string;
}

export interface RenderState {
  cubes: RenderCube[];
  busy: boolean;
  /** Approximate session sim clock (ms) for display. */
  simTimeMs: number;
  scenarioName: string;
  overlay: {
    ids: boolean;
    occupancyCells: Vec3[];
    blockingCells: Vec3[];
    drives: DriveMarker[];
  };
  banner: Banner | null;
}

export interface ManeuverOutcome {
  ok: boolean;
  accepted?: AcceptedEvent;
  error?: ErrorEvent;
  /** Wall milliseconds until the session stops being busy. */
  busyMs: number;
}

export class ViewModel {
  private mirror = new LatticeMirror();
  private settingsValue: SessionSettings = {
    animation_speed: 1.0,
    render_fidelity: "full",
    show_ids: false,
    show_occupancy: false,
  };
  private scenarioName = "";
  private simTimeMs = 0;
  private swing: SwingSpec | null = null;
  private swingStartWall = 0;
  private swingSpeed = 1.0;
  private pendingState: StatePayload | null = null;
  private banner: Banner | null = null;
  private blockingCells: Vec3[] = [];
  private lastServerHash = "";
  /** Client-local overlay: show electromagnet drive markers. */
  showEms = true;

  constructor(private readonly now: () => number = () => Date.now()) {}

  get settings(): SessionSettings {
    return this.settingsValue;
  }

  get scenario(): string {
    return this.scenarioName;
  }

  /** Hash reported by the server for the current authoritative state. */
  get serverHash(): string {
    return this.lastServerHash;
  }

  snapshot(): LatticeMirror {
    this.commitIfSettled(this.now());
    return this.mirror;
  }

  applyWelcome(frame: WelcomeFrame): void {
    this.mirror = LatticeMirror.fromState(frame.state);
    this.settingsValue = frame.settings;
    this.scenarioName = frame.name;
    this.simTimeMs = frame.sim_time_ms;
    this.swing = null;
    this.pendingState = null;
    this.banner = null;
    this.blockingCells = [];
    this.lastServerHash = frame.state.hash;
  }

  applySettings(settings: SessionSettings): void {
    this.settingsValue = settings;
  }

  /** Feed one maneuver's event batch (either phases+settled or one error). */
  applyEvents(events: SessionEvent[]): ManeuverOutcome {
    const error = events.find((e) => e.kind === "error") as
      | ErrorEvent
      | undefined;
    if (error !== undefined) {
      this.banner = { code: error.code, message: error.message };
      this.blockingCells = error.blocking ?? [];
      return { ok: false, error, busyMs: this.busyRemaining(this.now()) };
    }
    const accepted = events.find((e) => e.kind === "accepted") as
      | AcceptedEvent
      | undefined;
    if (accepted === undefined) {
      throw new Error("maneuver batch has neither error nor accepted event");
    }
    // a new acceptance supersedes any still-animating maneuver: snap to
    // the latest authoritative state so the swing starts from truth
    if (this.pendingState !== null) {
      this.mirror = LatticeMirror.fromState(this.pendingState);
      this.pendingState = null;
    }
    this.swing = null;
    const traveler = this.mirror.cube(accepted.traveler);
    if (traveler === undefined) {
      throw new Error(`traveler ${accepted.traveler} not in mirror`);
    }
    this.banner = null;
    this.blockingCells = [];
    this.swing = swingFromEvents(events, [
      traveler.x,
      traveler.y,
      traveler.z,
    ]);
    this.swingStartWall = this.now();
    this.swingSpeed = this.settingsValue.animation_speed;
    const settled = events.find((e) => e.kind === "settled");
    if (settled !== undefined) {
      this.simTimeMs = settled.t_ms;
      this.lastServerHash = (settled as { state_hash?: string }).state_hash ??
        this.lastServerHash;
    }
    return {
      ok: true,
      accepted,
      busyMs: this.swing.totalMs / this.swingSpeed,
    };
  }

  /** Authoritative post-maneuver state; applied when the swing finishes. */
  applyResult(state: StatePayload): void {
    this.pendingState = state;
    this.lastServerHash = state.hash;
    this.commitIfSettled(this.now());
  }

  /** Replace the whole state outside a maneuver (state frame refresh). */
  applyState(state: StatePayload): void {
    this.mirror = LatticeMirror.fromState(state);
    this.lastServerHash = state.hash;
    this.swing = null;
    this.pendingState = null;
  }

  busyAt(now: number): boolean {
    return this.swing !== null && !this.swingDone(now);
  }

  /** Wall ms until the current animation completes (0 when idle). */
  busyRemaining(now: number): number {
    if (this.swing === null) {
      return 0;
    }
    const end =
      this.swingStartWall + this.swing.totalMs / this.swingSpeed;
    return Math.max(0, end - now);
  }

  clearBanner(): void {
    this.banner = null;
    this.blockingCells = [];
  }

  /** Compare the mirrored state hash against the server's. */
  async reconcile(): Promise<{ local: string; server: string; ok: boolean }> {
    const local = await this.snapshot().stateHash();
    return {
      local,
      server: this.lastServerHash,
      ok: local === this.lastServerHash,
    };
  }

  renderAt(now: number): RenderState {
    this.commitIfSettled(now);
    const swing = this.swing;
    const fidelity = this.fidelityById();
    const cubes: RenderCube[] = [];
    let drives: DriveMarker[] = [];
    let occupancy: Vec3[] = [];
    for (const record of this.mirror.cubes()) {
      const base = orientationFromIndex(record.orientation);
      let position: Vec3 = [record.x, record.y, record.z];
      let orientation: Quat = base;
      let traveling = false;
      if (swing !== null && record.id === swing.traveler) {
        const tLocal = (now - this.swingStartWall) * this.swingSpeed;
        const pose = poseAt(swing, tLocal);
        position = pose.position;
        orientation = orientationDuringSwing(base, pose);
        traveling = true;
        if (pose.phase !== null) {
          drives = pose.phase.drives.map(([cube, em, polarity]) => ({
            cube,
            em,
            polarity,
          }));
        }
      }
      cubes.push({
        id: record.id,
        position,
        orientation,
        fidelity: fidelity.get(record.id) ?? "proxy",
        traveling,
      });
    }
    if (swing !== null && this.settingsValue.show_occupancy) {
      occupancy = swing.requiredEmpty;
    }
    return {
      cubes,
      busy: this.busyAt(now),
      simTimeMs: this.simTimeMs,
      scenarioName: this.scenarioName,
      overlay: {
        ids: this.settingsValue.show_ids,
        occupancyCells: occupancy,
        blockingCells: this.blockingCells,
        drives: this.showEms ? drives : [],
      },
      banner: this.banner,
    };
  }

  /** Per-cube fidelity: all proxies in proxy mode; otherwise the lowest
   *  FULL_FIDELITY_CAP ids render full and the rest fall back to proxy. */
  private fidelityById(): Map<number, Fidelity> {
    const out = new Map<number, Fidelity>();
    const records = this.mirror.cubes();
    const allProxy = this.settingsValue.render_fidelity === "proxy";
    records.forEach((record, i) => {
      out.set(
        record.id,
        allProxy || i >= FULL_FIDELITY_CAP ? "proxy" : "full",
      );
    });
    return out;
  }

  private swingDone(now: number): boolean {
    if (this.swing === null) {
      return true;
    }
    return (
      (now - this.swingStartWall) * this.swingSpeed >= this.swing.totalMs
    );
  }

  private commitIfSettled(now: number): void {
    if (this.swing !== null && this.swingDone(now)) {
      if (this.pendingState !== null) {
        this.mirror = LatticeMirror.fromState(this.pendingState);
        this.pendingState = null;
      }
      this.swing = null;
    }
  }
}
