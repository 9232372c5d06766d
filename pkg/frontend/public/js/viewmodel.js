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
import { LatticeMirror } from "./lattice.js";
import { orientationDuringSwing, poseAt, swingFromEvents, } from "./animation.js";
import { orientationFromIndex } from "./orientation.js";
/** Most detailed cubes a scene renders before falling back to proxies. */
export const FULL_FIDELITY_CAP = 200;
export class ViewModel {
    now;
    mirror = new LatticeMirror();
    settingsValue = {
        animation_speed: 1.0,
        render_fidelity: "full",
        show_ids: false,
        show_occupancy: false,
    };
    scenarioName = "";
    simTimeMs = 0;
    swing = null;
    swingStartWall = 0;
    swingSpeed = 1.0;
    pendingState = null;
    banner = null;
    blockingCells = [];
    lastServerHash = "";
    /** Client-local overlay: show electromagnet drive markers. */
    showEms = true;
    constructor(now = () => Date.now()) {
        this.now = now;
    }
    get settings() {
        return this.settingsValue;
    }
    get scenario() {
        return this.scenarioName;
    }
    /** Hash reported by the server for the current authoritative state. */
    get serverHash() {
        return this.lastServerHash;
    }
    snapshot() {
        this.commitIfSettled(this.now());
        return this.mirror;
    }
    applyWelcome(frame) {
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
    applySettings(settings) {
        this.settingsValue = settings;
    }
    /** Feed one maneuver's event batch (either phases+settled or one error). */
    applyEvents(events) {
        const error = events.find((e) => e.kind === "error");
        if (error !== undefined) {
            this.banner = { code: error.code, message: error.message };
            this.blockingCells = error.blocking ?? [];
            return { ok: false, error, busyMs: this.busyRemaining(this.now()) };
        }
        const accepted = events.find((e) => e.kind === "accepted");
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
            this.lastServerHash = settled.state_hash ??
                this.lastServerHash;
        }
        return {
            ok: true,
            accepted,
            busyMs: this.swing.totalMs / this.swingSpeed,
        };
    }
    /** Authoritative post-maneuver state; applied when the swing finishes. */
    applyResult(state) {
        this.pendingState = state;
        this.lastServerHash = state.hash;
        this.commitIfSettled(this.now());
    }
    /** Replace the whole state outside a maneuver (state frame refresh). */
    applyState(state) {
        this.mirror = LatticeMirror.fromState(state);
        this.lastServerHash = state.hash;
        this.swing = null;
        this.pendingState = null;
    }
    busyAt(now) {
        return this.swing !== null && !this.swingDone(now);
    }
    /** Wall ms until the current animation completes (0 when idle). */
    busyRemaining(now) {
        if (this.swing === null) {
            return 0;
        }
        const end = this.swingStartWall + this.swing.totalMs / this.swingSpeed;
        return Math.max(0, end - now);
    }
    clearBanner() {
        this.banner = null;
        this.blockingCells = [];
    }
    /** Compare the mirrored state hash against the server's. */
    async reconcile() {
        const local = await this.snapshot().stateHash();
        return {
            local,
            server: this.lastServerHash,
            ok: local === this.lastServerHash,
        };
    }
    renderAt(now) {
        this.commitIfSettled(now);
        const swing = this.swing;
        const fidelity = this.fidelityById();
        const cubes = [];
        let drives = [];
        let occupancy = [];
        for (const record of this.mirror.cubes()) {
            const base = orientationFromIndex(record.orientation);
            let position = [record.x, record.y, record.z];
            let orientation = base;
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
    fidelityById() {
        const out = new Map();
        const records = this.mirror.cubes();
        const allProxy = this.settingsValue.render_fidelity === "proxy";
        records.forEach((record, i) => {
            out.set(record.id, allProxy || i >= FULL_FIDELITY_CAP ? "proxy" : "full");
        });
        return out;
    }
    swingDone(now) {
        if (this.swing === null) {
            return true;
        }
        return ((now - this.swingStartWall) * this.swingSpeed >= this.swing.totalMs);
    }
    commitIfSettled(now) {
        if (this.swing !== null && this.swingDone(now)) {
            if (this.pendingState !== null) {
                this.mirror = LatticeMirror.fromState(this.pendingState);
                this.pendingState = null;
            }
            this.swing = null;
        }
    }
}
