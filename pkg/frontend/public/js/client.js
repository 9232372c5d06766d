/** Promise-oriented wrapper over one `empivot/1` websocket.
 *
 * Works with both the browser `WebSocket` and the Node `ws` client (the
 * common `send`/`addEventListener` surface).  Requests are tagged with a
 * monotonically increasing `id`; the service echoes the id on its direct
 * reply, while `event` frames stream untagged between a `maneuver` request
 * and its `result` and are forwarded to `onEvent`.
 */
import { corpusFrame, exportFrame, hashRequest, loadFrame, maneuverFrame, parseServerFrame, settingsFrame, stateRequest, } from "./protocol.js";
export class ServiceClient {
    socket;
    nextId = 1;
    pending = new Map();
    /** Unsolicited events (server pushes outside any tracked request). */
    onEvent = () => { };
    onWelcome = () => { };
    onProtocolError = () => { };
    constructor(socket) {
        this.socket = socket;
        socket.addEventListener("message", (event) => {
            const text = typeof event.data === "string" ? event.data : String(event.data);
            this.dispatch(text);
        });
    }
    close() {
        this.socket.close();
    }
    dispatch(text) {
        let frame;
        try {
            frame = parseServerFrame(text);
        }
        catch (err) {
            this.onProtocolError("client-parse", String(err));
            return;
        }
        if (frame.type === "event") {
            const collector = this.activeManeuver();
            if (collector !== null) {
                collector.push(frame.event);
            }
            else {
                this.onEvent(frame.event);
            }
            return;
        }
        const id = frame.id;
        if (typeof id === "number" && this.pending.has(id)) {
            const entry = this.pending.get(id);
            this.pending.delete(id);
            entry.resolve(frame);
            return;
        }
        if (frame.type === "welcome") {
            this.onWelcome(frame);
            return;
        }
        if (frame.type === "error") {
            this.onProtocolError(frame.code, frame.message);
        }
    }
    activeManeuver() {
        for (const entry of this.pending.values()) {
            if (entry.events !== null) {
                return entry.events;
            }
        }
        return null;
    }
    /** Send one tagged frame and await the frame echoing its id. */
    request(frame, collectEvents = false) {
        const id = this.nextId++;
        frame["id"] = id;
        const events = [];
        const reply = new Promise((resolve, reject) => {
            this.pending.set(id, {
                resolve,
                reject,
                events: collectEvents ? events : null,
            });
        });
        this.socket.send(JSON.stringify(frame));
        return { id, reply, events };
    }
    /** Run one maneuver: resolves with the streamed events and the result.
     *  Service-level rejections (busy, planner errors) resolve with
     *  result.ok === false and the error event in `events`. */
    async maneuver(request) {
        const { reply, events } = this.request(maneuverFrame(request), true);
        const frame = await reply;
        if (frame.type === "error") {
            throw new Error(`${frame.code}: ${frame.message}`);
        }
        if (frame.type !== "result") {
            throw new Error(`expected result frame, got ${frame.type}`);
        }
        return { events, result: frame };
    }
    async hash() {
        const frame = await this.expect("hash", hashRequest());
        return frame.value;
    }
    async state() {
        return this.expect("state", stateRequest());
    }
    async updateSettings(changes) {
        const frame = await this.expect("settings", settingsFrame(changes));
        return frame.settings;
    }
    async corpusNames() {
        const frame = await this.expect("corpus", corpusFrame());
        return frame.names;
    }
    async loadScenario(source) {
        const frame = await this.expect("welcome", loadFrame(source));
        return frame;
    }
    async exportTimeline(options) {
        return this.expect("timeline", exportFrame(options));
    }
    async expect(type, frame) {
        const { reply } = this.request(frame);
        const response = await reply;
        if (response.type === "error") {
            const err = response;
            throw new Error(`${err.code}: ${err.message}`);
        }
        if (response.type !== type) {
            throw new Error(`expected ${type} frame, got ${response.type}`);
        }
        return response;
    }
}
