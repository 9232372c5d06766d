/** Promise-oriented wrapper over one `empivot/1` websocket.
 *
 * Works with both the browser `WebSocket` and the Node `ws` client (the
 * common `send`/`addEventListener` surface).  Requests are tagged with a
 * monotonically increasing `id`; the service echoes the id on its direct
 * reply, while `event` frames stream untagged between a `maneuver` request
 * and its `result` and are forwarded to `onEvent`.
 */

import {
  type RequestPayload,
  type ResultFrame,
  type ServerFrame,
  type SessionEvent,
  type SessionSettings,
  type WelcomeFrame,
  corpusFrame,
  exportFrame,
  hashRequest,
  loadFrame,
  maneuverFrame,
  parseServerFrame,
  settingsFrame,
  stateRequest,
} from "./protocol.js";

/** Subset of the WebSocket surface the client needs. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(
    type: "message",
    listener: (event: { data: unknown }) => void,
  ): void;
}

export interface ManeuverExchange {
  events: SessionEvent[];
  result: ResultFrame;
}

interface Pending {
  resolve: (frame: ServerFrame) => void;
  reject: (err: Error) => void;
  /** Maneuver exchanges collect the streamed events until their result. */
  events: SessionEvent[] | null;
}

export class ServiceClient {
  private nextId = 1;
  private readonly pending = new Map<number, Pending>();
  /** Unsolicited events (server pushes outside any tracked request). */
  onEvent: (event: SessionEvent) => void = () => {};
  onWelcome: (frame: WelcomeFrame) => void = () => {};
  onProtocolError: (code: string, message: string) => void = () => {};

  constructor(private readonly socket: SocketLike) {
    socket.addEventListener("message", (event) => {
      const text =
        typeof event.data === "string" ? event.data : String(event.data);
      this.dispatch(text);
    });
  }

  close(): void {
    this.socket.close();
  }

  private dispatch(text: string): void {
    let frame: ServerFrame;
    try {
      frame = parseServerFrame(text);
    } catch (err) {
      this.onProtocolError("client-parse", String(err));
      return;
    }
    if (frame.type === "event") {
      const collector = this.activeManeuver();
      if (collector !== null) {
        collector.push(frame.event);
      } else {
        this.onEvent(frame.event);
      }
      return;
    }
    const id = (frame as { id?: unknown }).id;
    if (typeof id === "number" && this.pending.has(id)) {
      const entry = this.pending.get(id)!;
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

  private activeManeuver(): SessionEvent[] | null {
    for (const entry of this.pending.values()) {
      if (entry.events !== null) {
        return entry.events;
      }
    }
    return null;
  }

  /** Send one tagged frame and await the frame echoing its id. */
  request(
    frame: Record<string, unknown>,
    collectEvents = false,
  ): { id: number; reply: Promise<ServerFrame>; events: SessionEvent[] } {
    const id = this.nextId++;
    frame["id"] = id;
    const events: SessionEvent[] = [];
    const reply = new Promise<ServerFrame>((resolve, reject) => {
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
  async maneuver(request: RequestPayload): Promise<ManeuverExchange> {
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

  async hash(): Promise<string> {
    const frame = await this.expect("hash", hashRequest());
    return (frame as { value: string }).value;
  }

  async state(): Promise<ServerFrame> {
    return this.expect("state", stateRequest());
  }

  async updateSettings(
    changes: Partial<SessionSettings>,
  ): Promise<SessionSettings> {
    const frame = await this.expect("settings", settingsFrame(changes));
    return (frame as { settings: SessionSettings }).settings;
  }

  async corpusNames(): Promise<string[]> {
    const frame = await this.expect("corpus", corpusFrame());
    return (frame as { names: string[] }).names;
  }

  async loadScenario(source: {
    name?: string;
    text?: string;
  }): Promise<WelcomeFrame> {
    const frame = await this.expect("welcome", loadFrame(source));
    return frame as WelcomeFrame;
  }

  async exportTimeline(options: {
    format?: "text" | "binary";
    start?: number;
    stop?: number;
  }): Promise<ServerFrame> {
    return this.expect("timeline", exportFrame(options));
  }

  private async expect(
    type: string,
    frame: Record<string, unknown>,
  ): Promise<ServerFrame> {
    const { reply } = this.request(frame);
    const response = await reply;
    if (response.type === "error") {
      const err = response as { code: string; message: string };
      throw new Error(`${err.code}: ${err.message}`);
    }
    if (response.type !== type) {
      throw new Error(`expected ${type} frame, got ${response.type}`);
    }
    return response;
  }
}
