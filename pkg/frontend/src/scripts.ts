/** Sequential script execution: one maneuver at a time, awaiting each
 *  settled animation before the next request.
 *
 * The service rejects (never queues) requests while busy, so the runner
 * waits out each maneuver's busy window — total duration divided by the
 * animation speed — before sending the next step, and retries briefly if
 * a `busy` rejection still slips through.  On the first planner failure
 * it halts and reports the failing step.
 */

import type { RequestPayload } from "./protocol.js";
import type { ManeuverOutcome } from "./viewmodel.js";

export interface RunnerHooks {
  /** Submit one request; resolves with the view-model outcome. */
  send: (request: RequestPayload) => Promise<ManeuverOutcome>;
  /** Await `ms` wall milliseconds (injectable for tests). */
  wait: (ms: number) => Promise<void>;
  /** Progress callback: 1-based step just started, total steps. */
  onProgress?: (step: number, total: number) => void;
}

export interface RunOutcome {
  completed: boolean;
  /** Steps that finished successfully. */
  done: number;
  /** 1-based failing step when halted. */
  failedStep?: number;
  errorCode?: string;
  errorMessage?: string;
}

/** Safety margin added to each busy wait, wall milliseconds. */
const WAIT_MARGIN_MS = 5;
const BUSY_RETRY_MS = 25;
const BUSY_RETRY_LIMIT = 40;

export async function runScript(
  script: RequestPayload[],
  hooks: RunnerHooks,
): Promise<RunOutcome> {
  const total = script.length;
  for (let i = 0; i < total; i++) {
    const request = script[i]!;
    hooks.onProgress?.(i + 1, total);
    let outcome = await hooks.send(request);
    let retries = 0;
    while (
      !outcome.ok &&
      outcome.error?.code === "busy" &&
      retries < BUSY_RETRY_LIMIT
    ) {
      retries += 1;
      await hooks.wait(Math.max(outcome.busyMs, BUSY_RETRY_MS));
      outcome = await hooks.send(request);
    }
    if (!outcome.ok) {
      return {
        completed: false,
        done: i,
        failedStep: i + 1,
        errorCode: outcome.error?.code,
        errorMessage: outcome.error?.message,
      };
    }
    await hooks.wait(outcome.busyMs + WAIT_MARGIN_MS);
  }
  return { completed: true, done: total };
}
