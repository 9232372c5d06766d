/** Browser entry point: wires the socket client, the display model, the
 *  three.js viewport, and the DOM panels together.
 *
 * All authoritative state lives server-side; this file only routes frames
 * into the view model and user gestures out as protocol messages.
 */

import { ServiceClient } from "./client.js";
import type {
  AxisLetter,
  DirectionName,
  RequestPayload,
  SessionSettings,
  WelcomeFrame,
} from "./protocol.js";
import { runScript } from "./scripts.js";
import { SceneView } from "./scene.js";
import { type ManeuverOutcome, ViewModel } from "./viewmodel.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (el === null) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
};

const now = (): number => performance.now();
const wait = (ms: number): Promise<void> =>
  new Promise((resolve) => setTimeout(resolve, ms));

function main(): void {
  const vm = new ViewModel(now);
  const scheme = location.protocol === "https:" ? "wss" : "ws";
  const socket = new WebSocket(`${scheme}://${location.host}/ws`);
  const client = new ServiceClient(socket);

  const banner = $("banner");
  const busyDot = $("busy-dot");
  const simTime = $("sim-time");
  const hashStatus = $("hash-status");
  const scenarioName = $("scenario-name");
  const progress = $("progress");
  const scriptsPanel = $("scripts");
  const corpusPanel = $("corpus");

  const scene = new SceneView($("viewport"), {
    onArrow: (cube, axis, direction) => {
      void submit({ cube, axis, direction });
    },
  });

  let running = false;

  async function submit(request: RequestPayload): Promise<ManeuverOutcome> {
    if (vm.busyAt(now())) {
      flashBusy();
      return {
        ok: false,
        busyMs: vm.busyRemaining(now()),
        error: {
          kind: "error",
          t_ms: 0,
          seq: -1,
          code: "busy",
          message: "maneuver in flight",
        },
      };
    }
    const exchange = await client.maneuver(request);
    const outcome = vm.applyEvents(exchange.events);
    if (outcome.ok) {
      vm.applyResult(exchange.result.state);
      window.setTimeout(() => {
        void reconcile();
      }, outcome.busyMs + 30);
    }
    return outcome;
  }

  async function reconcile(): Promise<void> {
    const check = await vm.reconcile();
    hashStatus.textContent = check.ok ? "state ✓" : "state DRIFT";
    hashStatus.className = check.ok ? "ok" : "bad";
    hashStatus.title = `local ${check.local.slice(0, 12)}… server ${check.server.slice(0, 12)}…`;
  }

  function flashBusy(): void {
    busyDot.classList.add("flash");
    window.setTimeout(() => busyDot.classList.remove("flash"), 350);
  }

  function rebuildScripts(welcome: WelcomeFrame): void {
    scriptsPanel.replaceChildren();
    const script = welcome.script;
    if (script.length === 0) {
      const note = document.createElement("p");
      note.className = "hint";
      note.textContent = "Scenario ships no scripted maneuvers.";
      scriptsPanel.appendChild(note);
      return;
    }
    const button = document.createElement("button");
    button.textContent = `Run script (${script.length} maneuvers)`;
    button.addEventListener("click", () => {
      if (running || vm.busyAt(now())) {
        flashBusy();
        return;
      }
      running = true;
      button.disabled = true;
      void runScript(script, {
        send: submit,
        wait,
        onProgress: (step, total) => {
          progress.textContent = `step ${step} of ${total}`;
        },
      })
        .then((outcome) => {
          progress.textContent = outcome.completed
            ? `completed ${outcome.done} maneuvers`
            : `halted at step ${outcome.failedStep}: ${outcome.errorCode}`;
          return reconcile();
        })
        .finally(() => {
          running = false;
          button.disabled = false;
        });
    });
    scriptsPanel.appendChild(button);
  }

  async function rebuildCorpus(): Promise<void> {
    const names = await client.corpusNames();
    corpusPanel.replaceChildren();
    for (const name of names) {
      const button = document.createElement("button");
      button.textContent = name;
      button.addEventListener("click", () => {
        if (running || vm.busyAt(now())) {
          flashBusy();
          return;
        }
        void client.loadScenario({ name }).then((welcome) => {
          applyWelcome(welcome);
        });
      });
      corpusPanel.appendChild(button);
    }
  }

  function applyWelcome(welcome: WelcomeFrame): void {
    vm.applyWelcome(welcome);
    scenarioName.textContent = welcome.name;
    scene.resetViewOnNextState();
    rebuildScripts(welcome);
    syncSettingsPanel(welcome.settings);
    progress.textContent = "";
    void reconcile();
  }

  // -- settings panel -------------------------------------------------------

  const speedInput = $<HTMLInputElement>("speed");
  const speedLabel = $("speed-label");
  const fidelitySelect = $<HTMLSelectElement>("fidelity");
  const showIds = $<HTMLInputElement>("show-ids");
  const showOccupancy = $<HTMLInputElement>("show-occupancy");
  const showEms = $<HTMLInputElement>("show-ems");

  function syncSettingsPanel(settings: SessionSettings): void {
    speedInput.value = String(Math.log2(settings.animation_speed));
    speedLabel.textContent = `×${settings.animation_speed}`;
    fidelitySelect.value = settings.render_fidelity;
    showIds.checked = settings.show_ids;
    showOccupancy.checked = settings.show_occupancy;
  }

  async function pushSettings(
    changes: Partial<SessionSettings>,
  ): Promise<void> {
    const settings = await client.updateSettings(changes);
    vm.applySettings(settings);
    syncSettingsPanel(settings);
  }

  speedInput.addEventListener("change", () => {
    const speed = 2 ** Number(speedInput.value);
    void pushSettings({ animation_speed: speed });
  });
  fidelitySelect.addEventListener("change", () => {
    void pushSettings({
      render_fidelity: fidelitySelect.value as "full" | "proxy",
    });
  });
  showIds.addEventListener("change", () => {
    void pushSettings({ show_ids: showIds.checked });
  });
  showOccupancy.addEventListener("change", () => {
    void pushSettings({ show_occupancy: showOccupancy.checked });
  });
  showEms.addEventListener("change", () => {
    vm.showEms = showEms.checked;
  });

  $("export-text").addEventListener("click", () => {
    void client.exportTimeline({ format: "text" }).then((frame) => {
      const text = (frame as { text?: string }).text ?? "";
      download("timeline.txt", new Blob([text], { type: "text/plain" }));
    });
  });
  $("export-binary").addEventListener("click", () => {
    void client.exportTimeline({ format: "binary" }).then((frame) => {
      const b64 = (frame as { base64?: string }).base64 ?? "";
      const bytes = Uint8Array.from(atob(b64), (ch) => ch.charCodeAt(0));
      download(
        "timeline.bin",
        new Blob([bytes], { type: "application/octet-stream" }),
      );
    });
  });

  function download(filename: string, blob: Blob): void {
    const url = URL.createObjectURL(blob);
    const a = document.createElement("a");
    a.href = url;
    a.download = filename;
    a.click();
    URL.revokeObjectURL(url);
  }

  // -- socket wiring ---------------------------------------------------------

  client.onWelcome = (welcome) => {
    applyWelcome(welcome);
    void rebuildCorpus();
  };
  client.onProtocolError = (code, message) => {
    banner.textContent = `${code}: ${message}`;
    banner.classList.remove("hidden");
  };

  // -- frame loop ------------------------------------------------------------

  function frame(): void {
    const state = vm.renderAt(now());
    scene.update(state);
    scene.renderFrame();
    busyDot.classList.toggle("busy", state.busy);
    simTime.textContent = `sim ${(state.simTimeMs / 1000).toFixed(2)} s`;
    if (state.banner !== null) {
      banner.textContent = `${state.banner.code}: ${state.banner.message}`;
      banner.classList.remove("hidden");
    } else {
      banner.classList.add("hidden");
    }
    requestAnimationFrame(frame);
  }
  requestAnimationFrame(frame);
}

main();
