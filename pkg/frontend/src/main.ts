// Panel bootstrap: connect, wire controls, render at display rate.

import { ServiceConnection } from "./connection.js";
import {
  DRAG_GRIP_DAMPING,
  DRAG_GRIP_STIFFNESS,
  DragTracker,
  RateLimiter,
  pointerToDialAngle,
} from "./drag.js";
import { outbound } from "./protocol.js";
import { drawDial, drawFinView, drawTorqueBar } from "./render.js";
import { initialState, inputsEnabled, reduce, type UiState } from "./state.js";

const params = new URLSearchParams(window.location.search);
const WS_URL = params.get("ws") ?? "ws://127.0.0.1:8781";
const STREAM_RATE_HZ = 60;

let state: UiState = initialState();

const dial = canvas("dial");
const torque = canvas("torque");
const fins = canvas("fins");
const banner = element("banner");
const toast = element("toast");
const modeBar = element("modes");
const resetButton = element("reset") as HTMLButtonElement;

function canvas(id: string): HTMLCanvasElement {
  return document.getElementById(id) as HTMLCanvasElement;
}

function element(id: string): HTMLElement {
  return document.getElementById(id) as HTMLElement;
}

function dispatch(event: Parameters<typeof reduce>[1]): void {
  state = reduce(state, event);
  syncControls();
}

const connection = new ServiceConnection(WS_URL, {
  onOpen() {
    dispatch({ kind: "open" });
    connection.send(outbound.hello());
    connection.send(outbound.subscribe(STREAM_RATE_HZ));
  },
  onClose() {
    dispatch({ kind: "close" });
  },
  onMessage(msg) {
    dispatch({ kind: "message", msg });
  },
});

// -- mode buttons -----------------------------------------------------------

function buildModeButtons(): void {
  modeBar.innerHTML = "";
  const entries = state.modes.length
    ? state.modes
    : [1, 2, 3, 4, 5, 6].map((mode) => ({ mode, name: `mode ${mode}`, preset: "" }));
  for (const info of entries) {
    const button = document.createElement("button");
    button.dataset.mode = String(info.mode);
    button.textContent = `${info.mode} · ${info.name}`;
    button.addEventListener("click", () => {
      if (!inputsEnabled(state)) return;
      dispatch({ kind: "request_mode", mode: info.mode });
      connection.send(outbound.setMode(info.mode));
    });
    modeBar.appendChild(button);
  }
}

resetButton.addEventListener("click", () => {
  if (inputsEnabled(state)) connection.send(outbound.reset());
});

function syncControls(): void {
  banner.hidden = state.connected;
  toast.textContent = state.toast ?? "";
  toast.hidden = !state.toast;
  if (modeBar.childElementCount !== Math.max(state.modes.length, 6)) {
    buildModeButtons();
  }
  for (const child of Array.from(modeBar.children)) {
    const button = child as HTMLButtonElement;
    button.disabled = !inputsEnabled(state);
    button.classList.toggle(
      "active",
      Number(button.dataset.mode) === state.selectedMode,
    );
  }
  resetButton.disabled = !inputsEnabled(state);
}

// -- drag to turn -------------------------------------------------------------

const tracker = new DragTracker();
const limiter = new RateLimiter();

function dialPointerAngle(event: PointerEvent): number {
  const rect = dial.getBoundingClientRect();
  return pointerToDialAngle(
    { x: event.clientX - rect.left, y: event.clientY - rect.top },
    rect.width / 2,
    rect.height / 2,
  );
}

dial.addEventListener("pointerdown", (event) => {
  if (!inputsEnabled(state)) return;
  dial.setPointerCapture(event.pointerId);
  tracker.begin(dialPointerAngle(event), state.latest?.theta_deg ?? 0);
  connection.send(
    outbound.grip(tracker.currentTarget, DRAG_GRIP_STIFFNESS, DRAG_GRIP_DAMPING),
  );
});

dial.addEventListener("pointermove", (event) => {
  if (!tracker.engaged) return;
  const target = tracker.move(dialPointerAngle(event));
  if (limiter.ready(performance.now())) {
    connection.send(
      outbound.grip(target, DRAG_GRIP_STIFFNESS, DRAG_GRIP_DAMPING),
    );
  }
});

function endDrag(): void {
  if (!tracker.engaged) return;
  tracker.end();
  connection.send(outbound.release());
}

dial.addEventListener("pointerup", endDrag);
dial.addEventListener("pointercancel", endDrag);

// -- render loop ---------------------------------------------------------------

function frame(): void {
  drawDial(dial.getContext("2d")!, state.latest, dial.width);
  drawTorqueBar(
    torque.getContext("2d")!,
    state.latest,
    torque.width,
    torque.height,
    state.maxTorqueNcm,
  );
  drawFinView(fins.getContext("2d")!, state.latest, fins.width);
  const readout = element("readout");
  if (state.latest) {
    readout.textContent =
      `t=${state.latest.t_s.toFixed(3)}s  ` +
      `θ=${state.latest.theta_deg.toFixed(1)}°  ` +
      `ω=${state.latest.omega_dps.toFixed(1)}°/s  ` +
      `τ=${state.latest.torque_cmd_ncm.toFixed(2)} N·cm  ` +
      `preset=${state.latest.preset}`;
  }
  requestAnimationFrame(frame);
}

buildModeButtons();
syncControls();
connection.connect();
requestAnimationFrame(frame);
