// UI state machine. The panel renders only what the service streamed at it:
// no client-side physics, so replaying the same snapshots reproduces the
// same display.

import type { ModeInfo, ServerMessage, Snapshot } from "./protocol.js";

export interface UiState {
  connected: boolean;
  latest: Snapshot | null;
  selectedMode: number;
  pendingMode: number | null;
  modes: ModeInfo[];
  maxTorqueNcm: number;
  toast: string | null;
}

export type UiEvent =
  | { kind: "open" }
  | { kind: "close" }
  | { kind: "message"; msg: ServerMessage }
  | { kind: "request_mode"; mode: number }
  | { kind: "clear_toast" };

export function initialState(): UiState {
  return {
    connected: false,
    latest: null,
    selectedMode: 1,
    pendingMode: null,
    modes: [],
    maxTorqueNcm: 25,
    toast: null,
  };
}

export function reduce(state: UiState, event: UiEvent): UiState {
  switch (event.kind) {
    case "open":
      return { ...state, connected: true, toast: null };
    case "close":
      // keep the last snapshot on screen, but flag the link and lock inputs
      return { ...state, connected: false, toast: "disconnected" };
    case "request_mode":
      return { ...state, pendingMode: event.mode };
    case "clear_toast":
      return { ...state, toast: null };
    case "message":
      return applyMessage(state, event.msg);
  }
}

function applyMessage(state: UiState, msg: ServerMessage): UiState {
  if (msg.type === "error") {
    // surface the code; an error never mutates the panel's view of the device
    return { ...state, pendingMode: null, toast: msg.code };
  }
  if (msg.type === "ack") {
    let next = state;
    if (Array.isArray(msg.modes)) {
      next = { ...next, modes: msg.modes };
    }
    if (typeof msg.max_torque_ncm === "number") {
      next = { ...next, maxTorqueNcm: msg.max_torque_ncm };
    }
    if (typeof msg.mode === "number") {
      next = { ...next, selectedMode: msg.mode, pendingMode: null };
    }
    return next;
  }
  // snapshot: the stream is the source of truth, mode highlight included
  const { type: _type, ...snapshot } = msg;
  return { ...state, latest: snapshot as Snapshot, selectedMode: snapshot.mode };
}

export function inputsEnabled(state: UiState): boolean {
  return state.connected;
}
