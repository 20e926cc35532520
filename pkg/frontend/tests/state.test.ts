import { describe, expect, it } from "vitest";

import type { SnapshotMessage } from "../src/protocol.js";
import { initialState, inputsEnabled, reduce } from "../src/state.js";

function snapshotMsg(overrides: Partial<SnapshotMessage> = {}): SnapshotMessage {
  return {
    type: "snapshot",
    t_s: 1.0,
    theta_deg: 33.0,
    omega_dps: 0,
    torque_cmd_ncm: 0,
    duty: 0,
    direction: "cw",
    mode: 2,
    preset: "four_fin",
    pulley_a_deg: 90,
    pulley_b_deg: 0,
    fins_mm: [0, 8, 8, 0, 8, 8],
    hand_torque_ncm: 0,
    ...overrides,
  };
}

describe("ui state", () => {
  it("disables inputs until connected", () => {
    let state = initialState();
    expect(inputsEnabled(state)).toBe(false);
    state = reduce(state, { kind: "open" });
    expect(inputsEnabled(state)).toBe(true);
    state = reduce(state, { kind: "close" });
    expect(inputsEnabled(state)).toBe(false);
    expect(state.toast).toBe("disconnected");
  });

  it("highlights the mode only after the ack", () => {
    let state = reduce(initialState(), { kind: "open" });
    state = reduce(state, { kind: "request_mode", mode: 3 });
    expect(state.pendingMode).toBe(3);
    expect(state.selectedMode).toBe(1);
    state = reduce(state, { kind: "message", msg: { type: "ack", mode: 3 } });
    expect(state.selectedMode).toBe(3);
    expect(state.pendingMode).toBeNull();
  });

  it("shows a toast on error and changes nothing else", () => {
    let state = reduce(initialState(), { kind: "open" });
    const before = state;
    state = reduce(state, {
      kind: "message",
      msg: { type: "error", code: "out_of_range" },
    });
    expect(state.toast).toBe("out_of_range");
    expect(state.selectedMode).toBe(before.selectedMode);
    expect(state.latest).toBe(before.latest);
  });

  it("keeps the latest snapshot and follows its mode", () => {
    let state = reduce(initialState(), { kind: "open" });
    state = reduce(state, { kind: "message", msg: snapshotMsg() });
    expect(state.latest?.theta_deg).toBe(33.0);
    expect(state.selectedMode).toBe(2);
    state = reduce(state, {
      kind: "message",
      msg: snapshotMsg({ theta_deg: 34.5, t_s: 1.016 }),
    });
    expect(state.latest?.theta_deg).toBe(34.5);
  });

  it("replaying the same messages reproduces the same display state", () => {
    const events = [
      { kind: "open" } as const,
      { kind: "message", msg: { type: "ack", mode: 2 } } as const,
      { kind: "message", msg: snapshotMsg() } as const,
      { kind: "message", msg: snapshotMsg({ theta_deg: 90, t_s: 1.1 }) } as const,
    ];
    const runA = events.reduce(reduce, initialState());
    const runB = events.reduce(reduce, initialState());
    expect(runA).toEqual(runB);
  });

  it("stores the mode table and torque scale from the hello ack", () => {
    let state = reduce(initialState(), { kind: "open" });
    state = reduce(state, {
      kind: "message",
      msg: {
        type: "ack",
        modes: [{ mode: 1, name: "volume_detents", preset: "default" }],
        max_torque_ncm: 25,
      },
    });
    expect(state.modes).toHaveLength(1);
    expect(state.maxTorqueNcm).toBe(25);
  });
});
