// Wire protocol shared with the simulator service: newline-delimited JSON.
// Over the WebSocket bridge each text frame carries exactly one line.

export interface Snapshot {
  t_s: number;
  theta_deg: number;
  omega_dps: number;
  torque_cmd_ncm: number;
  duty: number;
  direction: "cw" | "ccw";
  mode: number;
  preset: string;
  pulley_a_deg: number;
  pulley_b_deg: number;
  fins_mm: number[];
  hand_torque_ncm: number;
}

export interface ModeInfo {
  mode: number;
  name: string;
  preset: string;
}

export interface AckMessage {
  type: "ack";
  id?: number | string;
  mode?: number;
  preset?: string;
  rate_hz?: number;
  modes?: ModeInfo[];
  presets?: string[];
  max_torque_ncm?: number;
  [key: string]: unknown;
}

export interface ErrorMessage {
  type: "error";
  code: string;
  id?: number | string;
}

export type SnapshotMessage = Snapshot & { type: "snapshot" };

export type ServerMessage = AckMessage | ErrorMessage | SnapshotMessage;

const SNAPSHOT_NUMBER_FIELDS = [
  "t_s",
  "theta_deg",
  "omega_dps",
  "torque_cmd_ncm",
  "duty",
  "mode",
  "pulley_a_deg",
  "pulley_b_deg",
  "hand_torque_ncm",
] as const;

export function isSnapshot(msg: unknown): msg is SnapshotMessage {
  if (typeof msg !== "object" || msg === null) return false;
  const m = msg as Record<string, unknown>;
  if (m.type !== "snapshot") return false;
  for (const field of SNAPSHOT_NUMBER_FIELDS) {
    if (typeof m[field] !== "number" || !Number.isFinite(m[field])) return false;
  }
  if (m.direction !== "cw" && m.direction !== "ccw") return false;
  if (typeof m.preset !== "string") return false;
  if (!Array.isArray(m.fins_mm) || m.fins_mm.length !== 6) return false;
  return m.fins_mm.every((d) => typeof d === "number" && Number.isFinite(d));
}

export function parseServerLine(line: string): ServerMessage | null {
  let parsed: unknown;
  try {
    parsed = JSON.parse(line);
  } catch {
    return null;
  }
  if (typeof parsed !== "object" || parsed === null) return null;
  const msg = parsed as Record<string, unknown>;
  if (msg.type === "ack") return msg as unknown as AckMessage;
  if (msg.type === "error" && typeof msg.code === "string")
    return msg as unknown as ErrorMessage;
  if (isSnapshot(msg)) return msg;
  return null;
}

// Client -> server message builders. Every call site goes through these so
// the outbound schema lives in one place.
export const outbound = {
  hello(): object {
    return { type: "hello" };
  },
  setMode(mode: number): object {
    return { type: "set_mode", mode };
  },
  setPreset(preset: string): object {
    return { type: "set_preset", preset };
  },
  reset(): object {
    return { type: "reset" };
  },
  subscribe(rateHz: number): object {
    return { type: "subscribe", rate_hz: rateHz };
  },
  unsubscribe(): object {
    return { type: "unsubscribe" };
  },
  grip(targetDeg: number, stiffness: number, damping: number): object {
    return {
      type: "set_hand",
      mode: "position_grip",
      target_deg: targetDeg,
      grip_stiffness: stiffness,
      grip_damping: damping,
    };
  },
  release(): object {
    // stiffness 0: the virtual hand lets go but stays registered
    return {
      type: "set_hand",
      mode: "position_grip",
      target_deg: 0,
      grip_stiffness: 0,
      grip_damping: 0,
    };
  },
};

export function encodeLine(msg: object): string {
  return JSON.stringify(msg);
}
